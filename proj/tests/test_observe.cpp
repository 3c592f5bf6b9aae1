#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "vnmeter/evolve.hpp"
#include "vnmeter/kernels.hpp"
#include "vnmeter/observe.hpp"

using namespace vnmeter;

namespace {

PhysicalParams free_params(double g, double T) {
    PhysicalParams p;
    p.m = 1.0;
    p.M = PointerMass::finite(2.0);
    p.g = g;
    p.T = T;
    return p;
}

}  // namespace

TEST_CASE("gaussian fit recovers center and width") {
    const Grid1D g(-10.0, 10.0, 512);
    for (const GaussianSpec spec : {GaussianSpec{0.3, 1.2, 0.0}, GaussianSpec{-2.0, 0.5, 3.0}}) {
        const auto fit = fit_gaussian(density_of(make_gaussian_state(spec, g), g));
        CHECK(fit.mean == doctest::Approx(spec.center).epsilon(1e-9));
        CHECK(fit.width_l == doctest::Approx(spec.width_l).epsilon(1e-9));
    }
}

TEST_CASE("l1 distance") {
    const Grid1D g(-10.0, 10.0, 256);
    const auto a = density_of(make_gaussian_state({-3.0, 0.5, 0.0}, g), g);
    const auto b = density_of(make_gaussian_state({3.0, 0.5, 0.0}, g), g);
    CHECK(l1_distance(a, a) == 0.0);
    CHECK(l1_distance(a, b) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("overlap kernel properties") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.2, 2.0);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    for (int i = 0; i < 20; ++i) {
        const GaussianSpec p{d(rng), u(rng), d(rng)};
        const double g = u(rng);
        const double delta = d(rng);
        const Complex o = overlap_kernel(p, g, delta);
        CHECK(std::abs(o) <= 1.0);
        CHECK(std::abs(overlap_kernel(p, g, -delta) - std::conj(o)) < 1e-15);
        CHECK(std::abs(o - oracle::overlap_boost(p, g, delta)) < 1e-12);
        CHECK(std::abs(o) == doctest::Approx(std::exp(-g * g * delta * delta / (8.0 * p.width_l * p.width_l))));
    }
    CHECK(overlap_kernel({0.0, 1.0, 2.0}, 1.0, 0.0) == Complex(1.0, 0.0));

    const Grid1D grid(-16.0, 16.0, 256);
    const GaussianSpec p{0.5, 1.0, 1.5};
    const auto sampled = make_gaussian_state(p, grid);
    for (double delta : {-2.0, 0.3, 1.7}) {
        CHECK(std::abs(overlap_kernel_sampled(sampled, grid, 1.3, delta) - overlap_kernel(p, 1.3, delta)) < 1e-10);
    }
}

TEST_CASE("analytic particle distribution routes agree and are normalized") {
    const Grid1D g(-20.0, 20.0, 512);
    const auto phi = make_gaussian_state({-1.0, 0.7, 1.0}, g);
    const auto p = free_params(1.0, 1.0);
    for (double L : {2.0, 0.5}) {
        const GaussianSpec pointer{0.0, L, 0.0};
        const auto dq = probability_distribution_analytic(phi, g, pointer, p, CouplingFunction::constant(),
                                                          MarginalMethod::DoubleQuadrature);
        const auto mix = probability_distribution_analytic(phi, g, pointer, p, CouplingFunction::constant(),
                                                           MarginalMethod::PointerMixture);
        CHECK(dq.total() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(l1_distance(dq, mix) < 1e-9);
    }
}

TEST_CASE("narrowing the pointer moves the distribution away from the uncoupled one") {
    const Grid1D g(-20.0, 20.0, 512);
    const auto phi = make_gaussian_state({-1.0, 0.7, 1.0}, g);
    const auto p = free_params(1.0, 1.0);
    const auto uncoupled = density_of(evolve_particle_uncoupled(phi, g, p, 1.0), g);
    double previous = 0.0;
    for (double L : {64.0, 4.0, 1.0, 0.25}) {
        const auto d = probability_distribution_analytic(phi, g, {0.0, L, 0.0}, p, CouplingFunction::constant());
        const double dist = l1_distance(d, uncoupled);
        if (L == 64.0) CHECK(dist < 1e-3);
        CHECK(dist > previous);
        previous = dist;
    }
}

TEST_CASE("distribution does not depend on the pointer mass") {
    const Grid1D g(-20.0, 20.0, 512);
    const auto phi = make_gaussian_state({0.5, 0.8, -0.5}, g);
    auto p = free_params(1.0, 1.0);
    const GaussianSpec pointer{0.0, 0.7, 0.0};
    const auto a = probability_distribution_analytic(phi, g, pointer, p, CouplingFunction::constant());
    p.M = PointerMass::finite(9.0);
    const auto b = probability_distribution_analytic(phi, g, pointer, p, CouplingFunction::constant());
    CHECK(l1_distance(a, b) < 1e-12);
}

TEST_CASE("sharp pointer distribution") {
    const Grid1D g(-20.0, 20.0, 256);
    const auto phi = make_gaussian_state({0.0, 1.0, 0.0}, g);
    const auto p = free_params(1.0, 1.0);
    const auto d = sharp_pointer_distribution(phi, g, p, 2.0);
    // |K|^2 is flat at m / 2 pi T, so the density is (2/g) m / 2 pi T everywhere.
    CHECK(d.density[10] == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-10));
    CHECK(d.density[128] == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-10));
    try {
        sharp_pointer_distribution(phi, g, p, 0.0);
        FAIL("expected ZeroCoupling");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ZeroCoupling);
    }
}

TEST_CASE("spread, windows and admissibility") {
    auto p = free_params(1.0, 1.0);
    CHECK(packet_spread(p, 1.0, 1.0) == doctest::Approx(std::sqrt(5.0)));
    CHECK(window_half_width(1.0, 2.0, 0.5) == doctest::Approx(2.03125));
    CHECK(uncoupled_center(p, {-1.0, 2.0, 2.0}, 0.5) == doctest::Approx(0.0));
    CHECK(doubling_time(PointerMass::finite(2.0), 1.0) == doctest::Approx(std::sqrt(3.0)));
    CHECK(std::isinf(doubling_time(PointerMass::infinite(), 1.0)));

    PhysicalParams sho;
    sho.system = SystemKind::SHO;
    sho.omega = 1.0;
    sho.T = kPi / 2.0;
    CHECK(packet_spread(sho, 0.5, kPi / 2.0) == doctest::Approx(4.0));
    CHECK(packet_spread(sho, 0.5, 0.0) == doctest::Approx(0.5));
    CHECK(window_half_width_exact(sho, 0.5, kPi / 2.0) == doctest::Approx(2.25));
    const auto w = central_window(sho, 1.0, 0.5);
    CHECK(w.low == doctest::Approx(0.6));
    CHECK(w.high == doctest::Approx(1.4));

    p.T = 0.01;
    const auto a = admissibility(p, PointerMass::finite(12.0), 1.0, 0.5);
    CHECK(a.packet_narrow);
    CHECK(a.duration_short);
    CHECK(a.pointer_holds);
    CHECK(a.pointer_heavy);
    CHECK(a.spread_ratio == doctest::Approx(4e-4));
    CHECK(a.mass_bound == doctest::Approx(4.0 / std::sqrt(3.0)));
    p.T = 1.0;
    const auto b = admissibility(p, PointerMass::finite(12.0), 1.0, 0.1);
    CHECK_FALSE(b.pointer_holds);
    CHECK_FALSE(b.packet_narrow);
    CHECK_FALSE(b.duration_short);
    CHECK_FALSE(b.pointer_heavy);
}

TEST_CASE("pointer statistics and entanglement") {
    const Grid1D gx(-16.0, 16.0, 256);
    const Grid1D gX(-12.0, 12.0, 128);
    const GaussianSpec particle{-1.0, 1.0, 1.0};
    const auto phi = make_gaussian_state(particle, gx);
    const auto pointer = make_gaussian_state({0.0, 1.0, 0.0}, gX);
    const auto product = make_product_state(phi, gx, pointer, gX);
    CHECK(entanglement_proxy(product) < 1e-12);

    const auto p = free_params(1.0, 1.0);
    const auto state = evolve_analytic(phi, gx, {0.0, 1.0, 0.0}, gX, p, CouplingFunction::constant(), 1.0);
    const auto s = pointer_statistics(state, p, PointerContext{particle, 1.0, CouplingFunction::constant()});
    CHECK(s.shift_predicted == doctest::Approx(-0.5));
    CHECK(s.mean == doctest::Approx(-0.5).epsilon(1e-8));
    CHECK(s.window_low < s.mean);
    CHECK(s.window_high > s.mean);
    CHECK(entanglement_proxy(state) > 0.01);

    // Two orthogonal branches with equal weight.
    JointState cat(gx, gX);
    const auto left = make_gaussian_state({-6.0, 1.0, 0.0}, gx);
    const auto right = make_gaussian_state({6.0, 1.0, 0.0}, gx);
    const auto up = make_gaussian_state({-5.0, 0.8, 0.0}, gX);
    const auto down = make_gaussian_state({5.0, 0.8, 0.0}, gX);
    for (std::size_t i = 0; i < gx.size(); ++i) {
        for (std::size_t j = 0; j < gX.size(); ++j) {
            cat.at(i, j) = (left[i] * up[j] + right[i] * down[j]) / std::sqrt(2.0);
        }
    }
    CHECK(entanglement_proxy(cat) == doctest::Approx(0.5).epsilon(1e-9));
}
