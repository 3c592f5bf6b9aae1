#include "checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include "../oracles/oracles.hpp"
#include "vnmeter/evolve.hpp"
#include "vnmeter/kernels.hpp"
#include "vnmeter/observe.hpp"
#include "vnmeter/scenario.hpp"

namespace vnmeter::checks {

namespace {

constexpr double kNormBound = 1e-10;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Check below(std::string name, double measured, double bound) {
    return Check{std::move(name), measured, bound, "<", measured < bound, false};
}

Check info(std::string name, double measured) {
    return Check{std::move(name), measured, 0.0, "info", true, true};
}

Check norm(std::string what, double deviation) {
    return below("norm " + what, deviation, kNormBound);
}

double norm_deviation(const JointState& s) { return std::abs(s.norm_squared() - 1.0); }

double relative(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string fmt(const char* pattern, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

CriterionResult oracle_equivalence() {
    CriterionResult r{1, "oracle equivalence: kicked N=256 vs analytic, standard free scenario", {}, 0.0};
    const auto s = standard_free_scenario();
    const auto initial = s.initial_state();
    const auto t0 = Clock::now();
    const auto analytic = evolve_analytic(s.particle_state(), s.grid_x, s.pointer, s.grid_X, s.params,
                                          s.coupling, s.params.T);
    const double analytic_seconds = seconds_since(t0);
    r.checks.push_back(norm("analytic", norm_deviation(analytic)));

    const std::vector<std::size_t> Ns{16, 32, 64, 128, 256};
    std::vector<double> errors;
    double last_seconds = 0.0;
    for (std::size_t N : Ns) {
        const auto t1 = Clock::now();
        const auto run = evolve_kicked(initial, s.params, s.coupling, N);
        last_seconds = seconds_since(t1);
        errors.push_back(l2_distance(run.final_state, analytic));
        r.checks.push_back(norm("kicked N=" + std::to_string(N), run.max_norm_drift));
        r.checks.push_back(info("l2 error N=" + std::to_string(N), errors.back()));
    }
    r.checks.push_back(below("l2 distance N=256", errors.back(), 1e-3));
    double worst_ratio = 0.0;
    for (std::size_t i = 1; i < errors.size(); ++i) worst_ratio = std::max(worst_ratio, errors[i] / errors[i - 1]);
    r.checks.push_back(below("max error ratio e(2N)/e(N)", worst_ratio, 1.0));
    r.checks.push_back(info("observed order 128->256", std::log2(errors[3] / errors[4])));

    KickedOptions leading;
    leading.placement = KickPlacement::Leading;
    const auto lead = evolve_kicked(initial, s.params, s.coupling, 256, leading);
    r.checks.push_back(norm("kicked leading N=256", lead.max_norm_drift));
    r.checks.push_back(info("l2 distance N=256, leading kicks", l2_distance(lead.final_state, analytic)));
    r.checks.push_back(below("runtime s (kicked N=256 + analytic)", last_seconds + analytic_seconds, 60.0));
    return r;
}

CriterionResult effective_mass_free_width() {
    CriterionResult r{2, "free effective mass: conditional pointer width vs spreading law", {}, 0.0};
    const Grid1D gx(-32.0, 32.0, 1024);
    const Grid1D gX(-16.0, 16.0, 256);
    const double eps = 0.25;
    const double L = 1.0;
    const double x0 = 0.0;
    const auto particle = make_regularized_delta(x0, eps, gx);
    const auto pointer = make_gaussian_state({0.0, L, 0.0}, gX);
    const auto initial = make_product_state(particle, gx, pointer, gX);

    std::vector<double> measured;
    std::vector<double> predicted;
    for (double M : {2.0, 4.0}) {
        PhysicalParams p;
        p.m = 1.0;
        p.M = PointerMass::finite(M);
        p.g = 1.0;
        p.T = 1.0;
        const double m_eff = effective_mass_free(p.m, p.M, p.g).value();
        const auto run = evolve_kicked(initial, p, CouplingFunction::constant(), 256);
        r.checks.push_back(norm("kicked M=" + fmt("%g", M), run.max_norm_drift));
        const double w = fit_gaussian(pointer_conditional(run.final_state, x0)).width_l;
        const double wp = L * std::sqrt(1.0 + 4.0 * p.T * p.T / (m_eff * m_eff * L * L * L * L));
        measured.push_back(w);
        predicted.push_back(wp);
        r.checks.push_back(info("fitted width M=" + fmt("%g", M), w));
        r.checks.push_back(info("predicted width M=" + fmt("%g", M), wp));
        r.checks.push_back(below("width relative error M=" + fmt("%g", M), relative(w, wp), 0.01));
    }
    r.checks.push_back(below("width ratio M=4 / M=2 relative error",
                             relative(measured[1] / measured[0], predicted[1] / predicted[0]), 0.01));
    return r;
}

CriterionResult pointer_average() {
    CriterionResult r{3, "pointer indicates the average position, narrow scenario", {}, 0.0};
    const auto s = narrow_free_scenario();
    const double x1 = s.particle.center;
    const double x2 = uncoupled_center(s.params, s.particle, s.params.T);
    const double target = s.params.g * 0.5 * (x1 + x2);
    const double bound = s.params.g * window_half_width(s.params.m, s.particle.width_l, s.params.T);
    r.checks.push_back(info("x2", x2));
    r.checks.push_back(info("g (x1 + x2) / 2", target));

    const auto run = evolve_kicked(s.initial_state(), s.params, s.coupling, 256);
    r.checks.push_back(norm("kicked", run.max_norm_drift));
    const double mean_k = pointer_marginal(run.final_state).mean();
    r.checks.push_back(below("|pointer mean - g(x1+x2)/2| kicked", std::abs(mean_k - target), bound));

    const auto analytic = evolve_analytic(s.particle_state(), s.grid_x, s.pointer, s.grid_X, s.params,
                                          s.coupling, s.params.T);
    r.checks.push_back(norm("analytic", norm_deviation(analytic)));
    const double mean_a = pointer_marginal(analytic).mean();
    r.checks.push_back(below("|pointer mean - g(x1+x2)/2| analytic", std::abs(mean_a - target), bound));
    return r;
}

CriterionResult sho_consistency() {
    CriterionResult r{4, "oscillator kernel consistency over 50 values of omega*T", {}, 0.0};
    const auto t0 = Clock::now();
    const auto f = CouplingFunction::constant();
    double worst_mass = 0.0;
    double worst_coupling = 0.0;
    const double m = 1.0;
    const double g = 1.0;
    const double T = 1.0;
    for (int i = 0; i < 50; ++i) {
        const double w = 0.05 + (3.0 - 0.05) * static_cast<double>(i) / 49.0;
        const double closed_m = effective_mass_sho_constant(m, w, T, g);
        const double quad_m = effective_mass_sho(m, w, T, f, g);
        worst_mass = std::max(worst_mass, relative(quad_m, closed_m));
        const double closed_g = effective_coupling_sho_constant(g, w, T);
        const double quad_g = effective_coupling_sho(g, w, T, f);
        worst_coupling = std::max(worst_coupling, relative(quad_g, closed_g));
    }
    r.checks.push_back(below("max relative diff, mass closed form vs quadrature A", worst_mass, 1e-8));
    r.checks.push_back(below("max relative diff, coupling closed form vs quadrature B", worst_coupling, 1e-10));
    r.checks.push_back(below("runtime s", seconds_since(t0), 5.0));
    return r;
}

CriterionResult limits() {
    CriterionResult r{5, "limits: small omega*T, short measurement, omega -> 0", {}, 0.0};
    const auto f = CouplingFunction::constant();

    // (a) oscillator kernel at omega*T = 1e-3 vs the free infinite-pointer kernel.
    PhysicalParams sho;
    sho.system = SystemKind::SHO;
    sho.m = 1.0;
    sho.g = 1.0;
    sho.T = 1.0;
    sho.omega = 1e-3;
    PhysicalParams free = sho;
    free.system = SystemKind::Free;
    free.omega = 0.0;
    std::mt19937_64 rng(20240501);
    std::uniform_real_distribution<double> pos(-2.0, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double xi = pos(rng), Xi = pos(rng), xo = pos(rng), Xo = pos(rng);
        const Complex a = propagator_joint(sho, f, xi, Xi, xo, Xo, 1.0);
        const Complex b = propagator_joint(free, f, xi, Xi, xo, Xo, 1.0);
        worst = std::max(worst, std::abs(a - b) / std::abs(b));
    }
    r.checks.push_back(below("(a) max relative kernel diff at omega*T=1e-3", worst, 1e-5));

    // (b) a very short measurement leaves the particle distribution untouched.
    auto s = standard_free_scenario();
    s.params.T = 1e-4;
    const auto phi0 = density_of(s.particle_state(), s.grid_x);
    const auto kicked = evolve_kicked(s.initial_state(), s.params, f, 16);
    r.checks.push_back(norm("(b) kicked", kicked.max_norm_drift));
    r.checks.push_back(below("(b) L1 particle marginal vs |phi0|^2, kicked",
                             l1_distance(particle_marginal(kicked.final_state), phi0), 1e-3));
    const auto analytic = evolve_analytic(s.particle_state(), s.grid_x, s.pointer, s.grid_X, s.params, f,
                                          s.params.T);
    r.checks.push_back(norm("(b) analytic", norm_deviation(analytic)));
    r.checks.push_back(below("(b) L1 particle marginal vs |phi0|^2, analytic",
                             l1_distance(particle_marginal(analytic), phi0), 1e-3));
    JointState impulsive(s.grid_x, s.grid_X);
    const auto particle = s.particle_state();
    for (std::size_t i = 0; i < s.grid_x.size(); ++i) {
        const double x = s.grid_x.coordinate(i);
        GaussianSpec shifted = s.pointer;
        shifted.center += s.params.g * x;
        for (std::size_t j = 0; j < s.grid_X.size(); ++j) {
            impulsive.at(i, j) = particle[i] * gaussian_amplitude(shifted, s.grid_X.coordinate(j));
        }
    }
    r.checks.push_back(below("(b) L2 joint state vs phi0(x) Phi0(X - g x)", l2_distance(analytic, impulsive), 1e-3));

    // (c) omega -> 0 of the oscillator closed forms and quadratures.
    const double w = 1e-6;
    r.checks.push_back(below("(c) mass closed form vs 12m/g^2", relative(effective_mass_sho_constant(1.0, w, 1.0, 1.0), 12.0), 1e-8));
    r.checks.push_back(below("(c) mass quadrature vs 12m/g^2", relative(effective_mass_sho(1.0, w, 1.0, f, 1.0), 12.0), 1e-8));
    r.checks.push_back(below("(c) coupling closed form vs g", relative(effective_coupling_sho_constant(1.0, w, 1.0), 1.0), 1e-8));
    r.checks.push_back(below("(c) coupling quadrature vs g", relative(effective_coupling_sho(1.0, w, 1.0, f), 1.0), 1e-8));
    return r;
}

CriterionResult classical_action() {
    CriterionResult r{6, "classical action: closed form vs numeric boundary-value solution", {}, 0.0};
    PhysicalParams p;
    p.m = 1.0;
    p.M = PointerMass::finite(2.0);
    p.g = 1.0;
    p.T = 1.0;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pos(-2.0, 2.0);
    double worst = 0.0;
    double worst_end = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double xi = pos(rng), Xi = pos(rng), xo = pos(rng), Xo = pos(rng);
        const auto closed = classical_action_free(p, xi, Xi, xo, Xo);
        const auto numeric = oracle::solve_bvp(p.m, p.M.value(), p.g, p.T, xi, Xi, xo, Xo);
        worst = std::max(worst, std::abs(closed.action - numeric.action) / (1.0 + std::abs(closed.action)));
        worst_end = std::max({worst_end, std::abs(numeric.x_end - xo), std::abs(numeric.X_end - Xo)});
    }
    r.checks.push_back(below("max |dS| / (1 + |S|) over 20 tuples", worst, 1e-8));
    r.checks.push_back(info("max shooting end-point miss", worst_end));
    const double fitted = oracle::bvp_effective_mass(p.m, p.M.value(), p.g, p.T);
    r.checks.push_back(below("effective mass from action fit vs 12/7",
                             relative(fitted, effective_mass_free(p.m, p.M, p.g).value()), 1e-8));
    return r;
}

double flatness(const PhysicalParams& p, const char* label, CriterionResult& r) {
    const Grid1D gx(-32.0, 32.0, 1024);
    const Grid1D gX(-40.0, 40.0, 256);
    const double eps = 0.25;
    const auto particle = make_regularized_delta(0.0, eps, gx);
    const auto pointer = make_gaussian_state({0.0, 1.0, 0.0}, gX);
    const auto run = evolve_kicked(make_product_state(particle, gx, pointer, gX), p,
                                   CouplingFunction::constant(), 256);
    r.checks.push_back(norm(std::string("kicked ") + label, run.max_norm_drift));
    const auto marginal = particle_marginal(run.final_state);
    const auto window = central_window(p, 0.0, eps);
    const double target = transition_probability(p, p.T);
    double worst = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
        const double x = gx.coordinate(i);
        if (x < window.low || x > window.high) continue;
        const double density = marginal.density[i] / regularized_delta_weight(eps);
        worst = std::max(worst, std::abs(density / target - 1.0));
    }
    return worst;
}

CriterionResult flat_distributions() {
    CriterionResult r{7, "flat transition distributions from a sharp start", {}, 0.0};
    PhysicalParams free;
    free.m = 1.0;
    free.M = PointerMass::finite(2.0);
    free.g = 1.0;
    free.T = 1.0;
    r.checks.push_back(below("free: max relative deviation in window", flatness(free, "free", r), 0.05));
    PhysicalParams sho;
    sho.system = SystemKind::SHO;
    sho.m = 1.0;
    sho.g = 1.0;
    sho.omega = 1.0;
    sho.T = kPi / 2.0;
    r.checks.push_back(below("oscillator: max relative deviation in window",
                             flatness(sho, "oscillator", r), 0.05));
    return r;
}

CriterionResult overlap_and_mass_independence() {
    CriterionResult r{8, "Gaussian overlap kernel; pointer-mass independence of the distribution", {}, 0.0};
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> gd(0.1, 3.0);
    std::uniform_real_distribution<double> Ld(0.1, 3.0);
    std::uniform_real_distribution<double> dd(-5.0, 5.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double g = gd(rng), L = Ld(rng), d = dd(rng);
        const GaussianSpec pointer{0.0, L, 0.0};
        worst = std::max(worst, std::abs(overlap_kernel(pointer, g, d) - oracle::overlap_boost(pointer, g, d)));
    }
    r.checks.push_back(below("max |closed form - quadrature| over 50 draws", worst, 1e-10));

    auto s = standard_free_scenario();
    const auto particle = s.particle_state();
    const auto d2 = probability_distribution_analytic(particle, s.grid_x, s.pointer, s.params, s.coupling);
    const auto j2 = evolve_analytic(particle, s.grid_x, s.pointer, s.grid_X, s.params, s.coupling, s.params.T);
    s.params.M = PointerMass::finite(4.0);
    const auto d4 = probability_distribution_analytic(particle, s.grid_x, s.pointer, s.params, s.coupling);
    const auto j4 = evolve_analytic(particle, s.grid_x, s.pointer, s.grid_X, s.params, s.coupling, s.params.T);
    r.checks.push_back(norm("analytic M=2", norm_deviation(j2)));
    r.checks.push_back(norm("analytic M=4", norm_deviation(j4)));
    double diff = 0.0;
    double joint_diff = 0.0;
    const auto m2 = particle_marginal(j2);
    const auto m4 = particle_marginal(j4);
    for (std::size_t i = 0; i < d2.density.size(); ++i) {
        diff = std::max(diff, std::abs(d2.density[i] - d4.density[i]));
        joint_diff = std::max(joint_diff, std::abs(m2.density[i] - m4.density[i]));
    }
    r.checks.push_back(below("distribution M=2 vs M=4, max abs diff", diff, 1e-10));
    r.checks.push_back(below("joint-state marginal M=2 vs M=4, max abs diff", joint_diff, 1e-10));
    r.checks.push_back(below("L1 distribution vs joint-state marginal", l1_distance(d2, m2), 1e-4));
    return r;
}

CriterionResult narrow_pointer() {
    CriterionResult r{9, "narrow pointer: L1 distance to uncoupled |phi(x,T)|^2 decreasing in 1/L", {}, 0.0};
    auto s = standard_free_scenario();
    const auto particle = s.particle_state();
    const auto uncoupled = density_of(evolve_particle_uncoupled(particle, s.grid_x, s.params, s.params.T), s.grid_x);
    std::vector<double> distances;
    for (double L : {1.0, 0.5, 0.25, 0.125}) {
        GaussianSpec pointer{0.0, L, 0.0};
        const auto d = probability_distribution_analytic(particle, s.grid_x, pointer, s.params, s.coupling);
        distances.push_back(l1_distance(d, uncoupled));
        r.checks.push_back(info("L1 distance, L=" + fmt("%g", L), distances.back()));
    }
    double worst_step = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < distances.size(); ++i) worst_step = std::max(worst_step, distances[i] - distances[i - 1]);
    r.checks.push_back(below("max successive change d(L/2) - d(L)", worst_step, 0.0));
    return r;
}

}  // namespace

bool CriterionResult::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

CriterionResult unitarity_summary(const std::vector<CriterionResult>& others) {
    CriterionResult r{10, "unitarity everywhere and all criteria passing", {}, 0.0};
    double worst = 0.0;
    std::size_t evolutions = 0;
    double failing = 0.0;
    for (const auto& o : others) {
        if (o.id == 10) continue;
        for (const auto& c : o.checks) {
            if (c.name.rfind("norm ", 0) == 0) {
                worst = std::max(worst, c.measured);
                ++evolutions;
            }
        }
        if (!o.pass()) failing += 1.0;
        r.seconds += o.seconds;
    }
    r.checks.push_back(info("evolutions checked", static_cast<double>(evolutions)));
    r.checks.push_back(below("max |norm - 1| over all evolutions", worst, kNormBound));
    r.checks.push_back(Check{"criteria 1-9 failing", failing, 0.0, "==", failing == 0.0, false});
    return r;
}

CriterionResult run_criterion(int id) {
    if (id == 10) {
        std::vector<CriterionResult> all;
        for (int i = 1; i <= 9; ++i) all.push_back(run_criterion(i));
        return unitarity_summary(all);
    }
    const auto t0 = Clock::now();
    CriterionResult r;
    try {
        switch (id) {
            case 1: r = oracle_equivalence(); break;
            case 2: r = effective_mass_free_width(); break;
            case 3: r = pointer_average(); break;
            case 4: r = sho_consistency(); break;
            case 5: r = limits(); break;
            case 6: r = classical_action(); break;
            case 7: r = flat_distributions(); break;
            case 8: r = overlap_and_mass_independence(); break;
            case 9: r = narrow_pointer(); break;
            default: throw std::invalid_argument("no criterion " + std::to_string(id));
        }
    } catch (const Error& e) {
        r.id = id;
        r.title = "raised an error";
        r.checks.push_back(Check{e.what(), 1.0, 0.0, "error", false, false});
    }
    r.seconds = seconds_since(t0);
    return r;
}

std::vector<int> suite_members(const std::string& suite) {
    if (suite == "kernels") return {4, 6, 8};
    if (suite == "oracle") return {1, 2, 3};
    if (suite == "distributions") return {7, 8, 9};
    if (suite == "limits") return {5};
    if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    throw std::invalid_argument("unknown suite \"" + suite + "\" (kernels, oracle, distributions, limits, all)");
}

std::vector<CriterionResult> run_suite(const std::string& suite) {
    std::vector<CriterionResult> out;
    for (int id : suite_members(suite)) {
        if (id == 10) {
            out.push_back(unitarity_summary(out));
        } else {
            out.push_back(run_criterion(id));
        }
    }
    return out;
}

nlohmann::json to_json(const std::vector<CriterionResult>& results) {
    nlohmann::json checks = nlohmann::json::array();
    bool all = true;
    for (const auto& r : results) {
        all = all && r.pass();
        for (const auto& c : r.checks) {
            checks.push_back({{"criterion", r.id},
                              {"name", c.name},
                              {"measured", std::isfinite(c.measured) ? nlohmann::json(c.measured) : nlohmann::json(nullptr)},
                              {"bound", c.bound},
                              {"relation", c.relation},
                              {"informational", c.informational},
                              {"pass", c.pass}});
        }
    }
    nlohmann::json criteria = nlohmann::json::array();
    for (const auto& r : results) {
        criteria.push_back({{"criterion", r.id}, {"title", r.title}, {"pass", r.pass()}, {"seconds", r.seconds}});
    }
    return {{"pass", all}, {"criteria", criteria}, {"checks", checks}};
}

std::string format_line(const CriterionResult& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "[%s] criterion %d: %s (%.1f s)", r.pass() ? "PASS" : "FAIL", r.id,
                  r.title.c_str(), r.seconds);
    return buf;
}

std::string format_details(const CriterionResult& r) {
    std::string out;
    for (const auto& c : r.checks) {
        char buf[320];
        if (c.informational) {
            std::snprintf(buf, sizeof buf, "      %-58s %.6e\n", c.name.c_str(), c.measured);
        } else {
            std::snprintf(buf, sizeof buf, "  %s  %-58s %.6e %s %.3e\n", c.pass ? "ok  " : "FAIL", c.name.c_str(),
                          c.measured, c.relation.c_str(), c.bound);
        }
        out += buf;
    }
    return out;
}

}  // namespace vnmeter::checks
