#include "vnmeter/observe.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "vnmeter/evolve.hpp"
#include "vnmeter/fft.hpp"
#include "vnmeter/parallel.hpp"

namespace vnmeter {

namespace {

Complex phase(double angle) { return {std::cos(angle), std::sin(angle)}; }

void require_same_grid(const Distribution1D& a, const Distribution1D& b) {
    if (!(a.grid == b.grid)) fail(ErrorKind::InvalidArgument, "distributions live on different grids");
}

// Extent of the region where |psi|^2 exceeds `floor` times its maximum.
double support_width(const ComplexArray& psi, const Grid1D& grid, double floor = 1e-16) {
    double peak = 0.0;
    for (const auto& a : psi) peak = std::max(peak, std::norm(a));
    std::size_t lo = psi.size();
    std::size_t hi = 0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        if (std::norm(psi[i]) > floor * peak) {
            lo = std::min(lo, i);
            hi = std::max(hi, i);
        }
    }
    if (lo > hi) return 0.0;
    return static_cast<double>(hi - lo + 1) * grid.spacing();
}

Distribution1D marginal_double_quadrature(const ComplexArray& particle, const Grid1D& grid,
                                          const GaussianSpec& pointer, const PhysicalParams& params,
                                          double g_eff) {
    const std::size_t n = grid.size();
    const std::size_t n2 = 2 * n;
    const double dx = grid.spacing();
    const auto x = grid.coordinates();

    // Toeplitz overlap as a circular convolution of length 2n.
    ComplexArray kernel(n2);
    for (std::size_t d = 0; d < n; ++d) {
        kernel[d] = overlap_kernel(pointer, g_eff, static_cast<double>(d) * dx);
        if (d > 0) kernel[n2 - d] = overlap_kernel(pointer, g_eff, -static_cast<double>(d) * dx);
    }
    fft::forward(kernel);
    const fft::Batch line(n2, 1, 1, n2);

    Distribution1D out{grid, std::vector<double>(n)};
    parallel_for(n, [&](std::size_t i) {
        ComplexArray w(n2);
        for (std::size_t ip = 0; ip < n; ++ip) {
            if (particle[ip] == Complex{}) continue;
            w[ip] = particle_propagator(params, x[ip], x[i], params.T) * particle[ip] * dx;
        }
        ComplexArray u = w;
        line.forward(u.data());
        for (std::size_t k = 0; k < n2; ++k) u[k] *= kernel[k];
        line.inverse(u.data());
        Complex s{};
        for (std::size_t ip = 0; ip < n; ++ip) s += std::conj(w[ip]) * u[ip];
        out.density[i] = std::max(0.0, s.real());
    });
    return out;
}

Distribution1D marginal_pointer_mixture(const ComplexArray& particle, const Grid1D& grid,
                                        const GaussianSpec& pointer, const PhysicalParams& params,
                                        double g_eff) {
    const std::size_t n = grid.size();
    const auto x = grid.coordinates();
    const double L = pointer.width_l;
    const double reach = 9.0 / L;
    const double W = support_width(particle, grid);
    const double dP = 2.0 * kPi / (0.5 * std::abs(g_eff) * W + 9.0 * L);
    const auto half = static_cast<std::size_t>(std::ceil(reach / dP));
    const std::size_t count = g_eff == 0.0 ? 1 : 2 * half + 1;

    std::vector<double> density(n, 0.0);
    std::vector<std::vector<double>> parts(count);
    parallel_for(count, [&](std::size_t k) {
        const double P = g_eff == 0.0 ? pointer.momentum_p0
                                      : pointer.momentum_p0 + (static_cast<double>(k) - static_cast<double>(half)) * dP;
        const double weight = g_eff == 0.0 ? 1.0
                                           : std::sqrt(2.0 * kPi) * L *
                                                 std::exp(-0.5 * (P - pointer.momentum_p0) *
                                                          (P - pointer.momentum_p0) * L * L) *
                                                 dP / (2.0 * kPi);
        ComplexArray psi(n);
        for (std::size_t i = 0; i < n; ++i) psi[i] = particle[i] * phase(-0.5 * P * g_eff * x[i]);
        psi = evolve_particle_uncoupled(psi, grid, params, params.T, std::numeric_limits<double>::infinity());
        parts[k].resize(n);
        for (std::size_t i = 0; i < n; ++i) parts[k][i] = weight * std::norm(psi[i]);
    });
    for (const auto& p : parts) {
        for (std::size_t i = 0; i < n; ++i) density[i] += p[i];
    }
    return Distribution1D{grid, std::move(density)};
}

}  // namespace

Distribution1D particle_marginal(const JointState& state) {
    Distribution1D d{state.grid_x, std::vector<double>(state.nx(), 0.0)};
    const double dX = state.grid_X.spacing();
    for (std::size_t i = 0; i < state.nx(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < state.nX(); ++j) s += std::norm(state.at(i, j));
        d.density[i] = s * dX;
    }
    return d;
}

Distribution1D pointer_marginal(const JointState& state) {
    Distribution1D d{state.grid_X, std::vector<double>(state.nX(), 0.0)};
    const double dx = state.grid_x.spacing();
    for (std::size_t i = 0; i < state.nx(); ++i) {
        for (std::size_t j = 0; j < state.nX(); ++j) d.density[j] += std::norm(state.at(i, j));
    }
    for (auto& v : d.density) v *= dx;
    return d;
}

Distribution1D pointer_conditional(const JointState& state, double x) {
    const std::size_t i = state.grid_x.nearest_index(x);
    Distribution1D d{state.grid_X, std::vector<double>(state.nX())};
    for (std::size_t j = 0; j < state.nX(); ++j) d.density[j] = std::norm(state.at(i, j));
    return d;
}

Distribution1D density_of(const ComplexArray& psi, const Grid1D& grid) {
    if (psi.size() != grid.size()) fail(ErrorKind::InvalidArgument, "state size does not match grid");
    Distribution1D d{grid, std::vector<double>(psi.size())};
    for (std::size_t i = 0; i < psi.size(); ++i) d.density[i] = std::norm(psi[i]);
    return d;
}

GaussianFit fit_gaussian(const Distribution1D& d, double mass_fraction) {
    const std::size_t n = d.density.size();
    double total = 0.0;
    for (double v : d.density) total += v;
    if (!(total > 0.0)) fail(ErrorKind::InvalidArgument, "cannot fit an empty distribution");
    const double tail = 0.5 * (1.0 - mass_fraction) * total;
    std::size_t lo = 0;
    double acc = 0.0;
    while (lo + 1 < n && acc + d.density[lo] <= tail) acc += d.density[lo++];
    std::size_t hi = n - 1;
    acc = 0.0;
    while (hi > lo && acc + d.density[hi] <= tail) acc += d.density[hi--];

    // Normal equations for log(rho) = a u^2 + b u + c, u centered for conditioning.
    const double u0 = d.grid.coordinate((lo + hi) / 2);
    Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    std::size_t used = 0;
    for (std::size_t i = lo; i <= hi; ++i) {
        if (!(d.density[i] > 0.0)) continue;
        const double u = d.grid.coordinate(i) - u0;
        const Eigen::Vector3d row(u * u, u, 1.0);
        A += row * row.transpose();
        rhs += row * std::log(d.density[i]);
        ++used;
    }
    if (used < 3) fail(ErrorKind::GridTooCoarse, "too few samples in the central region to fit");
    const Eigen::Vector3d c = A.ldlt().solve(rhs);
    if (!(c[0] < 0.0)) fail(ErrorKind::InvalidArgument, "distribution is not peaked; no Gaussian fit");
    return GaussianFit{u0 - c[1] / (2.0 * c[0]), std::sqrt(-2.0 / c[0])};
}

double l1_distance(const Distribution1D& a, const Distribution1D& b) {
    require_same_grid(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.density.size(); ++i) s += std::abs(a.density[i] - b.density[i]);
    return s * a.grid.spacing();
}

Complex overlap_kernel(const GaussianSpec& pointer, double g, double delta_x) {
    const double a = 0.5 * g * delta_x;
    const double L = pointer.width_l;
    return std::exp(-a * a / (2.0 * L * L)) * phase(pointer.momentum_p0 * a);
}

Complex overlap_kernel_sampled(const ComplexArray& pointer, const Grid1D& grid, double g,
                               double delta_x) {
    if (pointer.size() != grid.size()) fail(ErrorKind::InvalidArgument, "pointer size does not match grid");
    ComplexArray shifted = pointer;
    const auto K = grid.wavenumbers();
    const double a = 0.5 * g * delta_x;
    fft::forward(shifted);
    for (std::size_t j = 0; j < shifted.size(); ++j) shifted[j] *= phase(-K[j] * a);
    fft::inverse(shifted);
    Complex s{};
    for (std::size_t j = 0; j < pointer.size(); ++j) s += std::conj(shifted[j]) * pointer[j];
    return s * grid.spacing();
}

Distribution1D probability_distribution_analytic(const ComplexArray& particle, const Grid1D& grid,
                                                 const GaussianSpec& pointer,
                                                 const PhysicalParams& params,
                                                 const CouplingFunction& f, MarginalMethod method) {
    params.validate();
    if (particle.size() != grid.size()) fail(ErrorKind::InvalidArgument, "particle size does not match grid");
    const double g_eff = kernel_quantities(params, f, params.T).g_eff;
    if (method == MarginalMethod::Auto) {
        const bool kernel_ok =
            particle_kernel_bandwidth(particle, grid, params, params.T) * grid.spacing() < kPi;
        const bool overlap_ok = std::abs(g_eff) * grid.spacing() < pointer.width_l;
        method = kernel_ok && overlap_ok ? MarginalMethod::DoubleQuadrature : MarginalMethod::PointerMixture;
    }
    if (method == MarginalMethod::DoubleQuadrature) {
        return marginal_double_quadrature(particle, grid, pointer, params, g_eff);
    }
    return marginal_pointer_mixture(particle, grid, pointer, params, g_eff);
}

Distribution1D sharp_pointer_distribution(const ComplexArray& particle, const Grid1D& grid,
                                          const PhysicalParams& params, double g) {
    if (g == 0.0) fail(ErrorKind::ZeroCoupling, "sharp-pointer distribution has a 2/g prefactor");
    params.validate();
    const std::size_t n = grid.size();
    const auto x = grid.coordinates();
    const double dx = grid.spacing();
    Distribution1D out{grid, std::vector<double>(n)};
    parallel_for(n, [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t ip = 0; ip < n; ++ip) {
            s += std::norm(particle_propagator(params, x[ip], x[i], params.T)) * std::norm(particle[ip]);
        }
        out.density[i] = 2.0 / g * s * dx;
    });
    return out;
}

double packet_spread(const PhysicalParams& params, double l, double t) {
    if (!params.is_sho()) return l * std::sqrt(1.0 + 4.0 * t * t / (params.m * params.m * l * l * l * l));
    const double w = params.omega;
    const double c = std::cos(w * t);
    const double s = std::sin(w * t);
    return std::sqrt(l * l * c * c + 4.0 * s * s / (params.m * params.m * w * w * l * l));
}

double uncoupled_center(const PhysicalParams& params, const GaussianSpec& spec, double t) {
    if (!params.is_sho()) return spec.center + spec.momentum_p0 * t / params.m;
    const double w = params.omega;
    return spec.center * std::cos(w * t) + spec.momentum_p0 * std::sin(w * t) / (params.m * w);
}

double window_half_width_exact(const PhysicalParams& params, double l, double T) {
    return 0.5 * (l + packet_spread(params, l, T));
}

double window_half_width(double m, double l, double T) { return l + T * T / (m * m * l * l * l); }

double doubling_time(PointerMass m_eff, double L) {
    if (m_eff.is_infinite()) return std::numeric_limits<double>::infinity();
    return 0.5 * std::sqrt(3.0) * m_eff.value() * L * L;
}

Admissibility admissibility(const PhysicalParams& params, PointerMass m_eff, double l, double L) {
    Admissibility a;
    const double m = params.m;
    const double T = params.T;
    a.spread_ratio = 4.0 * T * T / (m * m * l * l * l * l);
    a.duration_bound = 0.5 * m * l * l;
    a.t_double = doubling_time(m_eff, L);
    a.mass_bound = m * l * l / (std::sqrt(3.0) * L * L);
    a.packet_narrow = a.spread_ratio <= kMuchLessRatio;
    a.duration_short = T <= kMuchLessRatio * a.duration_bound;
    a.pointer_holds = T < a.t_double;
    a.pointer_heavy = m_eff.is_infinite() || m_eff.value() > a.mass_bound;
    return a;
}

PointerStatistics pointer_statistics(const JointState& state, const PhysicalParams& params,
                                     const PointerContext& context) {
    PointerStatistics s;
    const auto marginal = pointer_marginal(state);
    s.mean = marginal.mean();
    s.width_l = fit_gaussian(marginal).width_l;
    const double t = state.time;
    const auto& spec = context.particle;
    const KernelQuantities q = t > 0.0 ? kernel_quantities(params, context.coupling, t) : KernelQuantities{};
    const double x1 = spec.center;
    const double x2 = uncoupled_center(params, spec, t);
    const double mid = 0.5 * (x1 + x2);
    s.shift_predicted = q.g_eff * mid;
    s.delta = params.is_sho() ? window_half_width_exact(params, spec.width_l, t)
                              : window_half_width(params.m, spec.width_l, t);
    const double a = q.g_eff * (mid - s.delta);
    const double b = q.g_eff * (mid + s.delta);
    s.window_low = std::min(a, b);
    s.window_high = std::max(a, b);
    s.flags = admissibility(params, q.m_eff, spec.width_l, context.pointer_L);
    return s;
}

double entanglement_proxy(const JointState& state) {
    const auto nx = static_cast<Eigen::Index>(state.nx());
    const auto nX = static_cast<Eigen::Index>(state.nX());
    const Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(
        state.amp.data(), nx, nX);
    const Eigen::MatrixXcd gram = A.adjoint() * A;
    const double trace = gram.trace().real();
    if (!(trace > 0.0)) fail(ErrorKind::InvalidArgument, "entanglement of a zero state");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
    return std::max(0.0, 1.0 - eig.eigenvalues().maxCoeff() / trace);
}

Window central_window(const PhysicalParams& params, double center, double epsilon) {
    const double half = 0.1 * packet_spread(params, epsilon, params.T);
    return Window{center - half, center + half};
}

}  // namespace vnmeter
