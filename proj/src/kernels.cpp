#include "vnmeter/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vnmeter/quadrature.hpp"

namespace vnmeter {

namespace {

const Complex kMinusEighthTurn = std::polar(1.0, -kPi / 4.0);

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

void require_time(double t, const char* what) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        fail(ErrorKind::DomainError, std::string(what) + " requires t > 0, got " + fmt(t));
    }
}

void require_sho_domain(double omega, double t) {
    if (!(omega > 0.0)) fail(ErrorKind::DomainError, "omega > 0 required");
    if (!(omega * t < kPi)) fail(ErrorKind::DomainError, "omega*T >= pi (got " + fmt(omega * t) + ")");
}

void require_symmetric(const CouplingFunction& f) {
    if (!f.symmetric()) {
        fail(ErrorKind::AsymmetricCoupling, "coupling function is not flagged symmetric about T/2");
    }
}

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

// Scale used for absolute quadrature tolerances of sin-weighted integrals.
double sine_scale(double omega, double T) { return std::min(1.0, omega * T); }

// integral_0^T dt f(t) w_out(t) integral_0^t dt' f(t') w_in(t'), f = profile.
template <class Outer, class Inner>
double nested_profile_integral(const CouplingFunction& f, double T, Outer w_out, Inner w_in,
                               double inner_scale, double outer_scale, double rel_tol) {
    const auto outer = [&](double t) {
        if (t <= 0.0) return 0.0;
        const auto breaks = f.breakpoints(0.0, t);
        const auto inner = quad::integrate_piecewise(
            [&](double s) { return f.profile(s) * w_in(s); }, 0.0, t, breaks,
            1e-17 * inner_scale, 1e-14);
        return f.profile(t) * w_out(t) * inner.value;
    };
    const auto breaks = f.breakpoints(0.0, T);
    return quad::integrate_piecewise(outer, 0.0, T, breaks, 1e-16 * outer_scale, rel_tol).value;
}

}  // namespace

double tan_ratio_minus_one(double u) {
    if (std::abs(u) < 1e-2) {
        const double u2 = u * u;
        return u2 * (1.0 / 3.0 + u2 * (2.0 / 15.0 + u2 * (17.0 / 315.0 + u2 * (62.0 / 2835.0))));
    }
    return std::tan(u) / u - 1.0;
}

PointerMass effective_mass_free(double m, PointerMass M, double g) {
    if (!(m > 0.0)) fail(ErrorKind::DomainError, "m > 0 required");
    if (M.is_infinite()) {
        if (g == 0.0) fail(ErrorKind::ZeroCoupling, "infinite pointer mass with g = 0 has no effective mass");
        return PointerMass::finite(12.0 * m / (g * g));
    }
    const double kappa = g * M.value() / (2.0 * m);
    const double denom = 1.0 + g * kappa / 6.0;
    if (denom <= 1e-12) fail(ErrorKind::DegenerateKernel, "1 + g kappa / 6 <= 0");
    return PointerMass::finite(M.value() / denom);
}

double coupling_integral_B(const CouplingFunction& f, double g, double omega, double T) {
    if (!(omega > 0.0)) fail(ErrorKind::DomainError, "coupling_integral_B requires omega > 0");
    if (!(T >= 0.0)) fail(ErrorKind::DomainError, "coupling_integral_B requires T >= 0");
    if (T == 0.0) return 0.0;
    const double scale = T * f.max_abs_profile() * sine_scale(omega, T);
    const auto r = quad::integrate_piecewise(
        [&](double t) { return f.profile(t) * std::sin(omega * t); }, 0.0, T,
        f.breakpoints(0.0, T), 1e-14 * scale, 1e-15);
    return g * r.value;
}

double coupling_integral_A(const CouplingFunction& f, double g, double omega, double T) {
    if (!(omega > 0.0)) fail(ErrorKind::DomainError, "coupling_integral_A requires omega > 0");
    if (!(T >= 0.0)) fail(ErrorKind::DomainError, "coupling_integral_A requires T >= 0");
    if (T == 0.0) return 0.0;
    const double h = f.max_abs_profile();
    const double s = sine_scale(omega, T);
    const double value = nested_profile_integral(
        f, T, [&](double t) { return std::sin(omega * (T - t)); },
        [&](double t) { return std::sin(omega * t); }, h * T * s, h * h * T * T * s * s, 1e-12);
    return g * g * value;
}

double effective_mass_sho(double m, double omega, double T, const CouplingFunction& f, double g) {
    require_sho_domain(omega, T);
    require_symmetric(f);
    if (g == 0.0) fail(ErrorKind::ZeroCoupling, "g = 0 leaves the pointer mass infinite");
    const double A = coupling_integral_A(f, g, omega, T);
    if (!(A > 0.0)) fail(ErrorKind::DegenerateKernel, "coupling integral A <= 0");
    return m * omega * T * T * T * std::sin(omega * T) / (2.0 * A);
}

double effective_mass_sho_constant(double m, double omega, double T, double g) {
    require_sho_domain(omega, T);
    if (g == 0.0) fail(ErrorKind::ZeroCoupling, "g = 0 leaves the pointer mass infinite");
    return m * omega * omega * T * T / (g * g * tan_ratio_minus_one(0.5 * omega * T));
}

double effective_coupling_sho(double g, double omega, double T, const CouplingFunction& f) {
    require_sho_domain(omega, T);
    return 2.0 * coupling_integral_B(f, g, omega, T) / (T * std::sin(omega * T));
}

double effective_coupling_sho_constant(double g, double omega, double T) {
    require_sho_domain(omega, T);
    const double u = 0.5 * omega * T;
    return g * (1.0 + tan_ratio_minus_one(u));
}

KernelQuantities effective_quantities_free_general(const CouplingFunction& f, double g, double m,
                                                   double T) {
    require_symmetric(f);
    require_time(T, "effective_quantities_free_general");
    const double h = f.max_abs_profile();
    const auto first = quad::integrate_piecewise([&](double t) { return t * f.profile(t); }, 0.0, T,
                                                 f.breakpoints(0.0, T), 1e-16 * h * T * T, 1e-15);
    KernelQuantities q;
    q.t = T;
    q.g_eff = g * 2.0 * first.value / (T * T);
    if (g == 0.0) return q;
    const double D = nested_profile_integral(
        f, T, [&](double t) { return T - t; }, [](double t) { return t; }, h * T * T,
        h * h * T * T * T * T, 1e-13);
    if (!(D > 0.0)) fail(ErrorKind::DegenerateKernel, "coupling double integral <= 0");
    q.m_eff = PointerMass::finite(m * T * T * T * T / (2.0 * g * g * D));
    return q;
}

KernelQuantities mid_measurement_quantities(const PhysicalParams& params, double t) {
    params.validate();
    require_time(t, "mid_measurement_quantities");
    if (t > params.T && !same_time(t, params.T)) {
        fail(ErrorKind::DomainError, "t = " + fmt(t) + " is past the end of the measurement");
    }
    const double ramp = params.g * t / params.T;
    KernelQuantities q;
    q.t = t;
    if (params.system == SystemKind::Free) {
        q.g_eff = ramp;
        q.m_eff = (params.M.is_infinite() && ramp == 0.0) ? PointerMass::infinite()
                                                         : effective_mass_free(params.m, params.M, ramp);
        return q;
    }
    require_sho_domain(params.omega, t);
    const double u = 0.5 * params.omega * t;
    q.g_eff = ramp * (1.0 + tan_ratio_minus_one(u));
    if (params.g != 0.0) {
        q.m_eff = PointerMass::finite(params.m * params.omega * params.omega * params.T * params.T /
                                      (params.g * params.g * tan_ratio_minus_one(u)));
    }
    return q;
}

KernelQuantities kernel_quantities(const PhysicalParams& params, const CouplingFunction& f,
                                   double t) {
    if (f.is_constant()) return mid_measurement_quantities(params, t);
    params.validate();
    f.validate_for(params.T);
    if (!same_time(t, params.T)) {
        fail(ErrorKind::DomainError, "table couplings are supported at t = T only");
    }
    KernelQuantities q;
    q.t = params.T;
    if (params.system == SystemKind::Free) {
        const auto inf = effective_quantities_free_general(f, params.g, params.m, params.T);
        q.g_eff = inf.g_eff;
        const double inv = params.M.inverse() + inf.m_eff.inverse();
        q.m_eff = inv > 0.0 ? PointerMass::finite(1.0 / inv) : PointerMass::infinite();
        return q;
    }
    q.g_eff = effective_coupling_sho(params.g, params.omega, params.T, f);
    if (params.g != 0.0) {
        q.m_eff = PointerMass::finite(effective_mass_sho(params.m, params.omega, params.T, f, params.g));
    }
    return q;
}

double shift_function(const PhysicalParams& params, const CouplingFunction& f, double x_in,
                      double x_out, double t) {
    return kernel_quantities(params, f, t).g_eff * 0.5 * (x_in + x_out);
}

double ClassicalSolution::position(double t) const noexcept {
    const double s = t / T;
    return x_in + linear * s - quadratic * s * s;
}

double ClassicalSolution::velocity(double t) const noexcept {
    return (linear - 2.0 * quadratic * t / T) / T;
}

double ClassicalSolution::pointer_velocity(double t) const noexcept {
    return (g * position(t) + pointer_gap) / T;
}

double ClassicalSolution::pointer_position(double t) const noexcept {
    const double s = t / T;
    const double path_integral = T * (x_in * s + 0.5 * linear * s * s - quadratic * s * s * s / 3.0);
    return X_in + (g * path_integral + pointer_gap * t) / T;
}

double ClassicalSolution::canonical_pointer_momentum(double t) const noexcept {
    return M * (pointer_velocity(t) - g * position(t) / T);
}

ClassicalSolution classical_action_free(const PhysicalParams& params, double x_in, double X_in,
                                        double x_out, double X_out) {
    params.validate();
    if (params.system != SystemKind::Free) fail(ErrorKind::DomainError, "classical action is for the free particle");
    if (params.M.is_infinite()) fail(ErrorKind::DomainError, "classical action needs a finite pointer mass");
    const double m = params.m;
    const double M = params.M.value();
    const double g = params.g;
    const double T = params.T;
    const double kappa = g * M / (2.0 * m);
    const double denom = 1.0 + g * kappa / 6.0;
    if (denom <= 1e-12) fail(ErrorKind::DegenerateKernel, "1 + g kappa / 6 <= 0");
    const double gap = X_out - X_in - 0.5 * g * (x_out + x_in);
    const double X0T = gap / denom;
    const double m_eff = M / denom;
    const double dx = x_out - x_in;

    ClassicalSolution s{};
    s.m = m;
    s.M = M;
    s.g = g;
    s.T = T;
    s.x_in = x_in;
    s.X_in = X_in;
    s.kappa = kappa;
    s.pointer_gap = X0T;
    s.linear = dx + kappa * X0T;
    s.quadratic = kappa * X0T;
    s.action = (0.5 * m * dx * dx + 0.5 * m_eff * gap * gap) / T;
    return s;
}

Complex particle_propagator(const PhysicalParams& params, double x_in, double x_out, double t) {
    require_time(t, "particle_propagator");
    const double m = params.m;
    if (params.system == SystemKind::Free) {
        const double d = x_out - x_in;
        return std::sqrt(m / (2.0 * kPi * t)) * kMinusEighthTurn *
               std::polar(1.0, m * d * d / (2.0 * t));
    }
    require_sho_domain(params.omega, t);
    const double w = params.omega;
    const double s = std::sin(w * t);
    if (std::abs(s) < 1e-300) fail(ErrorKind::Caustic, "sin(omega t) = 0");
    const double c = std::cos(w * t);
    const double phase = m * w / (2.0 * s) * ((x_out * x_out + x_in * x_in) * c - 2.0 * x_out * x_in);
    return std::sqrt(m * w / (2.0 * kPi * s)) * kMinusEighthTurn * std::polar(1.0, phase);
}

Complex pointer_kernel(PointerMass m_eff, double shift, double X_in, double X_out, double t) {
    require_time(t, "pointer_kernel");
    if (m_eff.is_infinite()) {
        fail(ErrorKind::DomainError, "pointer kernel with infinite effective mass is a delta function");
    }
    const double M = m_eff.value();
    const double d = X_out - X_in - shift;
    return std::sqrt(M / (2.0 * kPi * t)) * kMinusEighthTurn * std::polar(1.0, M * d * d / (2.0 * t));
}

Complex propagator_joint(const PhysicalParams& params, const CouplingFunction& f, double x_in,
                         double X_in, double x_out, double X_out, double t) {
    const auto q = kernel_quantities(params, f, t);
    const double shift = q.g_eff * 0.5 * (x_in + x_out);
    return particle_propagator(params, x_in, x_out, t) * pointer_kernel(q.m_eff, shift, X_in, X_out, t);
}

double transition_probability(const PhysicalParams& params, double t) {
    require_time(t, "transition_probability");
    if (params.system == SystemKind::Free) return params.m / (2.0 * kPi * t);
    const double s = std::sin(params.omega * t);
    if (!(s > 0.0)) fail(ErrorKind::Caustic, "sin(omega t) <= 0");
    return params.m * params.omega / (2.0 * kPi * s);
}

Complex position_eigenstate(const PhysicalParams& params, double eigenvalue, double x, double t) {
    const double amplitude = std::sqrt(transition_probability(params, t));
    if (params.system == SystemKind::Free) {
        return std::polar(amplitude, params.m / t * (x * eigenvalue - 0.5 * x * x));
    }
    const double w = params.omega;
    const double s = std::sin(w * t);
    const double c = std::cos(w * t);
    return std::polar(amplitude, params.m * w / s * (x * eigenvalue - 0.5 * x * x * c));
}

}  // namespace vnmeter
