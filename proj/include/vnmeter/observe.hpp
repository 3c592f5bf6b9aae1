#pragma once

// Read-only analyses of joint states and measurement distributions.

#include "vnmeter/kernels.hpp"
#include "vnmeter/model.hpp"

namespace vnmeter {

/// integral dX |psi(x, X)|^2.
Distribution1D particle_marginal(const JointState& state);
/// integral dx |psi(x, X)|^2.
Distribution1D pointer_marginal(const JointState& state);
/// |psi(x_i, X)|^2 on the pointer grid at the particle grid point nearest to x.
Distribution1D pointer_conditional(const JointState& state, double x);
Distribution1D density_of(const ComplexArray& psi, const Grid1D& grid);

struct GaussianFit {
    double mean = 0.0;
    double width_l = 0.0;  // density ~ exp(-2 (x - mean)^2 / l^2)
};

/// Least-squares parabola through log(density) over the central region holding
/// `mass_fraction` of the probability.
GaussianFit fit_gaussian(const Distribution1D& d, double mass_fraction = 0.9);

double l1_distance(const Distribution1D& a, const Distribution1D& b);

/// integral dY Phi0*(Y - g delta / 2) Phi0(Y) for a Gaussian pointer packet:
/// exp(-g^2 delta^2 / 8 L^2) exp(i p0 g delta / 2).
Complex overlap_kernel(const GaussianSpec& pointer, double g, double delta_x);
/// The same overlap by Riemann sum of a sampled pointer state (band-limited shift).
Complex overlap_kernel_sampled(const ComplexArray& pointer, const Grid1D& grid, double g,
                               double delta_x);

enum class MarginalMethod {
    Auto,
    DoubleQuadrature,  // sum over (x', x'') with the overlap kernel
    PointerMixture,    // average of |U (phi0 exp(-i P g x' / 2))|^2 over the pointer momentum density
};

/// Final particle distribution after the measurement, integrated over the pointer.
/// Depends on the pointer only through its initial state, not through M.
Distribution1D probability_distribution_analytic(const ComplexArray& particle, const Grid1D& grid,
                                                 const GaussianSpec& pointer,
                                                 const PhysicalParams& params,
                                                 const CouplingFunction& f,
                                                 MarginalMethod method = MarginalMethod::Auto);

/// (2/g) integral |<x|U_particle(T)|x'>|^2 |phi0(x')|^2 dx', evaluated literally.
Distribution1D sharp_pointer_distribution(const ComplexArray& particle, const Grid1D& grid,
                                          const PhysicalParams& params, double g);

/// Width parameter of an initially l-wide Gaussian after time t, free or oscillator.
double packet_spread(const PhysicalParams& params, double l, double t);
/// Center of an uncoupled packet after time t.
double uncoupled_center(const PhysicalParams& params, const GaussianSpec& spec, double t);
/// (delta(0) + delta(T)) / 2.
double window_half_width_exact(const PhysicalParams& params, double l, double T);
/// l + T^2 / (m^2 l^3).
double window_half_width(double m, double l, double T);
/// (sqrt(3) / 2) M_eff L^2; infinite for an infinite effective mass.
double doubling_time(PointerMass m_eff, double L);

/// "a << b" is read as a <= 0.1 b.
inline constexpr double kMuchLessRatio = 0.1;

struct Admissibility {
    bool packet_narrow = false;      // 4 T^2 / m^2 l^4 << 1
    bool duration_short = false;     // T << m l^2 / 2
    bool pointer_holds = false;      // T < T_double
    bool pointer_heavy = false;      // M_eff > m l^2 / (sqrt(3) L^2)
    double spread_ratio = 0.0;       // 4 T^2 / m^2 l^4
    double duration_bound = 0.0;     // m l^2 / 2
    double t_double = 0.0;
    double mass_bound = 0.0;
};

Admissibility admissibility(const PhysicalParams& params, PointerMass m_eff, double l, double L);

struct PointerContext {
    GaussianSpec particle;
    double pointer_L = 1.0;
    CouplingFunction coupling = CouplingFunction::constant();
};

struct PointerStatistics {
    double mean = 0.0;
    double width_l = 0.0;
    double shift_predicted = 0.0;  // g_eff (x1 + x2) / 2
    double window_low = 0.0;       // pointer units: g_eff ((x1 + x2)/2 -+ Delta)
    double window_high = 0.0;
    double delta = 0.0;            // particle units
    Admissibility flags;
};

PointerStatistics pointer_statistics(const JointState& state, const PhysicalParams& params,
                                     const PointerContext& context);

/// 1 - (largest Schmidt coefficient)^2 of the normalized joint amplitude.
double entanglement_proxy(const JointState& state);

struct Window {
    double low;
    double high;
};

/// Interval around `center` where a regularized delta of width epsilon, spread
/// for time T, stays within a few percent of flat: half-width 0.1 delta(T).
Window central_window(const PhysicalParams& params, double center, double epsilon);

}  // namespace vnmeter
