#pragma once

// Closed-form joint propagators for the finite-duration position measurement.
//
// Every joint kernel factorizes as
//     K(x'', X''; x', X'; t) = K_particle(x'', x'; t) * G(X'' - X' - s; M_eff, t),
// where K_particle is the uncoupled free or oscillator propagator and G is a
// free-particle kernel of mass M_eff displaced by the shift
//     s = g_eff * (x' + x'') / 2.
//
// Branch convention for all prefactors: sqrt(a / i) = sqrt(a) * exp(-i pi / 4), a > 0.

#include "vnmeter/model.hpp"

namespace vnmeter {

struct KernelQuantities {
    PointerMass m_eff = PointerMass::infinite();
    double g_eff = 0.0;
    double t = 0.0;
};

/// M / (1 + g^2 M / 12 m); 12 m / g^2 for the infinite pointer.
/// Throws ZeroCoupling for M infinite with g = 0, DegenerateKernel if 1 + g kappa / 6 <= 0.
PointerMass effective_mass_free(double m, PointerMass M, double g);

/// B = integral_0^T f(t) sin(omega t) dt with f = g * profile.
double coupling_integral_B(const CouplingFunction& f, double g, double omega, double T);

/// A = integral_0^T dt integral_0^t dt' f(t) f(t') sin(omega (T - t)) sin(omega t').
double coupling_integral_A(const CouplingFunction& f, double g, double omega, double T);

/// Oscillator pointer mass m omega T^3 sin(omega T) / 2A, for symmetric couplings.
double effective_mass_sho(double m, double omega, double T, const CouplingFunction& f, double g);
/// Constant-coupling closed form m omega^2 T^2 / (g^2 [tan(u)/u - 1]), u = omega T / 2.
double effective_mass_sho_constant(double m, double omega, double T, double g);

/// Oscillator coupling 2B / (T sin omega T).
double effective_coupling_sho(double g, double omega, double T, const CouplingFunction& f);
/// Constant-coupling closed form g tan(u) / u, u = omega T / 2.
double effective_coupling_sho_constant(double g, double omega, double T);

/// Free particle, infinite pointer mass, general symmetric coupling:
/// M_eff = m T^4 / (2 integral integral (T - t) t' f f), g_eff = (2 / T^2) integral t f.
KernelQuantities effective_quantities_free_general(const CouplingFunction& f, double g, double m,
                                                   double T);

/// Constant coupling, at time 0 < t <= T while the measurement is running.
KernelQuantities mid_measurement_quantities(const PhysicalParams& params, double t);

/// Dispatches to the formula matching the system and coupling kind. Table
/// couplings are supported at t = T only. For the free particle with a finite
/// pointer and a table coupling the pointer and coupling contributions add:
/// 1 / M_eff = 1 / M + 1 / M_eff(infinite pointer).
KernelQuantities kernel_quantities(const PhysicalParams& params, const CouplingFunction& f,
                                   double t);

double shift_function(const PhysicalParams& params, const CouplingFunction& f, double x_in,
                      double x_out, double t);

/// Classical path of the free particle coupled to a finite-mass pointer with
/// constant coupling, between (x', X') at t = 0 and (x'', X'') at t = T.
struct ClassicalSolution {
    double m;
    double M;
    double g;
    double T;
    double x_in;
    double X_in;
    double kappa;       // g M / 2m
    double pointer_gap; // X_0T: (X'' - X' - g (x'' + x') / 2) / (1 + g kappa / 6)
    double linear;      // x'' - x' + kappa X_0T
    double quadratic;   // kappa X_0T
    double action;

    double position(double t) const noexcept;
    double velocity(double t) const noexcept;
    double pointer_position(double t) const noexcept;
    double pointer_velocity(double t) const noexcept;
    /// M (dX/dt - g x / T); conserved along the solution.
    double canonical_pointer_momentum(double t) const noexcept;
};

ClassicalSolution classical_action_free(const PhysicalParams& params, double x_in, double X_in,
                                        double x_out, double X_out);

/// <x''| U_particle(t) |x'> for the free particle or the oscillator.
Complex particle_propagator(const PhysicalParams& params, double x_in, double x_out, double t);

/// Free kernel of mass m_eff from X' + shift to X'' over time t.
Complex pointer_kernel(PointerMass m_eff, double shift, double X_in, double X_out, double t);

Complex propagator_joint(const PhysicalParams& params, const CouplingFunction& f, double x_in,
                         double X_in, double x_out, double X_out, double t);

/// |<x(t)|x(0)>|^2: m / 2 pi t (free) or m omega / (2 pi sin omega t) (oscillator).
double transition_probability(const PhysicalParams& params, double t);

/// Delta-normalized eigenstate <x|x(t)> of the Heisenberg position operator x(t)
/// with the given eigenvalue.
Complex position_eigenstate(const PhysicalParams& params, double eigenvalue, double x, double t);

/// tan(u)/u - 1 without cancellation for small u.
double tan_ratio_minus_one(double u);

}  // namespace vnmeter
