#pragma once

// Time evolution of the joint particle-pointer state.
//
// Two independent routes: the N-kick construction (instantaneous von Neumann
// kicks separated by uncoupled evolution, exact spectral steps on the grid),
// and analytic propagation built from the closed-form kernel quantities.

#include <cstddef>
#include <vector>

#include "vnmeter/model.hpp"

namespace vnmeter {

enum class KickPlacement {
    Leading,   // kick at t_n = n T / N, then drift eps: U0 U(t_{N-1}) ... U0 U(t_0)
    Midpoint,  // kick at t_n = (n + 1/2) T / N between half drifts; symmetric composition
};

enum class PotentialSplitting { Strang, FirstOrder };

struct KickSchedule {
    std::size_t N = 0;
    double T = 0.0;
    double epsilon = 0.0;
    KickPlacement placement = KickPlacement::Midpoint;
    std::vector<double> times;
    std::vector<double> strengths;  // f(t_n) / N

    double total_strength() const;
};

KickSchedule make_kick_schedule(const CouplingFunction& f, double g, double T, std::size_t N,
                                KickPlacement placement = KickPlacement::Midpoint);

/// psi(x, X) -> psi(x, X - strength * x), exact in the pointer-momentum representation.
JointState apply_kick(const JointState& state, double strength);

/// Uncoupled evolution over eps: kinetic phases in momentum space for both
/// coordinates (no pointer term for infinite M), oscillator potential split around them.
JointState apply_free_step(const JointState& state, double eps, const PhysicalParams& params,
                           PotentialSplitting splitting = PotentialSplitting::Strang);

struct KickedOptions {
    KickPlacement placement = KickPlacement::Midpoint;
    PotentialSplitting splitting = PotentialSplitting::Strang;
    double boundary_tolerance = kDefaultBoundaryTolerance;
    std::vector<double> snapshot_times;
};

struct KickedRun {
    JointState final_state;
    std::vector<JointState> snapshots;  // in the order of the requested times
    double max_norm_drift = 0.0;
    std::size_t kicks = 0;
};

/// Throws BoundaryLeakError naming the step when either axis puts more than the
/// tolerance into its boundary band.
KickedRun evolve_kicked(const JointState& initial, const PhysicalParams& params,
                        const CouplingFunction& f, std::size_t N, const KickedOptions& options = {});

enum class AnalyticScheme {
    Auto,
    KernelQuadrature,  // Riemann sum over x' of particle kernel times shifted pointer packet
    PointerMomentum,   // same integral evaluated spectrally, one particle evolution per pointer momentum
};

/// Largest wavenumber of x' -> K(x, x'; t) phi0(x') over the grid: kernel phase
/// slope plus the spectral reach of phi0.
double particle_kernel_bandwidth(const ComplexArray& particle, const Grid1D& grid,
                                 const PhysicalParams& params, double t);

/// True when the kernel-quadrature sum resolves the oscillation of its integrand.
bool kernel_quadrature_resolved(const ComplexArray& particle, const Grid1D& grid_x,
                                const ComplexArray& pointer, const Grid1D& grid_X,
                                const PhysicalParams& params, double g_eff, double t);

JointState evolve_analytic(const ComplexArray& particle, const Grid1D& grid_x,
                           const GaussianSpec& pointer, const Grid1D& grid_X,
                           const PhysicalParams& params, const CouplingFunction& f, double t,
                           AnalyticScheme scheme = AnalyticScheme::Auto,
                           double boundary_tolerance = kDefaultBoundaryTolerance);

/// Exact spectral evolution of the particle alone (free, or oscillator by the
/// exact chirp factorization of its propagator).
ComplexArray evolve_particle_uncoupled(const ComplexArray& particle, const Grid1D& grid,
                                       const PhysicalParams& params, double t,
                                       double boundary_tolerance = kDefaultBoundaryTolerance);

/// Free evolution of a pointer packet with mass M (identity for infinite M).
ComplexArray evolve_pointer_free(const ComplexArray& pointer, const Grid1D& grid, PointerMass M,
                                 double t);

}  // namespace vnmeter
