#pragma once

// Domain types shared by every module.
//
// Units: hbar = 1 throughout. Masses, times and lengths are in any consistent
// system with that convention; the coupling g is dimensionless.
//
// Gaussian packets follow A(x - c) = (2 / pi l^2)^{1/4} exp(-(x - c)^2 / l^2),
// so the position variance of a packet with width parameter l is l^2 / 4.

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "vnmeter/error.hpp"

namespace vnmeter {

using Complex = std::complex<double>;
using ComplexArray = std::vector<Complex>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kDefaultBoundaryTolerance = 1e-6;
inline constexpr double kBoundaryFraction = 0.05;

/// Pointer mass: a positive finite value or the distinguished infinite mass.
class PointerMass {
public:
    static PointerMass finite(double value);
    static PointerMass infinite() noexcept { return PointerMass{}; }

    bool is_infinite() const noexcept { return infinite_; }
    double value() const;
    /// 1/M, zero for the infinite mass.
    double inverse() const noexcept { return infinite_ ? 0.0 : 1.0 / value_; }

    bool operator==(const PointerMass&) const = default;

private:
    PointerMass() = default;

    bool infinite_ = true;
    double value_ = 0.0;
};

enum class SystemKind { Free, SHO };

std::string to_string(SystemKind kind);

struct PhysicalParams {
    double m = 1.0;
    PointerMass M = PointerMass::infinite();
    double g = 0.0;
    double T = 1.0;
    double omega = 0.0;
    SystemKind system = SystemKind::Free;

    /// Every violated invariant, in a stable order. Empty when valid.
    std::vector<std::string> violations() const;
    /// Throws DomainError listing all violations.
    void validate() const;

    bool is_sho() const noexcept { return system == SystemKind::SHO; }
};

/// Time profile h(t) of the coupling, f(t) = g h(t) on [0, T].
///
/// The constant kind is the unit profile. Tables are linearly interpolated
/// between samples; the first sample is at t = 0 and the last defines T.
class CouplingFunction {
public:
    enum class Kind { Constant, Table };

    static CouplingFunction constant();
    static CouplingFunction table(std::vector<double> times, std::vector<double> values,
                                  bool symmetric);

    Kind kind() const noexcept { return kind_; }
    bool is_constant() const noexcept { return kind_ == Kind::Constant; }
    bool symmetric() const noexcept { return symmetric_; }

    double profile(double t) const;
    double operator()(double t, double g) const { return g * profile(t); }
    double max_abs_profile() const;
    /// Time average of the profile over [0, T]; 1 for the constant kind.
    double mean_profile(double T) const;

    std::span<const double> times() const noexcept { return times_; }
    std::span<const double> values() const noexcept { return values_; }
    /// Sample times strictly inside (a, b), where the interpolant has kinks.
    std::vector<double> breakpoints(double a, double b) const;

    /// Checks that the table spans exactly [0, T].
    void validate_for(double T) const;

private:
    Kind kind_ = Kind::Constant;
    bool symmetric_ = true;
    std::vector<double> times_;
    std::vector<double> values_;
};

/// Uniform periodic grid: points min + i * spacing, i < n, spacing = (max - min) / n.
class Grid1D {
public:
    Grid1D(double min, double max, std::size_t n);

    double min() const noexcept { return min_; }
    double max() const noexcept { return max_; }
    std::size_t size() const noexcept { return n_; }
    double length() const noexcept { return max_ - min_; }
    double spacing() const noexcept { return (max_ - min_) / static_cast<double>(n_); }
    double k_spacing() const noexcept { return 2.0 * kPi / length(); }

    double coordinate(std::size_t i) const noexcept {
        return min_ + static_cast<double>(i) * spacing();
    }
    /// Angular wavenumber of FFT bin i (standard ordering, Nyquist bin negative).
    double wavenumber(std::size_t i) const noexcept;
    std::size_t nearest_index(double x) const noexcept;

    std::vector<double> coordinates() const;
    std::vector<double> wavenumbers() const;

    bool operator==(const Grid1D&) const = default;

private:
    double min_;
    double max_;
    std::size_t n_;
};

/// Joint particle-pointer amplitude on grid_x (rows) times grid_X (columns).
struct JointState {
    Grid1D grid_x;
    Grid1D grid_X;
    ComplexArray amp;  // row-major, amp[i * nX + j] = psi(x_i, X_j)
    double time = 0.0;

    JointState(Grid1D gx, Grid1D gX);
    JointState(Grid1D gx, Grid1D gX, ComplexArray values, double t);

    std::size_t nx() const noexcept { return grid_x.size(); }
    std::size_t nX() const noexcept { return grid_X.size(); }
    Complex& at(std::size_t i, std::size_t j) { return amp[i * nX() + j]; }
    const Complex& at(std::size_t i, std::size_t j) const { return amp[i * nX() + j]; }

    double norm_squared() const;
    /// Probability in the outer `fraction` of each end of the particle axis.
    double boundary_mass_x(double fraction = kBoundaryFraction) const;
    double boundary_mass_X(double fraction = kBoundaryFraction) const;
};

JointState make_product_state(const ComplexArray& particle, const Grid1D& grid_x,
                              const ComplexArray& pointer, const Grid1D& grid_X);

/// sqrt(sum |a - b|^2 dx dX); grids must match.
double l2_distance(const JointState& a, const JointState& b);

struct GaussianSpec {
    double center = 0.0;
    double width_l = 1.0;
    double momentum_p0 = 0.0;
};

/// Closed-form packet value at x (normalized on the real line).
Complex gaussian_amplitude(const GaussianSpec& spec, double x) noexcept;

struct Distribution1D {
    Grid1D grid;
    std::vector<double> density;

    double total() const;
    double mean() const;
};

/// Sampled, renormalized Gaussian packet.
/// Throws GridTooCoarse when l <= 2 * spacing, GridTooNarrow when the grid does
/// not cover center +- 4 l or the boundary band holds more than `boundary_tolerance`.
ComplexArray make_gaussian_state(const GaussianSpec& spec, const Grid1D& grid,
                                 double boundary_tolerance = kDefaultBoundaryTolerance);

/// delta(x - center) regularized as a Gaussian packet of width parameter epsilon.
ComplexArray make_regularized_delta(double center, double epsilon, const Grid1D& grid,
                                    double boundary_tolerance = kDefaultBoundaryTolerance);

/// (integral of the normalized width-epsilon packet)^2 = sqrt(2 pi) epsilon.
/// Dividing a density that started from make_regularized_delta by this weight
/// converts it to the delta-function normalization.
double regularized_delta_weight(double epsilon) noexcept;

double norm_squared(const ComplexArray& psi, const Grid1D& grid);
void normalize(ComplexArray& psi, const Grid1D& grid);
double boundary_mass(const ComplexArray& psi, const Grid1D& grid,
                     double fraction = kBoundaryFraction);

}  // namespace vnmeter
