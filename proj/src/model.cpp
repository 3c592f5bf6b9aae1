#include "vnmeter/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace vnmeter {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

}  // namespace

PointerMass PointerMass::finite(double value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        fail(ErrorKind::InvalidArgument, "pointer mass must be positive and finite, got " + fmt(value));
    }
    PointerMass mass;
    mass.infinite_ = false;
    mass.value_ = value;
    return mass;
}

double PointerMass::value() const {
    if (infinite_) fail(ErrorKind::InvalidArgument, "infinite pointer mass has no finite value");
    return value_;
}

std::string to_string(SystemKind kind) { return kind == SystemKind::Free ? "free" : "sho"; }

std::vector<std::string> PhysicalParams::violations() const {
    std::vector<std::string> out;
    if (!(m > 0.0) || !std::isfinite(m)) out.push_back("m > 0 (got " + fmt(m) + ")");
    if (!(T > 0.0) || !std::isfinite(T)) out.push_back("T > 0 (got " + fmt(T) + ")");
    if (!std::isfinite(g)) out.push_back("g finite");
    if (!(omega >= 0.0) || !std::isfinite(omega)) out.push_back("omega >= 0 (got " + fmt(omega) + ")");
    if (system == SystemKind::Free && omega != 0.0) {
        out.push_back("system free requires omega = 0 (got " + fmt(omega) + ")");
    }
    if (system == SystemKind::SHO) {
        if (!(omega > 0.0)) out.push_back("system sho requires omega > 0");
        if (!M.is_infinite()) out.push_back("system sho requires M = infinite");
        if (omega > 0.0 && T > 0.0 && !(omega * T < kPi)) {
            out.push_back("omega*T >= pi (got " + fmt(omega * T) + ")");
        }
    }
    return out;
}

void PhysicalParams::validate() const {
    const auto v = violations();
    if (v.empty()) return;
    std::string msg = "invalid physical parameters:";
    for (const auto& s : v) msg += " [" + s + "]";
    fail(ErrorKind::DomainError, msg);
}

CouplingFunction CouplingFunction::constant() { return CouplingFunction{}; }

CouplingFunction CouplingFunction::table(std::vector<double> times, std::vector<double> values,
                                         bool symmetric) {
    if (times.size() < 2 || times.size() != values.size()) {
        fail(ErrorKind::InvalidArgument, "coupling table needs >= 2 samples with matching times/values");
    }
    if (times.front() != 0.0) fail(ErrorKind::InvalidArgument, "coupling table must start at t = 0");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            fail(ErrorKind::InvalidArgument, "coupling table times must be strictly ascending");
        }
    }
    for (double v : values) {
        if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "coupling table values must be finite");
    }
    CouplingFunction f;
    f.kind_ = Kind::Table;
    f.symmetric_ = symmetric;
    f.times_ = std::move(times);
    f.values_ = std::move(values);
    if (symmetric) {
        const double T = f.times_.back();
        const double scale = f.max_abs_profile();
        for (double t : f.times_) {
            if (std::abs(f.profile(t) - f.profile(T - t)) >= 1e-12 * std::max(scale, 1e-300)) {
                fail(ErrorKind::AsymmetricCoupling,
                     "table flagged symmetric but f(t) != f(T - t) at t = " + fmt(t));
            }
        }
    }
    return f;
}

double CouplingFunction::profile(double t) const {
    if (kind_ == Kind::Constant) return 1.0;
    if (t <= times_.front()) return values_.front();
    if (t >= times_.back()) return values_.back();
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - times_.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
    return values_[lo] + w * (values_[hi] - values_[lo]);
}

double CouplingFunction::max_abs_profile() const {
    if (kind_ == Kind::Constant) return 1.0;
    double best = 0.0;
    for (double v : values_) best = std::max(best, std::abs(v));
    return best;
}

double CouplingFunction::mean_profile(double T) const {
    if (kind_ == Kind::Constant) return 1.0;
    double sum = 0.0;
    for (std::size_t i = 1; i < times_.size(); ++i) {
        sum += 0.5 * (values_[i] + values_[i - 1]) * (times_[i] - times_[i - 1]);
    }
    return sum / T;
}

std::vector<double> CouplingFunction::breakpoints(double a, double b) const {
    std::vector<double> out;
    for (double t : times_) {
        if (t > a && t < b) out.push_back(t);
    }
    return out;
}

void CouplingFunction::validate_for(double T) const {
    if (kind_ == Kind::Constant) return;
    if (std::abs(times_.back() - T) > 1e-12 * std::max(1.0, T)) {
        fail(ErrorKind::InvalidArgument,
             "coupling table ends at " + fmt(times_.back()) + " but T = " + fmt(T));
    }
}

Grid1D::Grid1D(double min, double max, std::size_t n) : min_(min), max_(max), n_(n) {
    if (!(max > min) || !std::isfinite(min) || !std::isfinite(max)) {
        fail(ErrorKind::InvalidArgument, "grid requires max > min");
    }
    if (n < 16 || !std::has_single_bit(n)) {
        fail(ErrorKind::InvalidArgument, "grid size must be a power of two >= 16, got " + std::to_string(n));
    }
}

double Grid1D::wavenumber(std::size_t i) const noexcept {
    const auto n = static_cast<std::ptrdiff_t>(n_);
    auto idx = static_cast<std::ptrdiff_t>(i);
    if (idx >= n / 2) idx -= n;
    return static_cast<double>(idx) * k_spacing();
}

std::size_t Grid1D::nearest_index(double x) const noexcept {
    const double r = std::round((x - min_) / spacing());
    if (r <= 0.0) return 0;
    if (r >= static_cast<double>(n_ - 1)) return n_ - 1;
    return static_cast<std::size_t>(r);
}

std::vector<double> Grid1D::coordinates() const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = coordinate(i);
    return out;
}

std::vector<double> Grid1D::wavenumbers() const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = wavenumber(i);
    return out;
}

JointState::JointState(Grid1D gx, Grid1D gX)
    : grid_x(gx), grid_X(gX), amp(gx.size() * gX.size()) {}

JointState::JointState(Grid1D gx, Grid1D gX, ComplexArray values, double t)
    : grid_x(gx), grid_X(gX), amp(std::move(values)), time(t) {
    if (amp.size() != grid_x.size() * grid_X.size()) {
        fail(ErrorKind::InvalidArgument, "joint amplitude size does not match grids");
    }
}

double JointState::norm_squared() const {
    double s = 0.0;
    for (const auto& a : amp) s += std::norm(a);
    return s * grid_x.spacing() * grid_X.spacing();
}

namespace {

std::size_t band_width(std::size_t n, double fraction) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n))));
}

}  // namespace

double JointState::boundary_mass_x(double fraction) const {
    const std::size_t b = band_width(nx(), fraction);
    double s = 0.0;
    for (std::size_t i = 0; i < nx(); ++i) {
        if (i >= b && i + b < nx()) continue;
        for (std::size_t j = 0; j < nX(); ++j) s += std::norm(at(i, j));
    }
    return s * grid_x.spacing() * grid_X.spacing();
}

double JointState::boundary_mass_X(double fraction) const {
    const std::size_t b = band_width(nX(), fraction);
    double s = 0.0;
    for (std::size_t i = 0; i < nx(); ++i) {
        for (std::size_t j = 0; j < b; ++j) s += std::norm(at(i, j)) + std::norm(at(i, nX() - 1 - j));
    }
    return s * grid_x.spacing() * grid_X.spacing();
}

JointState make_product_state(const ComplexArray& particle, const Grid1D& grid_x,
                              const ComplexArray& pointer, const Grid1D& grid_X) {
    if (particle.size() != grid_x.size() || pointer.size() != grid_X.size()) {
        fail(ErrorKind::InvalidArgument, "factor sizes do not match grids");
    }
    JointState s(grid_x, grid_X);
    for (std::size_t i = 0; i < grid_x.size(); ++i) {
        for (std::size_t j = 0; j < grid_X.size(); ++j) s.at(i, j) = particle[i] * pointer[j];
    }
    return s;
}

double l2_distance(const JointState& a, const JointState& b) {
    if (!(a.grid_x == b.grid_x) || !(a.grid_X == b.grid_X)) {
        fail(ErrorKind::InvalidArgument, "l2_distance needs identical grids");
    }
    double s = 0.0;
    for (std::size_t k = 0; k < a.amp.size(); ++k) s += std::norm(a.amp[k] - b.amp[k]);
    return std::sqrt(s * a.grid_x.spacing() * a.grid_X.spacing());
}

Complex gaussian_amplitude(const GaussianSpec& spec, double x) noexcept {
    const double l = spec.width_l;
    const double d = x - spec.center;
    const double a = std::pow(2.0 / (kPi * l * l), 0.25) * std::exp(-d * d / (l * l));
    return std::polar(a, spec.momentum_p0 * d);
}

double Distribution1D::total() const {
    double s = 0.0;
    for (double d : density) s += d;
    return s * grid.spacing();
}

double Distribution1D::mean() const {
    double s = 0.0;
    double w = 0.0;
    for (std::size_t i = 0; i < density.size(); ++i) {
        s += grid.coordinate(i) * density[i];
        w += density[i];
    }
    return s / w;
}

double norm_squared(const ComplexArray& psi, const Grid1D& grid) {
    double s = 0.0;
    for (const auto& a : psi) s += std::norm(a);
    return s * grid.spacing();
}

void normalize(ComplexArray& psi, const Grid1D& grid) {
    const double n2 = norm_squared(psi, grid);
    if (!(n2 > 0.0)) fail(ErrorKind::InvalidArgument, "cannot normalize a zero state");
    const double scale = 1.0 / std::sqrt(n2);
    for (auto& a : psi) a *= scale;
}

double boundary_mass(const ComplexArray& psi, const Grid1D& grid, double fraction) {
    const std::size_t n = grid.size();
    const std::size_t b = band_width(n, fraction);
    double s = 0.0;
    for (std::size_t j = 0; j < b; ++j) s += std::norm(psi[j]) + std::norm(psi[n - 1 - j]);
    return s * grid.spacing();
}

ComplexArray make_gaussian_state(const GaussianSpec& spec, const Grid1D& grid,
                                 double boundary_tolerance) {
    if (!(spec.width_l > 2.0 * grid.spacing())) {
        fail(ErrorKind::GridTooCoarse, "packet width " + fmt(spec.width_l) + " <= 2 * spacing " +
                                           fmt(2.0 * grid.spacing()));
    }
    const double reach = 4.0 * spec.width_l;
    if (spec.center - reach < grid.min() || spec.center + reach > grid.max()) {
        fail(ErrorKind::GridTooNarrow, "grid does not span center +- 4 l");
    }
    ComplexArray psi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) psi[i] = gaussian_amplitude(spec, grid.coordinate(i));
    normalize(psi, grid);
    const double edge = boundary_mass(psi, grid);
    if (edge > boundary_tolerance) {
        fail(ErrorKind::GridTooNarrow, "packet tails put " + fmt(edge) + " in the boundary band");
    }
    return psi;
}

ComplexArray make_regularized_delta(double center, double epsilon, const Grid1D& grid,
                                    double boundary_tolerance) {
    if (!(epsilon >= 2.0 * grid.spacing())) {
        fail(ErrorKind::GridTooCoarse, "delta regularization " + fmt(epsilon) + " < 2 * spacing");
    }
    // l == 2 * spacing is allowed here, the Gaussian constructor requires strict inequality.
    GaussianSpec spec{center, epsilon, 0.0};
    ComplexArray psi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) psi[i] = gaussian_amplitude(spec, grid.coordinate(i));
    normalize(psi, grid);
    if (boundary_mass(psi, grid) > boundary_tolerance) {
        fail(ErrorKind::GridTooNarrow, "regularized delta leaks into the boundary band");
    }
    return psi;
}

double regularized_delta_weight(double epsilon) noexcept {
    return std::sqrt(2.0 * kPi) * epsilon;
}

}  // namespace vnmeter
