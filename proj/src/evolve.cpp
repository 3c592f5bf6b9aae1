#include "vnmeter/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "vnmeter/fft.hpp"
#include "vnmeter/kernels.hpp"
#include "vnmeter/parallel.hpp"

namespace vnmeter {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

Complex phase(double angle) { return {std::cos(angle), std::sin(angle)}; }

std::size_t band_width(std::size_t n, double fraction) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n))));
}

// Evolves every column of a row-major nx-by-ncols block under the uncoupled
// particle Hamiltonian for time t, exactly on the periodic grid.
void propagate_particle_columns(Complex* data, const Grid1D& gx, std::size_t ncols,
                                const PhysicalParams& params, double t) {
    if (t == 0.0) return;
    const std::size_t nx = gx.size();
    const fft::Batch along_x(nx, ncols, ncols, 1);
    const auto x = gx.coordinates();
    const auto k = gx.wavenumbers();
    const auto multiply_rows = [&](const std::vector<Complex>& row_phase) {
        parallel_for(nx, [&](std::size_t i) {
            Complex* row = data + i * ncols;
            for (std::size_t j = 0; j < ncols; ++j) row[j] *= row_phase[i];
        });
    };
    std::vector<Complex> ph(nx);
    if (!params.is_sho()) {
        for (std::size_t i = 0; i < nx; ++i) ph[i] = phase(-k[i] * k[i] * t / (2.0 * params.m));
        along_x.forward(data);
        multiply_rows(ph);
        along_x.inverse(data);
        return;
    }
    // exp(-iHt) = exp(-i a x^2) exp(-i b p^2) exp(-i a x^2) exactly, with
    // a = m w tan(w tau / 2) / 2 and b = sin(w tau) / (2 m w); substeps keep the chirps resolved.
    const double w = params.omega;
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(w * t / (kPi / 4.0))));
    const double tau = t / static_cast<double>(steps);
    const double a = 0.5 * params.m * w * std::tan(0.5 * w * tau);
    const double b = std::sin(w * tau) / (2.0 * params.m * w);
    std::vector<Complex> chirp(nx);
    std::vector<Complex> chirp2(nx);
    for (std::size_t i = 0; i < nx; ++i) {
        chirp[i] = phase(-a * x[i] * x[i]);
        chirp2[i] = chirp[i] * chirp[i];
        ph[i] = phase(-b * k[i] * k[i]);
    }
    multiply_rows(chirp);
    for (std::size_t s = 0; s < steps; ++s) {
        along_x.forward(data);
        multiply_rows(ph);
        along_x.inverse(data);
        multiply_rows(s + 1 == steps ? chirp : chirp2);
    }
}

double row_band_mass(const ComplexArray& amp, std::size_t nrows, std::size_t ncols, double fraction) {
    const std::size_t b = band_width(nrows, fraction);
    double s = 0.0;
    for (std::size_t i = 0; i < nrows; ++i) {
        if (i >= b && i + b < nrows) continue;
        for (std::size_t j = 0; j < ncols; ++j) s += std::norm(amp[i * ncols + j]);
    }
    return s;
}

// Joint amplitude held in the (x, K) representation: position for the
// particle, momentum for the pointer. Kicks are then diagonal.
class MixedEngine {
public:
    MixedEngine(const JointState& state, const PhysicalParams& params, PotentialSplitting splitting)
        : gx_(state.grid_x),
          gX_(state.grid_X),
          params_(params),
          splitting_(splitting),
          nx_(gx_.size()),
          nX_(gX_.size()),
          along_X_(nX_, nx_, 1, nX_),
          along_x_(nx_, nX_, nX_, 1),
          x_(gx_.coordinates()),
          k_(gx_.wavenumbers()),
          K_(gX_.wavenumbers()),
          buf_(state.amp) {
        along_X_.forward(buf_.data());
    }

    void kick(double strength) {
        if (strength == 0.0) return;
        parallel_for(nx_, [&](std::size_t i) {
            Complex* row = buf_.data() + i * nX_;
            const double sx = strength * x_[i];
            for (std::size_t j = 0; j < nX_; ++j) row[j] *= phase(-sx * K_[j]);
        });
    }

    void drift(double d) {
        if (d <= 0.0) return;
        if (!params_.M.is_infinite()) {
            std::vector<Complex> ph(nX_);
            const double inv = params_.M.inverse();
            for (std::size_t j = 0; j < nX_; ++j) ph[j] = phase(-0.5 * K_[j] * K_[j] * d * inv);
            parallel_for(nx_, [&](std::size_t i) {
                Complex* row = buf_.data() + i * nX_;
                for (std::size_t j = 0; j < nX_; ++j) row[j] *= ph[j];
            });
        }
        if (!params_.is_sho()) {
            kinetic(d);
        } else if (splitting_ == PotentialSplitting::Strang) {
            potential(0.5 * d);
            kinetic(d);
            potential(0.5 * d);
        } else {
            potential(d);
            kinetic(d);
        }
    }

    JointState state(double time) const {
        ComplexArray out = buf_;
        along_X_.inverse(out.data());
        return JointState(gx_, gX_, std::move(out), time);
    }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& a : buf_) s += std::norm(a);
        return s * gx_.spacing() * gX_.spacing() / static_cast<double>(nX_);
    }

    double boundary_x(double fraction) const {
        return row_band_mass(buf_, nx_, nX_, fraction) * gx_.spacing() * gX_.spacing() /
               static_cast<double>(nX_);
    }

    double boundary_X(double fraction) const { return state(0.0).boundary_mass_X(fraction); }

private:
    void kinetic(double d) {
        std::vector<Complex> ph(nx_);
        for (std::size_t i = 0; i < nx_; ++i) ph[i] = phase(-0.5 * k_[i] * k_[i] * d / params_.m);
        along_x_.forward(buf_.data());
        scale_rows(ph);
        along_x_.inverse(buf_.data());
    }

    void potential(double d) {
        std::vector<Complex> ph(nx_);
        const double c = 0.5 * params_.m * params_.omega * params_.omega * d;
        for (std::size_t i = 0; i < nx_; ++i) ph[i] = phase(-c * x_[i] * x_[i]);
        scale_rows(ph);
    }

    void scale_rows(const std::vector<Complex>& ph) {
        parallel_for(nx_, [&](std::size_t i) {
            Complex* row = buf_.data() + i * nX_;
            for (std::size_t j = 0; j < nX_; ++j) row[j] *= ph[i];
        });
    }

    Grid1D gx_;
    Grid1D gX_;
    PhysicalParams params_;
    PotentialSplitting splitting_;
    std::size_t nx_;
    std::size_t nX_;
    fft::Batch along_X_;
    fft::Batch along_x_;
    std::vector<double> x_;
    std::vector<double> k_;
    std::vector<double> K_;
    ComplexArray buf_;
};

// Smallest |k| beyond which the spectrum carries less than `tail` of its weight.
double spectral_reach(const ComplexArray& psi, const Grid1D& grid, double tail = 1e-12) {
    ComplexArray spec = psi;
    fft::forward(spec);
    const auto k = grid.wavenumbers();
    std::vector<std::size_t> order(k.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(k[a]) > std::abs(k[b]);
    });
    double total = 0.0;
    for (const auto& a : spec) total += std::norm(a);
    double acc = 0.0;
    for (std::size_t idx : order) {
        acc += std::norm(spec[idx]);
        if (acc > tail * total) return std::abs(k[idx]);
    }
    return 0.0;
}

}  // namespace

double KickSchedule::total_strength() const {
    return std::accumulate(strengths.begin(), strengths.end(), 0.0);
}

KickSchedule make_kick_schedule(const CouplingFunction& f, double g, double T, std::size_t N,
                                KickPlacement placement) {
    if (N == 0) fail(ErrorKind::InvalidArgument, "kick count N must be >= 1");
    if (!(T > 0.0)) fail(ErrorKind::DomainError, "T > 0 required");
    KickSchedule s;
    s.N = N;
    s.T = T;
    s.epsilon = T / static_cast<double>(N);
    s.placement = placement;
    const double offset = placement == KickPlacement::Midpoint ? 0.5 : 0.0;
    for (std::size_t n = 0; n < N; ++n) {
        const double t = (static_cast<double>(n) + offset) * T / static_cast<double>(N);
        s.times.push_back(t);
        s.strengths.push_back(f(t, g) / static_cast<double>(N));
    }
    return s;
}

JointState apply_kick(const JointState& state, double strength) {
    MixedEngine engine(state, PhysicalParams{}, PotentialSplitting::Strang);
    engine.kick(strength);
    return engine.state(state.time);
}

JointState apply_free_step(const JointState& state, double eps, const PhysicalParams& params,
                           PotentialSplitting splitting) {
    if (eps < 0.0) fail(ErrorKind::DomainError, "free step needs eps >= 0");
    if (eps == 0.0) return state;
    MixedEngine engine(state, params, splitting);
    engine.drift(eps);
    return engine.state(state.time + eps);
}

KickedRun evolve_kicked(const JointState& initial, const PhysicalParams& params,
                        const CouplingFunction& f, std::size_t N, const KickedOptions& options) {
    params.validate();
    if (!f.is_constant()) f.validate_for(params.T);
    const auto schedule = make_kick_schedule(f, params.g, params.T, N, options.placement);

    std::vector<std::size_t> order(options.snapshot_times.size());
    std::iota(order.begin(), order.end(), 0);
    for (double ts : options.snapshot_times) {
        if (!(ts >= 0.0 && ts <= params.T)) {
            fail(ErrorKind::DomainError, "snapshot time " + fmt(ts) + " outside [0, T]");
        }
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return options.snapshot_times[a] < options.snapshot_times[b];
    });

    MixedEngine engine(initial, params, options.splitting);
    const double norm0 = engine.norm_squared();
    const double t0 = initial.time;
    double now = 0.0;
    std::size_t step = 0;
    std::size_t next_snapshot = 0;
    std::vector<JointState> snapshots(order.size(), initial);
    double drift_max = 0.0;

    const auto check = [&] {
        const double n2 = engine.norm_squared();
        drift_max = std::max(drift_max, std::abs(n2 - norm0));
        const double bx = engine.boundary_x(kBoundaryFraction);
        if (bx > options.boundary_tolerance) {
            throw BoundaryLeakError(step, t0 + now, 'x', bx, options.boundary_tolerance);
        }
        const double bX = engine.boundary_X(kBoundaryFraction);
        if (bX > options.boundary_tolerance) {
            throw BoundaryLeakError(step, t0 + now, 'X', bX, options.boundary_tolerance);
        }
    };
    const auto advance_to = [&](double target) {
        while (next_snapshot < order.size() && options.snapshot_times[order[next_snapshot]] <= target) {
            const double ts = options.snapshot_times[order[next_snapshot]];
            engine.drift(ts - now);
            now = ts;
            snapshots[order[next_snapshot]] = engine.state(t0 + now);
            ++next_snapshot;
        }
        engine.drift(target - now);
        now = target;
    };

    for (std::size_t n = 0; n < schedule.N; ++n) {
        advance_to(schedule.times[n]);
        engine.kick(schedule.strengths[n]);
        ++step;
        check();
    }
    advance_to(params.T);
    check();

    KickedRun run{engine.state(t0 + params.T), std::move(snapshots), drift_max, schedule.N};
    return run;
}

double particle_kernel_bandwidth(const ComplexArray& particle, const Grid1D& grid,
                                 const PhysicalParams& params, double t) {
    const double reach_x = std::max(std::abs(grid.min()), std::abs(grid.max()));
    double slope = 0.0;
    if (params.is_sho()) {
        const double s = std::sin(params.omega * t);
        const double c = std::cos(params.omega * t);
        slope = params.m * params.omega / s * reach_x * (1.0 + std::abs(c));
    } else {
        slope = params.m * grid.length() / t;
    }
    return slope + spectral_reach(particle, grid);
}

bool kernel_quadrature_resolved(const ComplexArray& particle, const Grid1D& grid_x,
                                const ComplexArray& pointer, const Grid1D& grid_X,
                                const PhysicalParams& params, double g_eff, double t) {
    const double bandwidth = particle_kernel_bandwidth(particle, grid_x, params, t) +
                             0.5 * std::abs(g_eff) * spectral_reach(pointer, grid_X);
    return bandwidth * grid_x.spacing() < kPi;
}

JointState evolve_analytic(const ComplexArray& particle, const Grid1D& grid_x,
                           const GaussianSpec& pointer, const Grid1D& grid_X,
                           const PhysicalParams& params, const CouplingFunction& f, double t,
                           AnalyticScheme scheme, double boundary_tolerance) {
    params.validate();
    if (particle.size() != grid_x.size()) fail(ErrorKind::InvalidArgument, "particle size does not match grid");
    if (!(t > 0.0) || t > params.T * (1.0 + 1e-12)) {
        fail(ErrorKind::DomainError, "analytic evolution needs 0 < t <= T");
    }
    const auto q = kernel_quantities(params, f, t);
    const ComplexArray pointer0 = make_gaussian_state(pointer, grid_X, boundary_tolerance);
    const std::size_t nx = grid_x.size();
    const std::size_t nX = grid_X.size();
    const auto K = grid_X.wavenumbers();
    const double dx = grid_x.spacing();

    ComplexArray pointer_t = pointer0;
    fft::forward(pointer_t);
    if (!q.m_eff.is_infinite()) {
        const double inv = q.m_eff.inverse();
        for (std::size_t j = 0; j < nX; ++j) pointer_t[j] *= phase(-0.5 * K[j] * K[j] * t * inv);
    }

    if (scheme == AnalyticScheme::Auto) {
        scheme = kernel_quadrature_resolved(particle, grid_x, pointer0, grid_X, params, q.g_eff, t)
                     ? AnalyticScheme::KernelQuadrature
                     : AnalyticScheme::PointerMomentum;
    }

    JointState out(grid_x, grid_X);
    out.time = t;
    const auto x = grid_x.coordinates();
    if (scheme == AnalyticScheme::PointerMomentum) {
        ComplexArray& buf = out.amp;
        for (std::size_t i = 0; i < nx; ++i) {
            for (std::size_t j = 0; j < nX; ++j) {
                buf[i * nX + j] = particle[i] * phase(-0.5 * K[j] * q.g_eff * x[i]);
            }
        }
        propagate_particle_columns(buf.data(), grid_x, nX, params, t);
        parallel_for(nx, [&](std::size_t i) {
            for (std::size_t j = 0; j < nX; ++j) {
                buf[i * nX + j] *= pointer_t[j] * phase(-0.5 * K[j] * q.g_eff * x[i]);
            }
        });
        fft::Batch(nX, nx, 1, nX).inverse(buf.data());
    } else {
        // Pointer packet displaced by g_eff (x + x') / 2, indexed by i + i'.
        const std::size_t nshift = 2 * nx - 1;
        ComplexArray shifted(nshift * nX);
        for (std::size_t r = 0; r < nshift; ++r) {
            const double s = 0.5 * q.g_eff * (2.0 * grid_x.min() + static_cast<double>(r) * dx);
            for (std::size_t j = 0; j < nX; ++j) shifted[r * nX + j] = pointer_t[j] * phase(-K[j] * s);
        }
        fft::Batch(nX, nshift, 1, nX).inverse(shifted.data());
        parallel_for(nx, [&](std::size_t i) {
            std::vector<Complex> weights(nx);
            for (std::size_t ip = 0; ip < nx; ++ip) {
                weights[ip] = particle_propagator(params, x[ip], x[i], t) * particle[ip] * dx;
            }
            Complex* row = out.amp.data() + i * nX;
            for (std::size_t ip = 0; ip < nx; ++ip) {
                if (particle[ip] == Complex{}) continue;
                const Complex w = weights[ip];
                const Complex* line = shifted.data() + (i + ip) * nX;
                for (std::size_t j = 0; j < nX; ++j) row[j] += w * line[j];
            }
        });
    }

    const double bx = out.boundary_mass_x();
    if (bx > boundary_tolerance) throw BoundaryLeakError(0, t, 'x', bx, boundary_tolerance);
    const double bX = out.boundary_mass_X();
    if (bX > boundary_tolerance) throw BoundaryLeakError(0, t, 'X', bX, boundary_tolerance);
    return out;
}

ComplexArray evolve_particle_uncoupled(const ComplexArray& particle, const Grid1D& grid,
                                       const PhysicalParams& params, double t,
                                       double boundary_tolerance) {
    if (t < 0.0) fail(ErrorKind::DomainError, "uncoupled evolution needs t >= 0");
    if (particle.size() != grid.size()) fail(ErrorKind::InvalidArgument, "particle size does not match grid");
    ComplexArray out = particle;
    propagate_particle_columns(out.data(), grid, 1, params, t);
    const double edge = boundary_mass(out, grid);
    if (edge > boundary_tolerance) throw BoundaryLeakError(0, t, 'x', edge, boundary_tolerance);
    return out;
}

ComplexArray evolve_pointer_free(const ComplexArray& pointer, const Grid1D& grid, PointerMass M,
                                 double t) {
    ComplexArray out = pointer;
    if (M.is_infinite() || t == 0.0) return out;
    const auto K = grid.wavenumbers();
    fft::forward(out);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] *= phase(-0.5 * K[j] * K[j] * t * M.inverse());
    fft::inverse(out);
    return out;
}

}  // namespace vnmeter
