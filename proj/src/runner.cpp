#include "vnmeter/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "vnmeter/evolve.hpp"
#include "vnmeter/parallel.hpp"

namespace vnmeter {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double safe_width(const Distribution1D& d) {
    try {
        return fit_gaussian(d).width_l;
    } catch (const Error&) {
        return kNaN;
    }
}

bool at_end(const Scenario& s, double t) { return std::abs(t - s.params.T) <= 1e-12 * s.params.T; }

double predicted_shift(const Scenario& s, double t) {
    if (t <= 0.0) return 0.0;
    if (!s.coupling.is_constant() && !at_end(s, t)) return kNaN;
    const auto q = kernel_quantities(s.params, s.coupling, t);
    const double x2 = uncoupled_center(s.params, s.particle, t);
    return q.g_eff * 0.5 * (s.particle.center + x2);
}

TimeSample sample(const Scenario& s, const JointState& state) {
    const auto pm = particle_marginal(state);
    const auto Pm = pointer_marginal(state);
    return TimeSample{state.time,        state.norm_squared(), pm.mean(),
                      safe_width(pm),    Pm.mean(),            safe_width(Pm),
                      predicted_shift(s, state.time)};
}

std::vector<double> sample_times(const Scenario& s) {
    std::vector<double> times{0.0};
    for (double t : s.snapshot_times) {
        if (t > 0.0 && !at_end(s, t)) times.push_back(t);
    }
    times.push_back(s.params.T);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    return times;
}

json mass_json(const PointerMass& M) {
    if (M.is_infinite()) return "infinite";
    return M.value();
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_distribution(const Distribution1D& d, const std::filesystem::path& file) {
    std::ofstream out(file);
    out << "coordinate,density\n";
    for (std::size_t i = 0; i < d.density.size(); ++i) {
        out << num(d.grid.coordinate(i)) << ',' << num(d.density[i]) << '\n';
    }
    if (!out) fail(ErrorKind::InvalidArgument, "cannot write " + file.string());
}

json::json_pointer to_pointer(const std::string& path) {
    if (!path.empty() && path.front() == '/') return json::json_pointer(path);
    std::string p = "/";
    for (char c : path) p += c == '.' ? '/' : c;
    return json::json_pointer(p);
}

}  // namespace

int exit_code_for(const Error& e) noexcept {
    return e.kind() == ErrorKind::BoundaryLeak || e.kind() == ErrorKind::Caustic ? kExitEvolution
                                                                                 : kExitInvalid;
}

RunSummary run_scenario(const Scenario& s) {
    RunSummary r;
    const auto particle0 = s.particle_state();
    const auto initial = s.initial_state();
    const auto times = sample_times(s);

    std::optional<JointState> kicked_final;
    std::optional<JointState> analytic_final;
    if (s.method != EvolutionMethod::Analytic) {
        KickedOptions opt;
        opt.placement = s.placement;
        opt.splitting = s.splitting;
        opt.boundary_tolerance = s.boundary_tolerance;
        opt.snapshot_times.assign(times.begin(), times.end() - 1);
        auto run = evolve_kicked(initial, s.params, s.coupling, s.N, opt);
        for (const auto& snap : run.snapshots) r.timeseries.push_back(sample(s, snap));
        r.timeseries.push_back(sample(s, run.final_state));
        r.max_norm_drift = run.max_norm_drift;
        kicked_final = std::move(run.final_state);
    }
    if (s.method != EvolutionMethod::Kicked) {
        const bool table = !s.coupling.is_constant();
        for (double t : times) {
            if (s.method == EvolutionMethod::Both && !at_end(s, t)) continue;
            if (t == 0.0) {
                if (s.method == EvolutionMethod::Analytic) r.timeseries.push_back(sample(s, initial));
                continue;
            }
            if (table && !at_end(s, t)) continue;
            auto state = evolve_analytic(particle0, s.grid_x, s.pointer, s.grid_X, s.params, s.coupling,
                                         t, AnalyticScheme::Auto, s.boundary_tolerance);
            if (s.method == EvolutionMethod::Analytic) {
                r.timeseries.push_back(sample(s, state));
                r.max_norm_drift = std::max(r.max_norm_drift, std::abs(state.norm_squared() - 1.0));
            }
            if (at_end(s, t)) analytic_final = std::move(state);
        }
    }

    const JointState& final_state = kicked_final ? *kicked_final : *analytic_final;
    if (kicked_final && analytic_final) r.l2_distance = l2_distance(*kicked_final, *analytic_final);
    r.quantities = kernel_quantities(s.params, s.coupling, s.params.T);
    r.flags = admissibility(s.params, r.quantities.m_eff, s.particle.width_l, s.pointer.width_l);
    r.pointer = pointer_statistics(final_state, s.params, PointerContext{s.particle, s.pointer.width_l, s.coupling});
    r.particle_final = particle_marginal(final_state);
    r.pointer_final = pointer_marginal(final_state);
    r.entanglement = entanglement_proxy(final_state);

    const auto averaged = probability_distribution_analytic(particle0, s.grid_x, s.pointer, s.params, s.coupling);
    const auto uncoupled = evolve_particle_uncoupled(particle0, s.grid_x, s.params, s.params.T,
                                                     std::numeric_limits<double>::infinity());
    r.uncoupled_l1_distance = l1_distance(averaged, density_of(uncoupled, s.grid_x));
    return r;
}

json run_report(const Scenario& s, const RunSummary& r) {
    json j;
    j["scenario"] = to_json(s);
    j["kernel_quantities"] = {{"m_eff", mass_json(r.quantities.m_eff)},
                              {"g_eff", r.quantities.g_eff},
                              {"t", r.quantities.t}};
    j["admissibility"] = {{"packet_narrow", r.flags.packet_narrow},
                          {"duration_short", r.flags.duration_short},
                          {"pointer_holds", r.flags.pointer_holds},
                          {"pointer_heavy", r.flags.pointer_heavy},
                          {"spread_ratio", r.flags.spread_ratio},
                          {"duration_bound", r.flags.duration_bound},
                          {"t_double", nullable(r.flags.t_double)},
                          {"mass_bound", r.flags.mass_bound}};
    const auto& f = r.final_sample();
    j["final"] = {{"t", f.t},
                  {"norm", f.norm},
                  {"particle_mean", f.particle_mean},
                  {"particle_width_l", nullable(f.particle_width_l)},
                  {"pointer_mean", f.pointer_mean},
                  {"pointer_width_l", nullable(f.pointer_width_l)},
                  {"shift_predicted", nullable(f.shift_predicted)}};
    j["pointer_window"] = {{"low", r.pointer.window_low},
                           {"high", r.pointer.window_high},
                           {"delta", r.pointer.delta}};
    j["uncoupled_l1_distance"] = r.uncoupled_l1_distance;
    j["entanglement_proxy"] = r.entanglement;
    j["max_norm_drift"] = r.max_norm_drift;
    if (r.l2_distance) j["l2_distance"] = *r.l2_distance;
    return j;
}

RunSummary run_to_directory(const Scenario& s, const std::filesystem::path& out) {
    std::filesystem::create_directories(out);
    const auto r = run_scenario(s);
    {
        std::ofstream ts(out / "timeseries.csv");
        ts << "t,norm,particle_mean,particle_width_l,pointer_mean,pointer_width_l,shift_predicted\n";
        for (const auto& x : r.timeseries) {
            ts << num(x.t) << ',' << num(x.norm) << ',' << num(x.particle_mean) << ','
               << num(x.particle_width_l) << ',' << num(x.pointer_mean) << ',' << num(x.pointer_width_l)
               << ',' << num(x.shift_predicted) << '\n';
        }
        if (!ts) fail(ErrorKind::InvalidArgument, "cannot write timeseries.csv");
    }
    write_distribution(r.particle_final, out / "particle_marginal_final.csv");
    write_distribution(r.pointer_final, out / "pointer_marginal_final.csv");
    std::ofstream js(out / "run.json");
    js << run_report(s, r).dump(2) << '\n';
    if (!js) fail(ErrorKind::InvalidArgument, "cannot write run.json");
    return r;
}

std::vector<SweepRow> sweep(const json& base, const std::string& path, const std::vector<double>& values) {
    const json& doc = base.is_object() && base.contains("scenario") ? base.at("scenario") : base;
    json::json_pointer ptr;
    try {
        ptr = to_pointer(path);
    } catch (const json::exception&) {
        throw ScenarioError({"sweep parameter \"" + path + "\" is not a valid path"});
    }
    if (!doc.contains(ptr) || !doc.at(ptr).is_number()) {
        throw ScenarioError({"sweep parameter \"" + path + "\" does not address a numeric field"});
    }
    const bool integral = doc.at(ptr).is_number_integer();
    std::vector<SweepRow> rows(values.size());
    parallel_for(values.size(), [&](std::size_t k) {
        SweepRow& row = rows[k];
        row.value = values[k];
        json d = doc;
        if (integral) {
            if (values[k] != std::floor(values[k]) || values[k] < 0.0) {
                row.status = "InvalidArgument";
                return;
            }
            d[ptr] = static_cast<long long>(values[k]);
        } else {
            d[ptr] = values[k];
        }
        try {
            row.summary = run_scenario(parse_scenario(d));
            row.status = "ok";
        } catch (const Error& e) {
            row.status = std::string(to_string(e.kind()));
        }
    });
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& file) {
    std::ofstream out(file);
    out << "value,status,norm,particle_mean,particle_width_l,pointer_mean,pointer_width_l,"
           "shift_predicted,m_eff,g_eff,l2_distance,uncoupled_l1_distance,entanglement_proxy,"
           "packet_narrow,duration_short,pointer_holds,pointer_heavy\n";
    for (const auto& row : rows) {
        out << num(row.value) << ',' << row.status;
        if (!row.summary) {
            out << std::string(15, ',') << '\n';
            continue;
        }
        const auto& r = *row.summary;
        const auto& f = r.final_sample();
        const auto b = [](bool v) { return v ? "1" : "0"; };
        out << ',' << num(f.norm) << ',' << num(f.particle_mean) << ',' << num(f.particle_width_l) << ','
            << num(f.pointer_mean) << ',' << num(f.pointer_width_l) << ',' << num(f.shift_predicted) << ','
            << (r.quantities.m_eff.is_infinite() ? std::string("inf") : num(r.quantities.m_eff.value()))
            << ',' << num(r.quantities.g_eff) << ',' << (r.l2_distance ? num(*r.l2_distance) : std::string())
            << ',' << num(r.uncoupled_l1_distance) << ',' << num(r.entanglement) << ',' << b(r.flags.packet_narrow)
            << ',' << b(r.flags.duration_short) << ',' << b(r.flags.pointer_holds) << ','
            << b(r.flags.pointer_heavy) << '\n';
    }
    if (!out) fail(ErrorKind::InvalidArgument, "cannot write " + file.string());
}

}  // namespace vnmeter
