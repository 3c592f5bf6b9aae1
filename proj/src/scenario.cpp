#include "vnmeter/scenario.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

namespace vnmeter {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += "; ";
        out += s;
    }
    return out;
}

// Reads fields out of a JSON object, collecting problems instead of stopping at the first.
class Reader {
public:
    explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

    bool object(const json& j, const std::string& where) {
        if (j.is_object()) return true;
        problems_.push_back(where + ": expected an object");
        return false;
    }

    void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
        for (const auto& [key, _] : j.items()) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || key == a;
            if (!ok) problems_.push_back(where + ": unknown key \"" + key + "\"");
        }
    }

    std::optional<double> number(const json& j, const std::string& key, const std::string& where,
                                 bool required = true) {
        if (!j.contains(key)) {
            if (required) problems_.push_back(where + "." + key + ": missing");
            return std::nullopt;
        }
        const auto& v = j.at(key);
        if (!v.is_number()) {
            problems_.push_back(where + "." + key + ": expected a number");
            return std::nullopt;
        }
        const double d = v.get<double>();
        if (!std::isfinite(d)) {
            problems_.push_back(where + "." + key + ": must be finite");
            return std::nullopt;
        }
        return d;
    }

    std::optional<std::size_t> count(const json& j, const std::string& key, const std::string& where) {
        if (!j.contains(key)) {
            problems_.push_back(where + "." + key + ": missing");
            return std::nullopt;
        }
        const auto& v = j.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            problems_.push_back(where + "." + key + ": expected a non-negative integer");
            return std::nullopt;
        }
        return static_cast<std::size_t>(v.get<long long>());
    }

    std::optional<std::string> text(const json& j, const std::string& key, const std::string& where,
                                    bool required = true) {
        if (!j.contains(key)) {
            if (required) problems_.push_back(where + "." + key + ": missing");
            return std::nullopt;
        }
        if (!j.at(key).is_string()) {
            problems_.push_back(where + "." + key + ": expected a string");
            return std::nullopt;
        }
        return j.at(key).get<std::string>();
    }

    std::vector<double> numbers(const json& j, const std::string& key, const std::string& where) {
        std::vector<double> out;
        if (!j.contains(key)) return out;
        const auto& v = j.at(key);
        if (!v.is_array()) {
            problems_.push_back(where + "." + key + ": expected an array of numbers");
            return out;
        }
        for (const auto& e : v) {
            if (!e.is_number()) {
                problems_.push_back(where + "." + key + ": expected an array of numbers");
                return {};
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    void problem(std::string p) { problems_.push_back(std::move(p)); }

private:
    std::vector<std::string>& problems_;
};

std::optional<Grid1D> read_axis(Reader& r, const json& grid, const char* min_key, const char* max_key,
                                const char* n_key) {
    const auto lo = r.number(grid, min_key, "grid");
    const auto hi = r.number(grid, max_key, "grid");
    const auto n = r.count(grid, n_key, "grid");
    bool ok = lo && hi && n;
    if (lo && hi && !(*hi > *lo)) {
        r.problem(std::string("grid: ") + max_key + " must exceed " + min_key);
        ok = false;
    }
    if (n && (*n < 16 || !std::has_single_bit(*n))) {
        r.problem(std::string("grid.") + n_key + ": must be a power of two >= 16");
        ok = false;
    }
    if (!ok) return std::nullopt;
    return Grid1D(*lo, *hi, *n);
}

json mass_to_json(const PointerMass& M) {
    if (M.is_infinite()) return "infinite";
    return M.value();
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> problems)
    : Error(ErrorKind::InvalidArgument, "invalid scenario: " + join(problems)),
      problems_(std::move(problems)) {}

ComplexArray Scenario::particle_state() const {
    if (particle_kind == ParticleKind::Delta) {
        return make_regularized_delta(particle.center, particle.width_l, grid_x, boundary_tolerance);
    }
    return make_gaussian_state(particle, grid_x, boundary_tolerance);
}

ComplexArray Scenario::pointer_state() const {
    return make_gaussian_state(pointer, grid_X, boundary_tolerance);
}

JointState Scenario::initial_state() const {
    return make_product_state(particle_state(), grid_x, pointer_state(), grid_X);
}

Scenario parse_scenario(const json& input) {
    std::vector<std::string> problems;
    Reader r(problems);
    const json& doc = input.is_object() && input.contains("scenario") ? input.at("scenario") : input;
    if (!r.object(doc, "scenario")) throw ScenarioError(problems);
    r.only_keys(doc, "scenario", {"system", "m", "M", "g", "omega", "T", "coupling", "particle_state",
                                  "pointer_state", "grid", "evolution"});

    Scenario s;
    if (const auto sys = r.text(doc, "system", "scenario")) {
        if (*sys == "free") {
            s.params.system = SystemKind::Free;
        } else if (*sys == "sho") {
            s.params.system = SystemKind::SHO;
        } else {
            r.problem("scenario.system: expected \"free\" or \"sho\"");
        }
    }
    if (const auto m = r.number(doc, "m", "scenario")) s.params.m = *m;
    if (const auto g = r.number(doc, "g", "scenario")) s.params.g = *g;
    if (const auto T = r.number(doc, "T", "scenario")) s.params.T = *T;
    if (const auto w = r.number(doc, "omega", "scenario", false)) s.params.omega = *w;
    if (!doc.contains("M")) {
        r.problem("scenario.M: missing");
    } else if (doc.at("M").is_string()) {
        if (doc.at("M").get<std::string>() == "infinite") {
            s.params.M = PointerMass::infinite();
        } else {
            r.problem("scenario.M: expected a positive number or \"infinite\"");
        }
    } else if (doc.at("M").is_number() && doc.at("M").get<double>() > 0.0 &&
               std::isfinite(doc.at("M").get<double>())) {
        s.params.M = PointerMass::finite(doc.at("M").get<double>());
    } else {
        r.problem("scenario.M: expected a positive number or \"infinite\"");
    }
    for (auto& v : s.params.violations()) r.problem("scenario: " + v);

    if (doc.contains("coupling")) {
        const auto& c = doc.at("coupling");
        if (c.is_string() && c.get<std::string>() == "constant") {
            s.coupling = CouplingFunction::constant();
        } else if (c.is_object() && c.contains("table") && c.size() == 1) {
            const auto& t = c.at("table");
            if (r.object(t, "coupling.table")) {
                r.only_keys(t, "coupling.table", {"times", "values", "symmetric"});
                auto times = r.numbers(t, "times", "coupling.table");
                auto values = r.numbers(t, "values", "coupling.table");
                bool symmetric = false;
                if (t.contains("symmetric") && t.at("symmetric").is_boolean()) {
                    symmetric = t.at("symmetric").get<bool>();
                } else {
                    r.problem("coupling.table.symmetric: expected a boolean");
                }
                try {
                    s.coupling = CouplingFunction::table(std::move(times), std::move(values), symmetric);
                    s.coupling.validate_for(s.params.T);
                } catch (const Error& e) {
                    r.problem(std::string("coupling.table: ") + e.what());
                }
            }
        } else {
            r.problem("coupling: expected \"constant\" or {\"table\": {...}}");
        }
    }

    if (!doc.contains("particle_state")) {
        r.problem("particle_state: missing");
    } else if (const auto& p = doc.at("particle_state"); r.object(p, "particle_state")) {
        if (p.size() != 1 || !(p.contains("gaussian") || p.contains("delta"))) {
            r.problem("particle_state: expected exactly one of \"gaussian\" or \"delta\"");
        } else if (p.contains("gaussian")) {
            const auto& gs = p.at("gaussian");
            if (r.object(gs, "particle_state.gaussian")) {
                r.only_keys(gs, "particle_state.gaussian", {"center", "l", "p0"});
                s.particle_kind = ParticleKind::Gaussian;
                if (const auto v = r.number(gs, "center", "particle_state.gaussian")) s.particle.center = *v;
                if (const auto v = r.number(gs, "l", "particle_state.gaussian")) {
                    if (*v > 0.0) s.particle.width_l = *v;
                    else r.problem("particle_state.gaussian.l: must be > 0");
                }
                if (const auto v = r.number(gs, "p0", "particle_state.gaussian", false)) s.particle.momentum_p0 = *v;
            }
        } else {
            const auto& ds = p.at("delta");
            if (r.object(ds, "particle_state.delta")) {
                r.only_keys(ds, "particle_state.delta", {"center", "epsilon"});
                s.particle_kind = ParticleKind::Delta;
                s.particle.momentum_p0 = 0.0;
                if (const auto v = r.number(ds, "center", "particle_state.delta")) s.particle.center = *v;
                if (const auto v = r.number(ds, "epsilon", "particle_state.delta")) {
                    if (*v > 0.0) s.particle.width_l = *v;
                    else r.problem("particle_state.delta.epsilon: must be > 0");
                }
            }
        }
    }

    if (!doc.contains("pointer_state")) {
        r.problem("pointer_state: missing");
    } else if (const auto& p = doc.at("pointer_state"); r.object(p, "pointer_state")) {
        r.only_keys(p, "pointer_state", {"gaussian"});
        if (!p.contains("gaussian")) {
            r.problem("pointer_state.gaussian: missing");
        } else if (const auto& gs = p.at("gaussian"); r.object(gs, "pointer_state.gaussian")) {
            r.only_keys(gs, "pointer_state.gaussian", {"center", "L"});
            if (const auto v = r.number(gs, "center", "pointer_state.gaussian")) s.pointer.center = *v;
            if (const auto v = r.number(gs, "L", "pointer_state.gaussian")) {
                if (*v > 0.0) s.pointer.width_l = *v;
                else r.problem("pointer_state.gaussian.L: must be > 0");
            }
        }
    }

    bool grids_ok = false;
    if (!doc.contains("grid")) {
        r.problem("grid: missing");
    } else if (const auto& g = doc.at("grid"); r.object(g, "grid")) {
        r.only_keys(g, "grid", {"x_min", "x_max", "nx", "X_min", "X_max", "nX"});
        const auto gx = read_axis(r, g, "x_min", "x_max", "nx");
        const auto gX = read_axis(r, g, "X_min", "X_max", "nX");
        if (gx) s.grid_x = *gx;
        if (gX) s.grid_X = *gX;
        grids_ok = gx && gX;
    }

    if (!doc.contains("evolution")) {
        r.problem("evolution: missing");
    } else if (const auto& e = doc.at("evolution"); r.object(e, "evolution")) {
        r.only_keys(e, "evolution", {"method", "N", "snapshot_times", "kick_placement", "splitting",
                                     "boundary_tolerance"});
        if (const auto m = r.text(e, "method", "evolution")) {
            if (*m == "kicked") s.method = EvolutionMethod::Kicked;
            else if (*m == "analytic") s.method = EvolutionMethod::Analytic;
            else if (*m == "both") s.method = EvolutionMethod::Both;
            else r.problem("evolution.method: expected kicked, analytic or both");
        }
        if (e.contains("N") || s.method != EvolutionMethod::Analytic) {
            if (const auto n = r.count(e, "N", "evolution")) {
                if (*n < 1) r.problem("evolution.N: must be >= 1");
                else s.N = *n;
            }
        }
        s.snapshot_times = r.numbers(e, "snapshot_times", "evolution");
        for (double t : s.snapshot_times) {
            if (!(t >= 0.0 && t <= s.params.T)) {
                r.problem("evolution.snapshot_times: every time must lie in [0, T]");
                break;
            }
        }
        if (const auto k = r.text(e, "kick_placement", "evolution", false)) {
            if (*k == "midpoint") s.placement = KickPlacement::Midpoint;
            else if (*k == "leading") s.placement = KickPlacement::Leading;
            else r.problem("evolution.kick_placement: expected midpoint or leading");
        }
        if (const auto k = r.text(e, "splitting", "evolution", false)) {
            if (*k == "strang") s.splitting = PotentialSplitting::Strang;
            else if (*k == "first_order") s.splitting = PotentialSplitting::FirstOrder;
            else r.problem("evolution.splitting: expected strang or first_order");
        }
        if (const auto b = r.number(e, "boundary_tolerance", "evolution", false)) {
            if (*b > 0.0) s.boundary_tolerance = *b;
            else r.problem("evolution.boundary_tolerance: must be > 0");
        }
    }

    if (!problems.empty()) throw ScenarioError(problems);

    // Grid representability of the initial states.
    if (grids_ok) {
        try {
            (void)s.particle_state();
        } catch (const Error& e) {
            problems.push_back(std::string("particle_state: ") + e.what());
        }
        try {
            (void)s.pointer_state();
        } catch (const Error& e) {
            problems.push_back(std::string("pointer_state: ") + e.what());
        }
    }
    if (!problems.empty()) throw ScenarioError(problems);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError({"cannot read scenario file " + path});
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError({std::string("malformed JSON: ") + e.what()});
    }
    return parse_scenario(doc);
}

json to_json(const Scenario& s) {
    json doc;
    doc["system"] = to_string(s.params.system);
    doc["m"] = s.params.m;
    doc["M"] = mass_to_json(s.params.M);
    doc["g"] = s.params.g;
    doc["omega"] = s.params.omega;
    doc["T"] = s.params.T;
    if (s.coupling.is_constant()) {
        doc["coupling"] = "constant";
    } else {
        const auto t = s.coupling.times();
        const auto v = s.coupling.values();
        doc["coupling"] = {{"table",
                            {{"times", std::vector<double>(t.begin(), t.end())},
                             {"values", std::vector<double>(v.begin(), v.end())},
                             {"symmetric", s.coupling.symmetric()}}}};
    }
    if (s.particle_kind == ParticleKind::Delta) {
        doc["particle_state"] = {{"delta", {{"center", s.particle.center}, {"epsilon", s.particle.width_l}}}};
    } else {
        doc["particle_state"] = {{"gaussian",
                                  {{"center", s.particle.center},
                                   {"l", s.particle.width_l},
                                   {"p0", s.particle.momentum_p0}}}};
    }
    doc["pointer_state"] = {{"gaussian", {{"center", s.pointer.center}, {"L", s.pointer.width_l}}}};
    doc["grid"] = {{"x_min", s.grid_x.min()}, {"x_max", s.grid_x.max()}, {"nx", s.grid_x.size()},
                   {"X_min", s.grid_X.min()}, {"X_max", s.grid_X.max()}, {"nX", s.grid_X.size()}};
    const char* method = s.method == EvolutionMethod::Kicked     ? "kicked"
                         : s.method == EvolutionMethod::Analytic ? "analytic"
                                                                 : "both";
    doc["evolution"] = {{"method", method},
                        {"N", s.N},
                        {"snapshot_times", s.snapshot_times},
                        {"kick_placement", s.placement == KickPlacement::Midpoint ? "midpoint" : "leading"},
                        {"splitting", s.splitting == PotentialSplitting::Strang ? "strang" : "first_order"},
                        {"boundary_tolerance", s.boundary_tolerance}};
    return doc;
}

Scenario standard_free_scenario() {
    Scenario s;
    s.params.m = 1.0;
    s.params.M = PointerMass::finite(2.0);
    s.params.g = 1.0;
    s.params.T = 1.0;
    s.params.system = SystemKind::Free;
    s.particle = GaussianSpec{-1.0, 0.5, 2.0};
    s.pointer = GaussianSpec{0.0, 0.5, 0.0};
    s.grid_x = Grid1D(-20.0, 20.0, 1024);
    s.grid_X = Grid1D(-12.0, 12.0, 256);
    s.method = EvolutionMethod::Both;
    s.N = 256;
    return s;
}

Scenario narrow_free_scenario() {
    Scenario s = standard_free_scenario();
    s.params.T = 0.5;
    s.particle = GaussianSpec{-1.0, 2.0, 2.0};
    return s;
}

}  // namespace vnmeter
