#pragma once

// Scenario files: JSON description of a measurement run.
//
//   {
//     "system": "free" | "sho", "m": 1, "M": 2 | "infinite", "g": 1, "omega": 0, "T": 1,
//     "coupling": "constant" | {"table": {"times": [...], "values": [...], "symmetric": true}},
//     "particle_state": {"gaussian": {"center": -1, "l": 0.5, "p0": 2}}
//                     | {"delta": {"center": 0, "epsilon": 0.25}},
//     "pointer_state": {"gaussian": {"center": 0, "L": 0.5}},
//     "grid": {"x_min": -20, "x_max": 20, "nx": 1024, "X_min": -12, "X_max": 12, "nX": 256},
//     "evolution": {"method": "kicked" | "analytic" | "both", "N": 256, "snapshot_times": [],
//                   "kick_placement": "midpoint" | "leading",
//                   "splitting": "strang" | "first_order", "boundary_tolerance": 1e-6}
//   }
//
// Unknown keys are rejected. A run.json written by the runner is accepted too;
// its "scenario" member is read.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "vnmeter/evolve.hpp"
#include "vnmeter/model.hpp"

namespace vnmeter {

enum class ParticleKind { Gaussian, Delta };
enum class EvolutionMethod { Kicked, Analytic, Both };

struct Scenario {
    PhysicalParams params;
    CouplingFunction coupling = CouplingFunction::constant();
    ParticleKind particle_kind = ParticleKind::Gaussian;
    GaussianSpec particle;  // for Delta: center and width_l = epsilon
    GaussianSpec pointer;
    Grid1D grid_x{-20.0, 20.0, 1024};
    Grid1D grid_X{-12.0, 12.0, 256};
    EvolutionMethod method = EvolutionMethod::Both;
    std::size_t N = 256;
    std::vector<double> snapshot_times;
    KickPlacement placement = KickPlacement::Midpoint;
    PotentialSplitting splitting = PotentialSplitting::Strang;
    double boundary_tolerance = kDefaultBoundaryTolerance;

    ComplexArray particle_state() const;
    ComplexArray pointer_state() const;
    JointState initial_state() const;
};

/// Thrown with every problem found in a scenario document.
class ScenarioError : public Error {
public:
    explicit ScenarioError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);
nlohmann::json to_json(const Scenario& s);

/// m=1, M=2, g=1, T=1; particle (-1, 0.5, 2); pointer (0, 0.5); x in [-20, 20] x 1024, X in [-12, 12] x 256.
Scenario standard_free_scenario();
/// As the standard scenario with l=2, T=0.5, so the packet moves from -1 to 0 without spreading much.
Scenario narrow_free_scenario();

}  // namespace vnmeter
