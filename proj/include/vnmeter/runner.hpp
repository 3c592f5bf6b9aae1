#pragma once

// Scenario runner behind the `run` and `sweep` subcommands.
//
// run writes into the output directory:
//   timeseries.csv             t, norm, particle_mean, particle_width_l, pointer_mean,
//                              pointer_width_l, shift_predicted
//   particle_marginal_final.csv, pointer_marginal_final.csv   coordinate, density
//   run.json                   echoed scenario, kernel quantities, admissibility flags,
//                              final statistics, l2_distance for method "both"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vnmeter/kernels.hpp"
#include "vnmeter/observe.hpp"
#include "vnmeter/scenario.hpp"

namespace vnmeter {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitEvolution = 3;

/// 3 for BoundaryLeak and Caustic, 2 for every other library error.
int exit_code_for(const Error& e) noexcept;

struct TimeSample {
    double t = 0.0;
    double norm = 0.0;
    double particle_mean = 0.0;
    double particle_width_l = 0.0;
    double pointer_mean = 0.0;
    double pointer_width_l = 0.0;
    double shift_predicted = 0.0;
};

struct RunSummary {
    std::vector<TimeSample> timeseries;
    KernelQuantities quantities;
    Admissibility flags;
    PointerStatistics pointer;
    std::optional<double> l2_distance;  // kicked vs analytic final states
    double uncoupled_l1_distance = 0.0; // pointer-averaged distribution vs uncoupled |phi(x, T)|^2
    double entanglement = 0.0;
    double max_norm_drift = 0.0;
    Distribution1D particle_final{Grid1D(0.0, 1.0, 16), {}};
    Distribution1D pointer_final{Grid1D(0.0, 1.0, 16), {}};

    const TimeSample& final_sample() const { return timeseries.back(); }
};

RunSummary run_scenario(const Scenario& scenario);

/// Runs and writes the output files; creates the directory if needed.
RunSummary run_to_directory(const Scenario& scenario, const std::filesystem::path& out);

nlohmann::json run_report(const Scenario& scenario, const RunSummary& summary);

struct SweepRow {
    double value = 0.0;
    std::string status;  // "ok" or the error kind
    std::optional<RunSummary> summary;
};

/// Sets the numeric field at `path` (dotted, or a JSON pointer) to each value in turn.
/// Throws ScenarioError when the path does not address a numeric field.
std::vector<SweepRow> sweep(const nlohmann::json& base, const std::string& path,
                            const std::vector<double>& values);

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& file);

}  // namespace vnmeter
