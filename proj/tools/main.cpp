// vnmeter command line: run, kernel, sweep, verify.

#include <cstdio>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <limits>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "checks.hpp"
#include "vnmeter/kernels.hpp"
#include "vnmeter/runner.hpp"
#include "vnmeter/scenario.hpp"

namespace {

using namespace vnmeter;

struct KernelFlags {
    std::string quantity;
    std::string system = "free";
    double m = 1.0;
    std::string M = "infinite";
    double g = 1.0;
    double omega = 0.0;
    double T = 1.0;
    std::optional<double> t;
    double x_in = 0.0;
    double x_out = 0.0;
    double X_in = 0.0;
    double X_out = 0.0;
};

PhysicalParams params_from(const KernelFlags& k) {
    PhysicalParams p;
    if (k.system == "free") {
        p.system = SystemKind::Free;
    } else if (k.system == "sho") {
        p.system = SystemKind::SHO;
    } else {
        throw Error(ErrorKind::InvalidArgument, "unknown system \"" + k.system + "\" (free, sho)");
    }
    p.m = k.m;
    if (k.M == "infinite" || k.M == "inf") {
        p.M = PointerMass::infinite();
    } else {
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(k.M, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != k.M.size()) throw Error(ErrorKind::InvalidArgument, "--M must be a number or \"infinite\"");
        p.M = PointerMass::finite(value);
    }
    p.g = k.g;
    p.omega = k.omega;
    p.T = k.T;
    p.validate();
    return p;
}

std::vector<double> kernel_values(const KernelFlags& k) {
    const PhysicalParams p = params_from(k);
    const auto f = CouplingFunction::constant();
    const double t = k.t.value_or(p.T);
    const auto& q = k.quantity;
    if (q == "m_eff") {
        const auto m_eff = kernel_quantities(p, f, t).m_eff;
        return {m_eff.is_infinite() ? std::numeric_limits<double>::infinity() : m_eff.value()};
    }
    if (q == "g_eff") return {kernel_quantities(p, f, t).g_eff};
    if (q == "shift") return {shift_function(p, f, k.x_in, k.x_out, t)};
    if (q == "action") return {classical_action_free(p, k.x_in, k.X_in, k.x_out, k.X_out).action};
    if (q == "transition_prob") return {transition_probability(p, t)};
    if (q == "A" || q == "B") {
        if (!p.is_sho()) throw Error(ErrorKind::DomainError, q + " is defined for --system sho");
        return {q == "A" ? coupling_integral_A(f, p.g, p.omega, t) : coupling_integral_B(f, p.g, p.omega, t)};
    }
    throw Error(ErrorKind::InvalidArgument,
                "unknown quantity \"" + q + "\" (m_eff, g_eff, shift, action, transition_prob, A, B)");
}

std::vector<double> parse_values(const std::string& list) {
    std::vector<double> out;
    std::stringstream in(list);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
        if (used != item.size() || item.empty()) {
            throw Error(ErrorKind::InvalidArgument, "--values: \"" + item + "\" is not a number");
        }
        out.push_back(v);
    }
    if (out.empty()) throw Error(ErrorKind::InvalidArgument, "--values is empty");
    return out;
}

int report(const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vnmeter: time-extended von Neumann measurement simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir;
    auto* run = app.add_subcommand("run", "evolve a scenario and write distributions and statistics");
    run->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--out", out_dir, "output directory")->required();

    KernelFlags k;
    auto* kernel = app.add_subcommand("kernel", "print a kernel quantity");
    kernel->add_option("quantity,--quantity", k.quantity, "m_eff, g_eff, shift, action, transition_prob, A, B")
        ->required();
    kernel->add_option("--system", k.system, "free or sho");
    kernel->add_option("--m", k.m, "particle mass");
    kernel->add_option("--M", k.M, "pointer mass or \"infinite\"");
    kernel->add_option("--g", k.g, "coupling strength");
    kernel->add_option("--omega", k.omega, "oscillator frequency");
    kernel->add_option("--T", k.T, "measurement duration");
    kernel->add_option("--t", k.t, "evaluation time (defaults to T)");
    kernel->add_option("--x-in", k.x_in, "initial particle position");
    kernel->add_option("--x-out", k.x_out, "final particle position");
    kernel->add_option("--X-in", k.X_in, "initial pointer position");
    kernel->add_option("--X-out", k.X_out, "final pointer position");

    std::string sweep_scenario;
    std::string sweep_out;
    std::string sweep_param;
    std::string sweep_values;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a scenario once per parameter value");
    sweep_cmd->add_option("--scenario", sweep_scenario, "scenario JSON file")->required();
    sweep_cmd->add_option("--param", sweep_param, "dotted path or JSON pointer of a numeric field")->required();
    sweep_cmd->add_option("--values", sweep_values, "comma separated values")->required();
    sweep_cmd->add_option("--out", sweep_out, "output directory for sweep.csv")->required();

    std::string suite = "all";
    std::string report_path;
    auto* verify = app.add_subcommand("verify", "run acceptance checks and print a JSON report");
    verify->add_option("--suite", suite, "kernels, oracle, distributions, limits, all");
    verify->add_option("--out", report_path, "also write the report to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalid;
    }

    try {
        if (*run) {
            const auto scenario = load_scenario(scenario_path);
            const auto summary = run_to_directory(scenario, out_dir);
            const auto& last = summary.final_sample();
            std::printf("t=%.6g norm=%.12f pointer_mean=%.6g shift_predicted=%.6g\n", last.t, last.norm,
                        last.pointer_mean, last.shift_predicted);
            if (summary.l2_distance) std::printf("l2_distance=%.6e\n", *summary.l2_distance);
            return kExitOk;
        }
        if (*kernel) {
            for (double v : kernel_values(k)) std::printf("%.14e\n", v);
            return kExitOk;
        }
        if (*sweep_cmd) {
            const auto values = parse_values(sweep_values);
            std::ifstream in(sweep_scenario);
            if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read " + sweep_scenario);
            nlohmann::json base;
            try {
                base = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw Error(ErrorKind::InvalidArgument, sweep_scenario + ": " + e.what());
            }
            const auto rows = vnmeter::sweep(base, sweep_param, values);
            std::filesystem::create_directories(sweep_out);
            write_sweep_csv(rows, std::filesystem::path(sweep_out) / "sweep.csv");
            for (const auto& row : rows) std::printf("%.17g %s\n", row.value, row.status.c_str());
            return kExitOk;
        }
        if (*verify) {
            const auto results = checks::run_suite(suite);
            for (const auto& r : results) std::fprintf(stderr, "%s\n", checks::format_line(r).c_str());
            const auto doc = checks::to_json(results);
            std::cout << doc.dump(2) << '\n';
            if (!report_path.empty()) {
                std::ofstream out(report_path);
                out << doc.dump(2) << '\n';
            }
            return doc["pass"].get<bool>() ? kExitOk : kExitFailure;
        }
    } catch (const Error& e) {
        return report(e);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
    return kExitOk;
}
