#ifndef GLAB_EXPERIMENTS_HPP
#define GLAB_EXPERIMENTS_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "glab/rng.hpp"

namespace glab {

/// Configuration-driven experiment runner. Config files are JSON with a
/// strict, fail-closed schema: unknown experiment names and unknown parameter
/// keys are rejected before any computation.
struct ExperimentConfig {
    std::string experiment;
    nlohmann::json parameters = nlohmann::json::object();
    RngSeed seed;
    std::string output_dir = ".";
};

struct RunReport {
    nlohmann::json report;  // exactly the bytes of report.json (deterministic)
    bool pass = false;
    double wall_time_seconds = 0.0;  // informational; never serialized
    std::vector<std::string> artifacts;
};

/// All recognized experiment names.
const std::vector<std::string>& experiment_names();

/// Parses {"experiment", "parameters", "seed", "output_dir"}; throws
/// InvalidInputError on unknown keys, unknown names, or type mismatches.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);

/// Dispatches to the owning module, writes report.json plus one CSV per table
/// under output_dir. Identical configs produce byte-identical outputs.
RunReport run_experiment(const ExperimentConfig& config);

struct VerifyCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifySummary {
    bool quick = true;
    bool pass = false;
    std::vector<VerifyCheck> checks;
    nlohmann::json report;  // written to output_dir/report.json
};

/// Cross-module invariant battery (quick: reduced trial counts). Writes a
/// deterministic report.json (no timing data) and returns the summary.
/// The environment variable GLAB_FAULT_LP_PIVOT_TOL, when set to a positive
/// number, tampers with the LP pivot tolerance for the duration of the run
/// (fault-injection hook for testing the battery itself).
VerifySummary verify_suite(bool quick, RngSeed seed, const std::string& output_dir);

}  // namespace glab

#endif
