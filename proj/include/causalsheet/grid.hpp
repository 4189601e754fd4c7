#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "causalsheet/learn.hpp"
#include "causalsheet/metrics.hpp"
#include "causalsheet/synth.hpp"
#include "json.hpp"

namespace causalsheet {

inline constexpr int kResultsSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr double kDefaultTimeBudgetSeconds = 3600.0;

struct GridSpec {
    std::vector<int> samples;
    std::vector<int> variables;
    std::vector<double> alphas;
    std::vector<int> complexities;
    std::vector<StructureType> structure_types;
    std::vector<int> avg_levels;
    int replicates = 1;
    std::vector<LearnerConfig> algorithms;
    std::uint64_t global_seed = 0;
    PcorConfig pcor;  // seed field is ignored; per-experiment seeds are derived

    nlohmann::json to_json() const;
    static GridSpec from_json(const nlohmann::json& j);
    void validate() const;  // throws std::invalid_argument

    // The full benchmark grid: 6 sample sizes x 5 variable counts x 4 alphas
    // x 3 complexities x 3 structure types x 3 level settings x 10 replicates.
    static GridSpec benchmark_defaults();
    static std::vector<LearnerConfig> default_algorithms();
};

struct GridEntry {
    SynthesisConfig config;  // seed filled in from (global_seed, axes, replicate)
    int replicate = 0;
};

std::vector<GridEntry> enumerate_grid(const GridSpec& spec);

// 64-bit hash of (global_seed, config axes, replicate); the experiment's RNG
// stream, reproducible in isolation.
std::uint64_t experiment_seed(std::uint64_t global_seed, const SynthesisConfig& config,
                              int replicate);

enum class RunStatus { Ok, Timeout, Failed };

std::string to_string(RunStatus s);
RunStatus run_status_from_string(const std::string& s);

struct ExperimentRecord {
    int schema_version = kResultsSchemaVersion;
    SynthesisConfig config;
    int replicate = 0;
    LearnerConfig algorithm;
    RunStatus status = RunStatus::Ok;
    std::string failure_reason;  // empty unless status == Failed
    std::optional<StructuralMetrics> metrics;
    std::optional<double> pcor_value;
    std::string pcor_error;      // set when pcor could not be computed
    double runtime_seconds = 0.0;
    std::string tool_version = kToolVersion;

    // Identity of the grid cell: axes + replicate + algorithm fingerprint.
    std::string key() const;

    nlohmann::json to_json() const;
    static ExperimentRecord from_json(const nlohmann::json& j);
};

// Generates ground truth + data once, then runs every algorithm on the same
// dataset. Per-algorithm failures land in the record status; nothing throws.
std::vector<ExperimentRecord> run_experiment(const SynthesisConfig& config, int replicate,
                                             const std::vector<LearnerConfig>& algorithms,
                                             const PcorConfig& pcor_defaults = {});

struct RunOptions {
    int jobs = 1;
    bool resume = false;
    // Called after each finished experiment; return false to stop the run.
    std::function<bool(int done, int total)> progress;
};

struct RunSummary {
    int total_cells = 0;
    int skipped = 0;
    int executed = 0;
    int ok = 0;
    int timeout = 0;
    int failed = 0;
    bool cancelled = false;

    nlohmann::json to_json() const;
};

// Executes all cells not already present in the results file (when resuming),
// appending one JSON record per line. A truncated trailing line from a killed
// run is dropped before appending.
RunSummary run_grid(const GridSpec& spec, const std::string& results_path,
                    const RunOptions& options);

std::vector<ExperimentRecord> read_results(const std::string& path);

}  // namespace causalsheet
