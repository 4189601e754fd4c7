#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "causalsheet/grid.hpp"
#include "json.hpp"

namespace causalsheet {

struct ObservableCharacteristics {
    int num_samples = 0;
    int num_variables = 0;
    double avg_levels = 0.0;

    nlohmann::json to_json() const;
    static ObservableCharacteristics from_json(const nlohmann::json& j);
};

struct CsvCharacteristics {
    ObservableCharacteristics observables;
    std::vector<std::string> single_level_columns;  // warning, not an error
};

// num_samples = row count; num_variables = column count; avg_levels = mean
// distinct-label count per column. Throws MalformedCsv.
CsvCharacteristics extract_characteristics(std::istream& csv);
CsvCharacteristics extract_characteristics_file(const std::string& path);

struct MetricStats {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation; 0 when n == 1
    int n = 0;
};

// Fixed metric identifiers used across aggregation, reports, and sidecars.
extern const std::vector<std::string> kMetricNames;

struct AlgorithmStats {
    std::map<std::string, MetricStats> metrics;  // keyed by kMetricNames
    int ok_records = 0;
    int total_records = 0;
};

struct AggregateResult {
    std::map<std::string, AlgorithmStats> per_algorithm;  // keyed by algorithm name
    ObservableCharacteristics query;
    ObservableCharacteristics matched;  // grid point actually used
    int records_used = 0;
    std::vector<std::string> algorithms_without_ok;  // flagged, never dropped

    nlohmann::json to_json() const;
};

enum class MatchingRule { Nearest, Exact };

// Pools records across all non-observable values and replicates at the grid
// point matched per observable axis (nearest value, ties toward the smaller).
// Throws NoMatchingRecords when the store lacks the matched cell.
AggregateResult aggregate(const std::vector<ExperimentRecord>& records,
                          const ObservableCharacteristics& observables, MatchingRule rule);

struct Recommendation {
    std::string tag;  // R1..R4
    std::string text;

    bool operator==(const Recommendation&) const = default;
};

// Tool-default recommendation thresholds (labeled as such in the report).
inline constexpr double kPrecisionWarnThreshold = 0.9;
inline constexpr double kRecallWarnThreshold = 0.5;

std::vector<Recommendation> recommend(const AggregateResult& stats, double pcor_threshold);

struct DatasheetRequest {
    ObservableCharacteristics observables;
    double pcor_threshold = 0.8;
    bool on_demand = false;
    std::string results_path;  // lookup mode

    nlohmann::json to_json() const;
};

struct Datasheet {
    DatasheetRequest request;
    AggregateResult stats;
    std::vector<Recommendation> recommendations;
    std::vector<std::string> warnings;
    nlohmann::json provenance;

    nlohmann::json to_json() const;
};

Datasheet build_datasheet(const DatasheetRequest& request, const AggregateResult& stats,
                          nlohmann::json provenance, std::vector<std::string> warnings = {});

// Markdown report with fixed section order: Characteristics, Expected
// Performance, Recommendations, Provenance, Glossary.
std::string render_markdown(const Datasheet& sheet);

// Stable 16-hex-digit fingerprint of the request; used for output file names.
std::string request_hash(const DatasheetRequest& request);

// On-demand sweep axes over the non-observable characteristics.
struct OnDemandSweep {
    std::vector<double> alphas = {1, 10, 50, 100};
    std::vector<int> complexities = {1, 2, 3};
    std::vector<StructureType> structure_types = {StructureType::ForestFire,
                                                  StructureType::PreferentialAttachment,
                                                  StructureType::IcDag};
    int replicates = 3;
    std::uint64_t global_seed = 0;
    std::vector<LearnerConfig> algorithms = GridSpec::default_algorithms();
    PcorConfig pcor{};
    int jobs = 1;
};

// Builds the single-point grid implied by the observables, runs it, and
// aggregates with exact matching. avg_levels is rounded to the nearest
// integer (minimum 2).
GridSpec on_demand_grid(const ObservableCharacteristics& observables, const OnDemandSweep& sweep);
Datasheet on_demand_datasheet(const ObservableCharacteristics& observables, double pcor_threshold,
                              const OnDemandSweep& sweep, const std::string& results_path,
                              std::vector<std::string> warnings = {});

// Lookup mode against an existing results store.
Datasheet lookup_datasheet(const ObservableCharacteristics& observables, double pcor_threshold,
                           const std::string& results_path, std::vector<std::string> warnings = {});

}  // namespace causalsheet
