#include "causalsheet/datasheet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include "causalsheet/errors.hpp"

namespace causalsheet {

const std::vector<std::string> kMetricNames = {"skeleton_precision", "skeleton_recall",
                                               "vstructure_precision", "vstructure_recall",
                                               "pcor"};

nlohmann::json ObservableCharacteristics::to_json() const {
    return {{"num_samples", num_samples}, {"num_variables", num_variables}, {"avg_levels", avg_levels}};
}

ObservableCharacteristics ObservableCharacteristics::from_json(const nlohmann::json& j) {
    ObservableCharacteristics o;
    o.num_samples = j.at("num_samples").get<int>();
    o.num_variables = j.at("num_variables").get<int>();
    o.avg_levels = j.at("avg_levels").get<double>();
    return o;
}

CsvCharacteristics extract_characteristics(std::istream& csv) {
    Dataset ds = Dataset::read_csv(csv);
    CsvCharacteristics out;
    out.observables.num_samples = ds.num_rows();
    out.observables.num_variables = ds.num_vars();
    double total_levels = 0.0;
    for (int v = 0; v < ds.num_vars(); ++v) {
        total_levels += ds.cardinality(v);
        if (ds.cardinality(v) <= 1) out.single_level_columns.push_back(ds.variable_names[v]);
    }
    out.observables.avg_levels = ds.num_vars() > 0 ? total_levels / ds.num_vars() : 0.0;
    return out;
}

CsvCharacteristics extract_characteristics_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw MalformedCsv("cannot open " + path);
    return extract_characteristics(is);
}

namespace {

// Nearest available value, ties toward the smaller.
template <typename T>
T nearest_value(const std::set<T>& available, double query) {
    T best = *available.begin();
    double best_dist = std::abs(static_cast<double>(best) - query);
    for (T v : available) {
        double dist = std::abs(static_cast<double>(v) - query);
        if (dist < best_dist) {
            best = v;
            best_dist = dist;
        }
    }
    return best;
}

MetricStats stats_of(const std::vector<double>& xs) {
    MetricStats s;
    s.n = static_cast<int>(xs.size());
    if (s.n == 0) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / s.n;
    if (s.n > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / (s.n - 1));
    }
    return s;
}

}  // namespace

nlohmann::json AggregateResult::to_json() const {
    nlohmann::json algos = nlohmann::json::object();
    for (const auto& [name, stats] : per_algorithm) {
        nlohmann::json metrics = nlohmann::json::object();
        for (const auto& [metric, ms] : stats.metrics)
            metrics[metric] = {{"mean", ms.mean}, {"sd", ms.sd}, {"n", ms.n}};
        algos[name] = {{"metrics", metrics},
                       {"ok_records", stats.ok_records},
                       {"total_records", stats.total_records}};
    }
    return {{"per_algorithm", algos},
            {"query", query.to_json()},
            {"matched", matched.to_json()},
            {"records_used", records_used},
            {"algorithms_without_ok", algorithms_without_ok}};
}

AggregateResult aggregate(const std::vector<ExperimentRecord>& records,
                          const ObservableCharacteristics& observables, MatchingRule rule) {
    if (records.empty()) throw NoMatchingRecords("aggregate: empty record set");

    AggregateResult out;
    out.query = observables;
    if (rule == MatchingRule::Nearest) {
        std::set<int> samples, variables, levels;
        for (const auto& rec : records) {
            samples.insert(rec.config.num_samples);
            variables.insert(rec.config.num_variables);
            levels.insert(rec.config.avg_levels);
        }
        out.matched.num_samples = nearest_value(samples, observables.num_samples);
        out.matched.num_variables = nearest_value(variables, observables.num_variables);
        out.matched.avg_levels = nearest_value(levels, observables.avg_levels);
    } else {
        out.matched = observables;
    }

    std::map<std::string, std::map<std::string, std::vector<double>>> values;
    std::map<std::string, AlgorithmStats> stats;
    for (const auto& rec : records) {
        if (rec.config.num_samples != out.matched.num_samples) continue;
        if (rec.config.num_variables != out.matched.num_variables) continue;
        if (rec.config.avg_levels != static_cast<int>(std::lround(out.matched.avg_levels))) continue;
        const std::string name = to_string(rec.algorithm.algorithm);
        ++stats[name].total_records;
        ++out.records_used;
        if (rec.status != RunStatus::Ok || !rec.metrics) continue;
        ++stats[name].ok_records;
        values[name]["skeleton_precision"].push_back(rec.metrics->skeleton_precision);
        values[name]["skeleton_recall"].push_back(rec.metrics->skeleton_recall);
        values[name]["vstructure_precision"].push_back(rec.metrics->vstructure_precision);
        values[name]["vstructure_recall"].push_back(rec.metrics->vstructure_recall);
        if (rec.pcor_value) values[name]["pcor"].push_back(*rec.pcor_value);
    }
    if (out.records_used == 0)
        throw NoMatchingRecords("aggregate: no records at the matched grid point");

    for (auto& [name, algo_stats] : stats) {
        for (const std::string& metric : kMetricNames)
            algo_stats.metrics[metric] = stats_of(values[name][metric]);
        if (algo_stats.ok_records == 0) out.algorithms_without_ok.push_back(name);
        out.per_algorithm[name] = algo_stats;
    }
    return out;
}

namespace {

std::string format_mean(double x) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << x;
    return os.str();
}

// Best algorithm by mean (higher better); ties by smaller sd, then name.
std::optional<std::string> best_algorithm(const AggregateResult& stats, const std::string& metric) {
    std::optional<std::string> best;
    for (const auto& [name, algo] : stats.per_algorithm) {
        auto it = algo.metrics.find(metric);
        if (it == algo.metrics.end() || it->second.n == 0) continue;
        if (!best) {
            best = name;
            continue;
        }
        const MetricStats& cur = it->second;
        const MetricStats& champ = stats.per_algorithm.at(*best).metrics.at(metric);
        if (cur.mean > champ.mean || (cur.mean == champ.mean && cur.sd < champ.sd)) best = name;
    }
    return best;
}

}  // namespace

std::vector<Recommendation> recommend(const AggregateResult& stats, double pcor_threshold) {
    if (stats.per_algorithm.empty()) throw std::invalid_argument("recommend: empty stats");
    std::vector<Recommendation> recs;

    // R1: interventional trustworthiness against the user threshold.
    if (auto best = best_algorithm(stats, "pcor")) {
        const MetricStats& ms = stats.per_algorithm.at(*best).metrics.at("pcor");
        if (ms.mean < pcor_threshold) {
            recs.push_back(
                {"R1", "No algorithm meets the PCOR threshold of " + format_mean(pcor_threshold) +
                           " (best: " + *best + " at " + format_mean(ms.mean) +
                           "). Interventional odds ratios from this data should not be trusted as-is; "
                           "further constrain the model or seek expert input."});
        } else {
            recs.push_back({"R1", "Expected PCOR " + format_mean(ms.mean) + " from " + *best +
                                      " meets the threshold of " + format_mean(pcor_threshold) + "."});
        }
    } else {
        recs.push_back({"R1", "PCOR could not be estimated for any algorithm; interventional "
                              "queries are unvalidated."});
    }

    // R2: best algorithm per metric family.
    for (const std::string& metric : kMetricNames) {
        if (auto best = best_algorithm(stats, metric)) {
            const MetricStats& ms = stats.per_algorithm.at(*best).metrics.at(metric);
            recs.push_back({"R2", "Best " + metric + ": " + *best + " (mean " +
                                      format_mean(ms.mean) + ", sd " + format_mean(ms.sd) + ")."});
        }
    }

    // R3: orientation uncertainty.
    auto best_sp = best_algorithm(stats, "skeleton_precision");
    auto best_vr = best_algorithm(stats, "vstructure_recall");
    if (best_sp && best_vr) {
        double sp = stats.per_algorithm.at(*best_sp).metrics.at("skeleton_precision").mean;
        double vr = stats.per_algorithm.at(*best_vr).metrics.at("vstructure_recall").mean;
        if (sp >= kPrecisionWarnThreshold && vr < kRecallWarnThreshold) {
            recs.push_back(
                {"R3", "Edge orientation is unreliable here: undirected structure is recovered well "
                       "(best skeleton precision " + format_mean(sp) +
                       ") but v-structure recall tops out at " + format_mean(vr) +
                       ". Treat edge directions as unresolved without further constraints."});
        }
    }

    // R4: sample size.
    if (auto best_sr = best_algorithm(stats, "skeleton_recall")) {
        double sr = stats.per_algorithm.at(*best_sr).metrics.at("skeleton_recall").mean;
        if (sr < kRecallWarnThreshold) {
            recs.push_back(
                {"R4", "Best skeleton recall is only " + format_mean(sr) +
                       "; many true edges go undetected at this sample size. Collect more samples "
                       "before relying on the learned structure."});
        }
    }
    return recs;
}

nlohmann::json DatasheetRequest::to_json() const {
    return {{"observables", observables.to_json()},
            {"pcor_threshold", pcor_threshold},
            {"mode", on_demand ? "on_demand" : "lookup"},
            {"results_path", results_path}};
}

nlohmann::json Datasheet::to_json() const {
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : recommendations) recs.push_back({{"tag", r.tag}, {"text", r.text}});
    return {{"request", request.to_json()},
            {"stats", stats.to_json()},
            {"recommendations", recs},
            {"warnings", warnings},
            {"provenance", provenance}};
}

Datasheet build_datasheet(const DatasheetRequest& request, const AggregateResult& stats,
                          nlohmann::json provenance, std::vector<std::string> warnings) {
    Datasheet sheet;
    sheet.request = request;
    sheet.stats = stats;
    sheet.recommendations = recommend(stats, request.pcor_threshold);
    sheet.warnings = std::move(warnings);
    sheet.provenance = std::move(provenance);
    return sheet;
}

std::string request_hash(const DatasheetRequest& request) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0')
       << hash_str(request.to_json().dump());
    return os.str();
}

namespace {

std::string format_pm(const MetricStats& ms) {
    if (ms.n == 0) return "n/a";
    return format_mean(ms.mean) + " ± " + format_mean(ms.sd);
}

}  // namespace

std::string render_markdown(const Datasheet& sheet) {
    std::ostringstream os;
    os << "# Causal Datasheet\n\n";

    os << "## Characteristics\n\n";
    os << "| Characteristic | Value |\n|---|---|\n";
    os << "| Samples | " << sheet.request.observables.num_samples << " |\n";
    os << "| Variables | " << sheet.request.observables.num_variables << " |\n";
    os << "| Average variable levels | " << format_mean(sheet.request.observables.avg_levels)
       << " |\n";
    os << "| PCOR threshold | " << format_mean(sheet.request.pcor_threshold) << " |\n";
    os << "| Mode | " << (sheet.request.on_demand ? "on-demand" : "lookup") << " |\n";
    os << "| Matched grid point | samples=" << sheet.stats.matched.num_samples
       << ", variables=" << sheet.stats.matched.num_variables
       << ", levels=" << format_mean(sheet.stats.matched.avg_levels) << " |\n\n";

    os << "## Expected Performance\n\n";
    os << "Mean ± sample standard deviation, pooled over the non-observable "
          "characteristics (structure type, complexity, imbalance) and replicates.\n\n";
    os << "| Algorithm | Skeleton precision | Skeleton recall | V-structure precision | "
          "V-structure recall | PCOR | Ok runs |\n";
    os << "|---|---|---|---|---|---|---|\n";
    for (const auto& [name, algo] : sheet.stats.per_algorithm) {
        os << "| " << name;
        for (const std::string& metric : kMetricNames) os << " | " << format_pm(algo.metrics.at(metric));
        os << " | " << algo.ok_records << "/" << algo.total_records << " |\n";
    }
    for (const auto& name : sheet.stats.algorithms_without_ok)
        os << "\n**Warning:** algorithm `" << name << "` produced no successful runs.\n";
    os << "\n";

    os << "## Recommendations\n\n";
    for (const auto& rec : sheet.recommendations) os << "- **[" << rec.tag << "]** " << rec.text << "\n";
    if (sheet.recommendations.empty()) os << "(none)\n";
    for (const auto& w : sheet.warnings) os << "- **[warning]** " << w << "\n";
    os << "\n";

    os << "## Provenance\n\n```json\n" << sheet.provenance.dump(2) << "\n```\n\n";

    os << "## Glossary\n\n";
    os << "- **Skeleton**: undirected edge set of a graph, ignoring orientation.\n";
    os << "- **V-structure**: unshielded collider a → c ← b with a, b non-adjacent; the "
          "orientation information that distinguishes equivalence classes.\n";
    os << "- **PCOR**: proportion of correct interventional odds ratios across evaluated "
          "intervention/outcome combinations.\n";
    os << "- **Precision convention**: an empty prediction scores precision 1 (no claims, no "
          "false claims); an empty truth scores recall 1.\n";
    os << "- **Thresholds**: precision/recall warning cutoffs (0.9 / 0.5) are tool defaults, not "
          "calibrated constants.\n";
    return os.str();
}

GridSpec on_demand_grid(const ObservableCharacteristics& observables, const OnDemandSweep& sweep) {
    GridSpec spec;
    spec.samples = {observables.num_samples};
    spec.variables = {observables.num_variables};
    spec.avg_levels = {std::max(2, static_cast<int>(std::lround(observables.avg_levels)))};
    spec.alphas = sweep.alphas;
    spec.complexities = sweep.complexities;
    spec.structure_types = sweep.structure_types;
    spec.replicates = sweep.replicates;
    spec.algorithms = sweep.algorithms;
    spec.global_seed = sweep.global_seed;
    spec.pcor = sweep.pcor;
    return spec;
}

namespace {

nlohmann::json base_provenance(const std::vector<LearnerConfig>& algorithms,
                               const PcorConfig& pcor) {
    nlohmann::json algos = nlohmann::json::array();
    for (const auto& a : algorithms) algos.push_back(a.to_json());
    return {{"tool_version", kToolVersion}, {"algorithms", algos}, {"pcor", pcor.to_json()}};
}

}  // namespace

Datasheet on_demand_datasheet(const ObservableCharacteristics& observables, double pcor_threshold,
                              const OnDemandSweep& sweep, const std::string& results_path,
                              std::vector<std::string> warnings) {
    GridSpec spec = on_demand_grid(observables, sweep);
    RunOptions options;
    options.jobs = sweep.jobs;
    options.resume = true;  // reuse cells from an interrupted sweep
    run_grid(spec, results_path, options);
    auto records = read_results(results_path);
    AggregateResult stats = aggregate(records, observables, MatchingRule::Nearest);

    DatasheetRequest request;
    request.observables = observables;
    request.pcor_threshold = pcor_threshold;
    request.on_demand = true;
    request.results_path = results_path;

    nlohmann::json provenance = base_provenance(spec.algorithms, spec.pcor);
    provenance["mode"] = "on_demand";
    provenance["grid"] = spec.to_json();
    provenance["global_seed"] = spec.global_seed;
    provenance["records_used"] = stats.records_used;
    if (std::lround(observables.avg_levels) != observables.avg_levels)
        provenance["avg_levels_rounded_to"] = spec.avg_levels[0];
    return build_datasheet(request, stats, std::move(provenance), std::move(warnings));
}

Datasheet lookup_datasheet(const ObservableCharacteristics& observables, double pcor_threshold,
                           const std::string& results_path, std::vector<std::string> warnings) {
    auto records = read_results(results_path);
    if (records.empty()) throw NoMatchingRecords("lookup_datasheet: results store is empty");
    AggregateResult stats = aggregate(records, observables, MatchingRule::Nearest);

    DatasheetRequest request;
    request.observables = observables;
    request.pcor_threshold = pcor_threshold;
    request.on_demand = false;
    request.results_path = results_path;

    std::set<std::string> algo_names;
    std::set<std::uint64_t> seeds;
    for (const auto& rec : records) {
        if (rec.config.num_samples == stats.matched.num_samples &&
            rec.config.num_variables == stats.matched.num_variables)
            seeds.insert(rec.config.seed);
        algo_names.insert(to_string(rec.algorithm.algorithm));
    }
    nlohmann::json provenance;
    provenance["tool_version"] = kToolVersion;
    provenance["mode"] = "lookup";
    provenance["results_path"] = results_path;
    provenance["records_used"] = stats.records_used;
    provenance["matched_point"] = stats.matched.to_json();
    provenance["match_distance"] = {
        {"num_samples", std::abs(stats.matched.num_samples - observables.num_samples)},
        {"num_variables", std::abs(stats.matched.num_variables - observables.num_variables)},
        {"avg_levels", std::abs(stats.matched.avg_levels - observables.avg_levels)}};
    provenance["algorithms"] = std::vector<std::string>(algo_names.begin(), algo_names.end());
    return build_datasheet(request, stats, std::move(provenance), std::move(warnings));
}

}  // namespace causalsheet
