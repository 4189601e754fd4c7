#include "causalsheet/grid.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "causalsheet/errors.hpp"

namespace causalsheet {

namespace {

template <typename T, typename F>
nlohmann::json list_to_json(const std::vector<T>& xs, F&& convert) {
    nlohmann::json arr = nlohmann::json::array();
    for (const T& x : xs) arr.push_back(convert(x));
    return arr;
}

}  // namespace

nlohmann::json GridSpec::to_json() const {
    nlohmann::json j{{"samples", samples},
                     {"variables", variables},
                     {"alphas", alphas},
                     {"complexities", complexities},
                     {"avg_levels", avg_levels},
                     {"replicates", replicates},
                     {"global_seed", global_seed}};
    j["structure_types"] =
        list_to_json(structure_types, [](StructureType t) { return to_string(t); });
    j["algorithms"] = list_to_json(algorithms, [](const LearnerConfig& c) { return c.to_json(); });
    j["pcor"] = pcor.to_json();
    return j;
}

GridSpec GridSpec::from_json(const nlohmann::json& j) {
    GridSpec spec;
    spec.samples = j.at("samples").get<std::vector<int>>();
    spec.variables = j.at("variables").get<std::vector<int>>();
    spec.alphas = j.at("alphas").get<std::vector<double>>();
    spec.complexities = j.at("complexities").get<std::vector<int>>();
    for (const auto& s : j.at("structure_types"))
        spec.structure_types.push_back(structure_type_from_string(s.get<std::string>()));
    spec.avg_levels = j.at("avg_levels").get<std::vector<int>>();
    spec.replicates = j.at("replicates").get<int>();
    for (const auto& a : j.at("algorithms")) spec.algorithms.push_back(LearnerConfig::from_json(a));
    spec.global_seed = j.value("global_seed", std::uint64_t{0});
    if (j.contains("pcor")) spec.pcor = PcorConfig::from_json(j.at("pcor"));
    spec.validate();
    return spec;
}

void GridSpec::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("GridSpec: ") + what);
    };
    require(!samples.empty(), "samples axis is empty");
    require(!variables.empty(), "variables axis is empty");
    require(!alphas.empty(), "alphas axis is empty");
    require(!complexities.empty(), "complexities axis is empty");
    require(!structure_types.empty(), "structure_types axis is empty");
    require(!avg_levels.empty(), "avg_levels axis is empty");
    require(replicates >= 1, "replicates must be >= 1");
    require(!algorithms.empty(), "algorithms list is empty");
    for (int s : samples) require(s >= 1, "sample sizes must be positive");
    for (int v : variables) require(v >= 2, "variable counts must be >= 2");
    for (double a : alphas) require(a > 0.0, "alphas must be positive");
    for (int c : complexities) require(c >= 1, "complexities must be >= 1");
    for (int l : avg_levels) require(l >= 2, "avg_levels must be >= 2");
}

std::vector<LearnerConfig> GridSpec::default_algorithms() {
    std::vector<LearnerConfig> algos(3);
    algos[0].algorithm = Algorithm::Pc;
    algos[1].algorithm = Algorithm::Ges;
    algos[2].algorithm = Algorithm::Mmhc;
    for (auto& a : algos) a.time_budget_seconds = kDefaultTimeBudgetSeconds;
    return algos;
}

GridSpec GridSpec::benchmark_defaults() {
    GridSpec spec;
    spec.samples = {1000, 2500, 5000, 10000, 25000, 50000};
    spec.variables = {10, 25, 50, 75, 100};
    spec.alphas = {1, 10, 50, 100};
    spec.complexities = {1, 2, 3};
    spec.structure_types = {StructureType::ForestFire, StructureType::PreferentialAttachment,
                            StructureType::IcDag};
    spec.avg_levels = {3, 4, 5};
    spec.replicates = 10;
    spec.algorithms = default_algorithms();
    return spec;
}

std::uint64_t experiment_seed(std::uint64_t global_seed, const SynthesisConfig& config,
                              int replicate) {
    std::uint64_t h = mix64(global_seed);
    h = hash_combine(h, std::uint64_t(config.num_samples));
    h = hash_combine(h, std::uint64_t(config.num_variables));
    h = hash_combine(h, config.alpha);
    h = hash_combine(h, std::uint64_t(config.complexity));
    h = hash_combine(h, hash_str(to_string(config.structure_type)));
    h = hash_combine(h, std::uint64_t(config.avg_levels));
    h = hash_combine(h, std::uint64_t(replicate));
    return h;
}

std::vector<GridEntry> enumerate_grid(const GridSpec& spec) {
    spec.validate();
    std::vector<GridEntry> entries;
    for (int n : spec.samples)
        for (int v : spec.variables)
            for (double a : spec.alphas)
                for (int c : spec.complexities)
                    for (StructureType t : spec.structure_types)
                        for (int l : spec.avg_levels)
                            for (int rep = 0; rep < spec.replicates; ++rep) {
                                SynthesisConfig cfg;
                                cfg.num_samples = n;
                                cfg.num_variables = v;
                                cfg.alpha = a;
                                cfg.complexity = c;
                                cfg.structure_type = t;
                                cfg.avg_levels = l;
                                cfg.seed = experiment_seed(spec.global_seed, cfg, rep);
                                entries.push_back({cfg, rep});
                            }
    return entries;
}

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Ok: return "ok";
        case RunStatus::Timeout: return "timeout";
        case RunStatus::Failed: return "failed";
    }
    throw std::invalid_argument("unknown RunStatus");
}

RunStatus run_status_from_string(const std::string& s) {
    if (s == "ok") return RunStatus::Ok;
    if (s == "timeout") return RunStatus::Timeout;
    if (s == "failed") return RunStatus::Failed;
    throw std::invalid_argument("unknown run status: " + s);
}

std::string ExperimentRecord::key() const {
    std::ostringstream os;
    os << config.num_samples << '|' << config.num_variables << '|' << config.alpha << '|'
       << config.complexity << '|' << to_string(config.structure_type) << '|' << config.avg_levels
       << '|' << replicate << '|' << to_string(algorithm.algorithm) << '|'
       << std::hex << hash_str(algorithm.to_json().dump());
    return os.str();
}

nlohmann::json ExperimentRecord::to_json() const {
    nlohmann::json j{{"schema_version", schema_version},
                     {"config", config.to_json()},
                     {"replicate", replicate},
                     {"algorithm", algorithm.to_json()},
                     {"status", to_string(status)},
                     {"runtime_seconds", runtime_seconds},
                     {"tool_version", tool_version}};
    j["failure_reason"] = failure_reason.empty() ? nlohmann::json() : nlohmann::json(failure_reason);
    j["metrics"] = metrics ? metrics->to_json() : nlohmann::json();
    j["pcor"] = pcor_value ? nlohmann::json(*pcor_value) : nlohmann::json();
    j["pcor_error"] = pcor_error.empty() ? nlohmann::json() : nlohmann::json(pcor_error);
    return j;
}

ExperimentRecord ExperimentRecord::from_json(const nlohmann::json& j) {
    ExperimentRecord rec;
    rec.schema_version = j.at("schema_version").get<int>();
    rec.config = SynthesisConfig::from_json(j.at("config"));
    rec.replicate = j.at("replicate").get<int>();
    rec.algorithm = LearnerConfig::from_json(j.at("algorithm"));
    rec.status = run_status_from_string(j.at("status").get<std::string>());
    if (!j.at("failure_reason").is_null()) rec.failure_reason = j.at("failure_reason").get<std::string>();
    if (!j.at("metrics").is_null()) rec.metrics = StructuralMetrics::from_json(j.at("metrics"));
    if (!j.at("pcor").is_null()) rec.pcor_value = j.at("pcor").get<double>();
    if (!j.at("pcor_error").is_null()) rec.pcor_error = j.at("pcor_error").get<std::string>();
    rec.runtime_seconds = j.at("runtime_seconds").get<double>();
    rec.tool_version = j.at("tool_version").get<std::string>();
    return rec;
}

std::vector<ExperimentRecord> run_experiment(const SynthesisConfig& config, int replicate,
                                             const std::vector<LearnerConfig>& algorithms,
                                             const PcorConfig& pcor_defaults) {
    std::vector<ExperimentRecord> records;
    records.reserve(algorithms.size());
    SynthResult truth;
    try {
        truth = synthesize(config);
    } catch (const std::exception& e) {
        // Generation failed (e.g. CalibrationFailed): every algorithm gets a
        // failed record so the cell is accounted for.
        for (const LearnerConfig& algo : algorithms) {
            ExperimentRecord rec;
            rec.config = config;
            rec.replicate = replicate;
            rec.algorithm = algo;
            rec.status = RunStatus::Failed;
            rec.failure_reason = std::string("synthesis: ") + e.what();
            records.push_back(std::move(rec));
        }
        return records;
    }
    for (const LearnerConfig& algo : algorithms) {
        ExperimentRecord rec;
        rec.config = config;
        rec.replicate = replicate;
        rec.algorithm = algo;
        const auto start = std::chrono::steady_clock::now();
        try {
            Cpdag learned = learn(truth.data, algo);
            rec.metrics = structural_metrics(learned, truth.net.dag);
            PcorConfig pcor_config = pcor_defaults;
            pcor_config.seed = hash_combine(config.seed, hash_str("pcor"));
            try {
                rec.pcor_value = pcor(truth.net, learned, truth.data, pcor_config);
            } catch (const NoConsistentExtension& e) {
                rec.pcor_error = e.what();
            }
            rec.status = RunStatus::Ok;
        } catch (const TimeoutError&) {
            rec.status = RunStatus::Timeout;
        } catch (const std::exception& e) {
            rec.status = RunStatus::Failed;
            rec.failure_reason = e.what();
        }
        rec.runtime_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        records.push_back(std::move(rec));
    }
    return records;
}

namespace {

// Reads the results file; unparseable lines (e.g. a truncated tail from a
// killed run) are reported through `dropped`.
std::vector<ExperimentRecord> read_results_tolerant(const std::string& path, int* dropped) {
    std::vector<ExperimentRecord> records;
    if (dropped) *dropped = 0;
    std::ifstream is(path);
    if (!is) return records;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        try {
            records.push_back(ExperimentRecord::from_json(nlohmann::json::parse(line)));
        } catch (const std::exception&) {
            if (dropped) ++*dropped;
        }
    }
    return records;
}

}  // namespace

std::vector<ExperimentRecord> read_results(const std::string& path) {
    if (!std::filesystem::exists(path))
        throw std::runtime_error("results file not found: " + path);
    return read_results_tolerant(path, nullptr);
}

nlohmann::json RunSummary::to_json() const {
    return {{"total_cells", total_cells}, {"skipped", skipped},   {"executed", executed},
            {"ok", ok},                   {"timeout", timeout},   {"failed", failed},
            {"cancelled", cancelled}};
}

RunSummary run_grid(const GridSpec& spec, const std::string& results_path,
                    const RunOptions& options) {
    const std::vector<GridEntry> entries = enumerate_grid(spec);
    RunSummary summary;
    summary.total_cells = static_cast<int>(entries.size() * spec.algorithms.size());

    // Resume: collect keys already on disk; rewrite the file if a killed run
    // left a truncated tail.
    std::set<std::string> done;
    if (options.resume && std::filesystem::exists(results_path)) {
        int dropped = 0;
        auto existing = read_results_tolerant(results_path, &dropped);
        for (const auto& rec : existing) done.insert(rec.key());
        if (dropped > 0) {
            std::ofstream os(results_path, std::ios::trunc);
            for (const auto& rec : existing) os << rec.to_json().dump() << '\n';
        }
    } else if (!options.resume && std::filesystem::exists(results_path)) {
        std::filesystem::remove(results_path);
    }
    summary.skipped = static_cast<int>(done.size());

    // Which algorithms still need to run, per entry.
    struct Task {
        const GridEntry* entry;
        std::vector<LearnerConfig> algorithms;
    };
    std::vector<Task> tasks;
    for (const GridEntry& entry : entries) {
        Task task{&entry, {}};
        for (const LearnerConfig& algo : spec.algorithms) {
            ExperimentRecord probe;
            probe.config = entry.config;
            probe.replicate = entry.replicate;
            probe.algorithm = algo;
            if (!done.count(probe.key())) task.algorithms.push_back(algo);
        }
        if (!task.algorithms.empty()) tasks.push_back(std::move(task));
    }

    std::ofstream out(results_path, std::ios::app);
    if (!out) throw std::runtime_error("cannot open results file for writing: " + results_path);

    std::mutex io_mutex;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> cancelled{false};
    std::atomic<int> done_count{0};
    const int total_tasks = static_cast<int>(tasks.size());
    std::exception_ptr first_error;

    auto worker = [&] {
        while (!cancelled.load()) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) break;
            const Task& task = tasks[i];
            auto records =
                run_experiment(task.entry->config, task.entry->replicate, task.algorithms, spec.pcor);
            std::lock_guard<std::mutex> lock(io_mutex);
            if (first_error) break;
            try {
                for (const auto& rec : records) {
                    out << rec.to_json().dump() << '\n';
                    out.flush();
                    if (!out) throw std::runtime_error("write to results file failed");
                    ++summary.executed;
                    switch (rec.status) {
                        case RunStatus::Ok: ++summary.ok; break;
                        case RunStatus::Timeout: ++summary.timeout; break;
                        case RunStatus::Failed: ++summary.failed; break;
                    }
                }
            } catch (...) {
                first_error = std::current_exception();
                cancelled.store(true);
                break;
            }
            int finished = ++done_count;
            if (options.progress && !options.progress(finished, total_tasks)) {
                cancelled.store(true);
                summary.cancelled = true;
            }
        }
    };

    const int jobs = std::max(1, options.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return summary;
}

}  // namespace causalsheet
