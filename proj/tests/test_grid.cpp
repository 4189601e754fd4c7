#include <filesystem>
#include <map>

#include "causalsheet/grid.hpp"
#include "doctest.h"

using namespace causalsheet;
namespace fs = std::filesystem;

namespace {

GridSpec tiny_spec() {
    GridSpec spec;
    spec.samples = {400};
    spec.variables = {5};
    spec.alphas = {10.0};
    spec.complexities = {1};
    spec.structure_types = {StructureType::PreferentialAttachment};
    spec.avg_levels = {3};
    spec.replicates = 2;
    spec.algorithms = GridSpec::default_algorithms();
    spec.global_seed = 7;
    return spec;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("causalsheet_test_" + std::to_string(Rng(std::random_device{}())()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

// Record identity with runtime scrubbed, for byte-level comparisons.
nlohmann::json scrubbed(const ExperimentRecord& rec) {
    nlohmann::json j = rec.to_json();
    j["runtime_seconds"] = 0.0;
    return j;
}

std::map<std::string, std::string> scrubbed_by_key(const std::vector<ExperimentRecord>& records) {
    std::map<std::string, std::string> out;
    for (const auto& rec : records) out[rec.key()] = scrubbed(rec).dump();
    return out;
}

}  // namespace

TEST_SUITE_BEGIN("grid");

TEST_CASE("enumerate_grid cardinalities") {
    GridSpec full = GridSpec::benchmark_defaults();
    CHECK(enumerate_grid(full).size() == 32400);

    GridSpec single = tiny_spec();
    single.replicates = 1;
    CHECK(enumerate_grid(single).size() == 1);

    GridSpec two = single;
    two.alphas = {1.0, 100.0};
    CHECK(enumerate_grid(two).size() == 2);
}

TEST_CASE("enumerate_grid is deterministic and seeds differ across cells") {
    GridSpec spec = tiny_spec();
    spec.alphas = {1.0, 10.0};
    auto a = enumerate_grid(spec);
    auto b = enumerate_grid(spec);
    REQUIRE(a.size() == b.size());
    std::set<std::uint64_t> seeds;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].config == b[i].config);
        seeds.insert(a[i].config.seed);
    }
    CHECK(seeds.size() == a.size());
}

TEST_CASE("run_experiment produces one record per algorithm on a shared config") {
    GridSpec spec = tiny_spec();
    auto entries = enumerate_grid(spec);
    auto records = run_experiment(entries[0].config, entries[0].replicate, spec.algorithms);
    REQUIRE(records.size() == 3);
    for (const auto& rec : records) {
        CHECK(rec.config == entries[0].config);
        CHECK(rec.replicate == entries[0].replicate);
        CHECK(rec.status == RunStatus::Ok);
        CHECK(rec.metrics.has_value());
        CHECK(rec.tool_version == kToolVersion);
    }
}

TEST_CASE("run_experiment is byte-identical across invocations, runtime aside") {
    GridSpec spec = tiny_spec();
    auto entries = enumerate_grid(spec);
    auto a = run_experiment(entries[1].config, entries[1].replicate, spec.algorithms);
    auto b = run_experiment(entries[1].config, entries[1].replicate, spec.algorithms);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(scrubbed(a[i]).dump() == scrubbed(b[i]).dump());
}

TEST_CASE("an algorithm over budget reports Timeout with metrics absent") {
    GridSpec spec = tiny_spec();
    auto entries = enumerate_grid(spec);
    std::vector<LearnerConfig> algos = {spec.algorithms[0]};
    algos[0].time_budget_seconds = 1e-9;
    auto records = run_experiment(entries[0].config, entries[0].replicate, algos);
    REQUIRE(records.size() == 1);
    CHECK(records[0].status == RunStatus::Timeout);
    CHECK_FALSE(records[0].metrics.has_value());
    CHECK_FALSE(records[0].pcor_value.has_value());
}

TEST_CASE("record json round-trip") {
    GridSpec spec = tiny_spec();
    auto entries = enumerate_grid(spec);
    auto records = run_experiment(entries[0].config, entries[0].replicate, spec.algorithms);
    for (const auto& rec : records) {
        ExperimentRecord back = ExperimentRecord::from_json(rec.to_json());
        CHECK(back.key() == rec.key());
        CHECK(back.to_json().dump() == rec.to_json().dump());
    }
}

TEST_CASE("run_grid writes every cell and resume is idempotent") {
    TempDir tmp;
    GridSpec spec = tiny_spec();
    RunOptions options;
    auto path = tmp.file("results.jsonl");
    RunSummary summary = run_grid(spec, path, options);
    CHECK(summary.total_cells == 6);
    CHECK(summary.executed == 6);
    CHECK(read_results(path).size() == 6);

    options.resume = true;
    RunSummary again = run_grid(spec, path, options);
    CHECK(again.executed == 0);
    CHECK(again.skipped == 6);
    CHECK(read_results(path).size() == 6);
}

TEST_CASE("results are invariant to worker count and execution order") {
    TempDir tmp;
    GridSpec spec = tiny_spec();
    spec.alphas = {1.0, 100.0};
    RunOptions serial;
    serial.jobs = 1;
    run_grid(spec, tmp.file("serial.jsonl"), serial);
    RunOptions parallel;
    parallel.jobs = 4;
    run_grid(spec, tmp.file("parallel.jsonl"), parallel);
    auto a = scrubbed_by_key(read_results(tmp.file("serial.jsonl")));
    auto b = scrubbed_by_key(read_results(tmp.file("parallel.jsonl")));
    CHECK(a == b);
}

TEST_CASE("a cancelled run resumes to the same record set") {
    TempDir tmp;
    GridSpec spec = tiny_spec();
    spec.replicates = 4;  // 4 experiments x 3 algorithms

    RunOptions full;
    run_grid(spec, tmp.file("full.jsonl"), full);

    RunOptions half;
    half.progress = [](int done, int) { return done < 2; };  // stop halfway
    RunSummary first = run_grid(spec, tmp.file("resumed.jsonl"), half);
    CHECK(first.cancelled);
    CHECK(read_results(tmp.file("resumed.jsonl")).size() < 12);

    RunOptions finish;
    finish.resume = true;
    RunSummary second = run_grid(spec, tmp.file("resumed.jsonl"), finish);
    CHECK_FALSE(second.cancelled);
    auto a = scrubbed_by_key(read_results(tmp.file("full.jsonl")));
    auto b = scrubbed_by_key(read_results(tmp.file("resumed.jsonl")));
    CHECK(a == b);
    CHECK(b.size() == 12);
}

TEST_CASE("resume drops a truncated trailing line and refills the cell") {
    TempDir tmp;
    GridSpec spec = tiny_spec();
    auto path = tmp.file("crash.jsonl");
    run_grid(spec, path, {});
    // Simulate a crash mid-write: chop the last line in half.
    auto text = [&] {
        std::ifstream is(path);
        return std::string(std::istreambuf_iterator<char>(is), {});
    }();
    auto cut = text.rfind("{\"");
    std::ofstream(path, std::ios::trunc) << text.substr(0, cut + 20);

    RunOptions resume;
    resume.resume = true;
    RunSummary summary = run_grid(spec, path, resume);
    CHECK(summary.executed >= 1);
    CHECK(read_results(path).size() == 6);
}

TEST_CASE("grid spec json round-trip and validation") {
    GridSpec spec = tiny_spec();
    GridSpec back = GridSpec::from_json(spec.to_json());
    CHECK(back.to_json().dump() == spec.to_json().dump());

    GridSpec broken = tiny_spec();
    broken.samples.clear();
    CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
}

TEST_SUITE_END();
