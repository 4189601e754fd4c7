#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "causalsheet/datasheet.hpp"
#include "causalsheet/errors.hpp"
#include "causalsheet/grid.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace causalsheet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailuresPresent = 1;
constexpr int kExitArgumentError = 2;
constexpr int kExitNoMatchingRecords = 3;

struct SweepFlags {
    std::vector<double> alphas = {1, 10, 50, 100};
    std::vector<int> complexities = {1, 2, 3};
    std::vector<std::string> structures = {"forest_fire", "preferential_attachment", "ic_dag"};
    int replicates = 3;
};

struct LearnerFlags {
    double ess = 1.0;
    double significance = 0.05;
    int max_conditioning_size = 3;
    int max_parents = 8;
    double time_budget = kDefaultTimeBudgetSeconds;
};

struct PcorFlags {
    int pair_budget = 50;
    double direction_epsilon = 0.05;
    double tolerance_log_or = std::log(2.0);
};

void add_learner_flags(CLI::App* cmd, LearnerFlags& flags) {
    cmd->add_option("--ess", flags.ess, "BDeu equivalent sample size")->capture_default_str();
    cmd->add_option("--significance", flags.significance, "CI test significance level")
        ->capture_default_str();
    cmd->add_option("--max-conditioning-size", flags.max_conditioning_size,
                    "PC/MMPC conditioning set cap")
        ->capture_default_str();
    cmd->add_option("--max-parents", flags.max_parents, "hill-climb parent cap")
        ->capture_default_str();
    cmd->add_option("--time-budget", flags.time_budget, "per-algorithm time budget in seconds")
        ->capture_default_str();
}

void add_pcor_flags(CLI::App* cmd, PcorFlags& flags) {
    cmd->add_option("--pcor-pair-budget", flags.pair_budget,
                    "max intervention/outcome pairs evaluated")
        ->capture_default_str();
    cmd->add_option("--pcor-direction-epsilon", flags.direction_epsilon,
                    "|ln OR| below this counts as a null effect")
        ->capture_default_str();
    cmd->add_option("--pcor-tolerance-log-or", flags.tolerance_log_or,
                    "max |ln OR| disagreement for a correct pair")
        ->capture_default_str();
}

std::vector<LearnerConfig> make_algorithms(const std::vector<std::string>& names,
                                           const LearnerFlags& flags) {
    std::vector<LearnerConfig> out;
    for (const std::string& name : names) {
        LearnerConfig c;
        c.algorithm = algorithm_from_string(name);
        c.score.equivalent_sample_size = flags.ess;
        c.significance = flags.significance;
        c.max_conditioning_size = flags.max_conditioning_size;
        c.max_parents = flags.max_parents;
        c.time_budget_seconds = flags.time_budget;
        out.push_back(c);
    }
    return out;
}

PcorConfig make_pcor(const PcorFlags& flags) {
    PcorConfig c;
    c.pair_budget = flags.pair_budget;
    c.direction_epsilon = flags.direction_epsilon;
    c.tolerance_log_or = flags.tolerance_log_or;
    return c;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return nlohmann::json::parse(is);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << text;
}

int cmd_gen_grid(const std::string& out_path, const GridSpec& spec) {
    write_text_file(out_path, spec.to_json().dump(2) + "\n");
    std::cout << "wrote grid spec with " << enumerate_grid(spec).size() << " entries x "
              << spec.algorithms.size() << " algorithms to " << out_path << "\n";
    return kExitOk;
}

int cmd_run_grid(const std::string& spec_path, const std::string& out_path, int jobs, bool resume,
                 std::optional<std::uint64_t> seed_override) {
    GridSpec spec;
    try {
        spec = GridSpec::from_json(load_json_file(spec_path));
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "error: cannot parse grid spec " << spec_path << ": " << e.what() << "\n";
        return kExitArgumentError;
    } catch (const std::exception& e) {
        std::cerr << "error: invalid grid spec " << spec_path << ": " << e.what() << "\n";
        return kExitArgumentError;
    }
    if (seed_override) spec.global_seed = *seed_override;

    RunOptions options;
    options.jobs = jobs;
    options.resume = resume;
    int last_percent = -1;
    options.progress = [&](int done, int total) {
        int percent = total > 0 ? done * 100 / total : 100;
        if (percent != last_percent) {
            std::cout << "\r" << done << "/" << total << " experiments (" << percent << "%)"
                      << std::flush;
            last_percent = percent;
        }
        return true;
    };
    RunSummary summary = run_grid(spec, out_path, options);
    std::cout << "\n"
              << summary.to_json().dump() << "\n"
              << summary.executed << " new records (" << summary.skipped << " already present)\n";
    return summary.failed > 0 ? kExitFailuresPresent : kExitOk;
}

int cmd_synth(const SynthesisConfig& config, const std::string& out_prefix) {
    SynthResult result = synthesize(config);
    result.data.write_csv_file(out_prefix + ".csv");
    write_text_file(out_prefix + ".net.json", result.net.to_json().dump(2) + "\n");
    nlohmann::json sidecar{{"cardinalities", result.net.cardinalities},
                           {"config", config.to_json()}};
    write_text_file(out_prefix + ".json", sidecar.dump(2) + "\n");
    std::cout << "wrote " << out_prefix << ".csv (" << config.num_samples << " rows), "
              << out_prefix << ".net.json, " << out_prefix << ".json\n";
    return kExitOk;
}

int cmd_learn(const std::string& data_path, const std::string& algorithm,
              const LearnerFlags& flags, const std::string& out_path) {
    Dataset data = Dataset::read_csv_file(data_path);
    LearnerConfig config = make_algorithms({algorithm}, flags)[0];
    Cpdag learned = learn(data, config);
    nlohmann::json j = learned.to_json();
    j["algorithm"] = config.to_json();
    write_text_file(out_path, j.dump(2) + "\n");
    std::cout << "learned CPDAG with " << learned.directed_count() << " directed and "
              << learned.undirected_count() << " undirected edges -> " << out_path << "\n";
    return kExitOk;
}

int cmd_inspect(const std::string& learned_path, const std::string& truth_path) {
    Cpdag learned = Cpdag::from_json(load_json_file(learned_path));
    Dag truth = Dag::from_json(load_json_file(truth_path));
    StructuralMetrics m = structural_metrics(learned, truth);
    nlohmann::json j = m.to_json();
    std::cout << "skeleton precision    " << m.skeleton_precision << "\n"
              << "skeleton recall       " << m.skeleton_recall << "\n"
              << "v-structure precision " << m.vstructure_precision << "\n"
              << "v-structure recall    " << m.vstructure_recall << "\n"
              << j.dump() << "\n";
    return kExitOk;
}

int cmd_datasheet(const std::string& data_path, std::optional<int> samples,
                  std::optional<int> variables, std::optional<double> levels, bool on_demand,
                  const std::string& results_path, double pcor_threshold,
                  const std::string& out_dir, const SweepFlags& sweep_flags,
                  const LearnerFlags& learner_flags, const PcorFlags& pcor_flags,
                  std::uint64_t seed, int jobs) {
    ObservableCharacteristics obs;
    std::vector<std::string> warnings;
    if (!data_path.empty()) {
        CsvCharacteristics extracted = extract_characteristics_file(data_path);
        obs = extracted.observables;
        for (const auto& col : extracted.single_level_columns)
            warnings.push_back("column '" + col + "' has a single observed level");
    } else {
        obs.num_samples = *samples;
        obs.num_variables = *variables;
        obs.avg_levels = *levels;
    }

    Datasheet sheet;
    if (on_demand) {
        OnDemandSweep sweep;
        sweep.alphas = sweep_flags.alphas;
        sweep.complexities = sweep_flags.complexities;
        sweep.structure_types.clear();
        for (const auto& s : sweep_flags.structures)
            sweep.structure_types.push_back(structure_type_from_string(s));
        sweep.replicates = sweep_flags.replicates;
        sweep.global_seed = seed;
        sweep.algorithms = make_algorithms({"pc", "ges", "mmhc"}, learner_flags);
        sweep.pcor = make_pcor(pcor_flags);
        sweep.jobs = jobs;
        fs::create_directories(out_dir);
        std::string sweep_results = results_path.empty()
                                        ? (fs::path(out_dir) / "on_demand_results.jsonl").string()
                                        : results_path;
        sheet = on_demand_datasheet(obs, pcor_threshold, sweep, sweep_results, warnings);
    } else {
        sheet = lookup_datasheet(obs, pcor_threshold, results_path, warnings);
    }

    fs::create_directories(out_dir);
    std::string stem = "datasheet_" + request_hash(sheet.request);
    std::string md_path = (fs::path(out_dir) / (stem + ".md")).string();
    std::string json_path = (fs::path(out_dir) / (stem + ".json")).string();
    write_text_file(md_path, render_markdown(sheet));
    write_text_file(json_path, sheet.to_json().dump(2) + "\n");
    std::cout << "wrote " << md_path << " and " << json_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"causal structure-learning benchmark and datasheet generator"};
    app.require_subcommand(1);

    // gen-grid
    auto* gen = app.add_subcommand("gen-grid", "write a grid spec JSON (defaults: full benchmark grid)");
    std::string gen_out = "grid.json";
    GridSpec gen_spec = GridSpec::benchmark_defaults();
    std::vector<std::string> gen_structures;
    std::vector<std::string> gen_algorithms;
    LearnerFlags gen_learner;
    PcorFlags gen_pcor;
    std::uint64_t gen_seed = 0;
    gen->add_option("--out", gen_out, "output path")->capture_default_str();
    gen->add_option("--samples", gen_spec.samples, "sample-size axis");
    gen->add_option("--variables", gen_spec.variables, "variable-count axis");
    gen->add_option("--alphas", gen_spec.alphas, "imbalance axis");
    gen->add_option("--complexities", gen_spec.complexities, "edges-per-node axis");
    gen->add_option("--structures", gen_structures,
                    "structure types (forest_fire, preferential_attachment, ic_dag)");
    gen->add_option("--levels", gen_spec.avg_levels, "average-levels axis");
    gen->add_option("--replicates", gen_spec.replicates, "seeds per cell")->capture_default_str();
    gen->add_option("--algorithms", gen_algorithms, "algorithms (pc, ges, mmhc)");
    gen->add_option("--seed", gen_seed, "global seed")->capture_default_str();
    add_learner_flags(gen, gen_learner);
    add_pcor_flags(gen, gen_pcor);

    // run-grid
    auto* run = app.add_subcommand("run-grid", "execute a grid spec and append JSONL records");
    std::string run_spec_path, run_out = "results.jsonl";
    int run_jobs = 1;
    bool run_resume = false;
    std::optional<std::uint64_t> run_seed;
    run->add_option("--spec", run_spec_path, "grid spec JSON path")->required();
    run->add_option("--out", run_out, "results JSONL path")->capture_default_str();
    run->add_option("--jobs", run_jobs, "worker count")->capture_default_str();
    run->add_flag("--resume", run_resume, "skip cells already present in the results file");
    run->add_option("--seed", run_seed, "override the spec's global seed");

    // synth
    auto* synth = app.add_subcommand("synth", "generate one ground-truth network and dataset");
    SynthesisConfig synth_config;
    std::string synth_structure = "preferential_attachment";
    std::string synth_prefix = "synth";
    synth->add_option("--variables", synth_config.num_variables, "variable count")
        ->capture_default_str();
    synth->add_option("--structure", synth_structure,
                      "forest_fire | preferential_attachment | ic_dag")
        ->capture_default_str();
    synth->add_option("--complexity", synth_config.complexity, "target edges per node")
        ->capture_default_str();
    synth->add_option("--alpha", synth_config.alpha, "CPT imbalance (Dirichlet concentration)")
        ->capture_default_str();
    synth->add_option("--levels", synth_config.avg_levels, "average variable levels")
        ->capture_default_str();
    synth->add_option("--samples", synth_config.num_samples, "sample count")->capture_default_str();
    synth->add_option("--seed", synth_config.seed, "RNG seed")->capture_default_str();
    synth->add_option("--out-prefix", synth_prefix, "output file prefix")->capture_default_str();

    // learn
    auto* lrn = app.add_subcommand("learn", "run one algorithm on a CSV and write the CPDAG JSON");
    std::string learn_data, learn_algorithm = "ges", learn_out = "learned.json";
    LearnerFlags learn_flags;
    lrn->add_option("--data", learn_data, "input CSV")->required();
    lrn->add_option("--algorithm", learn_algorithm, "pc | ges | mmhc")->capture_default_str();
    lrn->add_option("--out", learn_out, "output graph JSON")->capture_default_str();
    add_learner_flags(lrn, learn_flags);

    // inspect
    auto* ins = app.add_subcommand("inspect", "print metrics between a learned graph and a truth graph");
    std::string inspect_learned, inspect_truth;
    ins->add_option("--learned", inspect_learned, "learned CPDAG JSON")->required();
    ins->add_option("--truth", inspect_truth, "ground-truth DAG JSON")->required();

    // datasheet
    auto* sheet = app.add_subcommand("datasheet", "emit a Causal Datasheet for dataset characteristics");
    std::string sheet_data, sheet_results, sheet_out = "datasheet";
    std::optional<int> sheet_samples, sheet_variables;
    std::optional<double> sheet_levels;
    bool sheet_on_demand = false;
    double sheet_threshold = 0.8;
    SweepFlags sheet_sweep;
    LearnerFlags sheet_learner;
    PcorFlags sheet_pcor;
    std::uint64_t sheet_seed = 0;
    int sheet_jobs = 1;
    sheet->add_option("--data", sheet_data, "CSV to extract characteristics from");
    sheet->add_option("--samples", sheet_samples, "sample count (explicit characteristics)");
    sheet->add_option("--variables", sheet_variables, "variable count");
    sheet->add_option("--levels", sheet_levels, "average variable levels");
    sheet->add_flag("--on-demand", sheet_on_demand, "run a fresh sweep instead of looking up results");
    sheet->add_option("--results", sheet_results, "results JSONL (lookup mode, or on-demand cache)");
    sheet->add_option("--pcor-threshold", sheet_threshold, "PCOR acceptance threshold")
        ->capture_default_str();
    sheet->add_option("--out", sheet_out, "output directory")->capture_default_str();
    sheet->add_option("--alphas", sheet_sweep.alphas, "on-demand imbalance sweep");
    sheet->add_option("--complexities", sheet_sweep.complexities, "on-demand complexity sweep");
    sheet->add_option("--structures", sheet_sweep.structures, "on-demand structure sweep");
    sheet->add_option("--replicates", sheet_sweep.replicates, "on-demand replicates")
        ->capture_default_str();
    sheet->add_option("--seed", sheet_seed, "on-demand global seed")->capture_default_str();
    sheet->add_option("--jobs", sheet_jobs, "on-demand worker count")->capture_default_str();
    add_learner_flags(sheet, sheet_learner);
    add_pcor_flags(sheet, sheet_pcor);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitArgumentError;
    }

    try {
        if (gen->parsed()) {
            if (!gen_structures.empty()) {
                gen_spec.structure_types.clear();
                for (const auto& s : gen_structures)
                    gen_spec.structure_types.push_back(structure_type_from_string(s));
            }
            gen_spec.algorithms = make_algorithms(
                gen_algorithms.empty() ? std::vector<std::string>{"pc", "ges", "mmhc"} : gen_algorithms,
                gen_learner);
            gen_spec.pcor = make_pcor(gen_pcor);
            gen_spec.global_seed = gen_seed;
            gen_spec.validate();
            return cmd_gen_grid(gen_out, gen_spec);
        }
        if (run->parsed()) return cmd_run_grid(run_spec_path, run_out, run_jobs, run_resume, run_seed);
        if (synth->parsed()) {
            synth_config.structure_type = structure_type_from_string(synth_structure);
            return cmd_synth(synth_config, synth_prefix);
        }
        if (lrn->parsed()) return cmd_learn(learn_data, learn_algorithm, learn_flags, learn_out);
        if (ins->parsed()) return cmd_inspect(inspect_learned, inspect_truth);
        if (sheet->parsed()) {
            const bool has_all_explicit = sheet_samples && sheet_variables && sheet_levels;
            const bool has_any_explicit = sheet_samples || sheet_variables || sheet_levels;
            if ((!sheet_data.empty() && has_any_explicit) ||
                (sheet_data.empty() && !has_all_explicit)) {
                std::cerr << "error: provide either --data or all of --samples/--variables/--levels\n";
                return kExitArgumentError;
            }
            if (!sheet_on_demand && sheet_results.empty()) {
                std::cerr << "error: lookup mode needs --results (or pass --on-demand)\n";
                return kExitArgumentError;
            }
            return cmd_datasheet(sheet_data, sheet_samples, sheet_variables, sheet_levels,
                                 sheet_on_demand, sheet_results, sheet_threshold, sheet_out,
                                 sheet_sweep, sheet_learner, sheet_pcor, sheet_seed, sheet_jobs);
        }
    } catch (const NoMatchingRecords& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (!sheet_results.empty()) {
            try {
                auto records = read_results(sheet_results);
                std::set<int> samples, variables, levels;
                for (const auto& rec : records) {
                    samples.insert(rec.config.num_samples);
                    variables.insert(rec.config.num_variables);
                    levels.insert(rec.config.avg_levels);
                }
                auto join = [](const std::set<int>& xs) {
                    std::string s;
                    for (int x : xs) s += (s.empty() ? "" : ", ") + std::to_string(x);
                    return s.empty() ? std::string("(none)") : s;
                };
                std::cerr << "hint: available cells   samples: " << join(samples)
                          << "   variables: " << join(variables) << "   levels: " << join(levels)
                          << "\n";
            } catch (const std::exception&) {
            }
        }
        return kExitNoMatchingRecords;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitArgumentError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitArgumentError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailuresPresent;
    }
    return kExitOk;
}
