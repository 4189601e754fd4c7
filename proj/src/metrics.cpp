#include "causalsheet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "causalsheet/errors.hpp"
#include "causalsheet/inference.hpp"
#include "causalsheet/score.hpp"

namespace causalsheet {

nlohmann::json StructuralMetrics::to_json() const {
    return {{"skeleton_precision", skeleton_precision},
            {"skeleton_recall", skeleton_recall},
            {"vstructure_precision", vstructure_precision},
            {"vstructure_recall", vstructure_recall}};
}

StructuralMetrics StructuralMetrics::from_json(const nlohmann::json& j) {
    StructuralMetrics m;
    m.skeleton_precision = j.at("skeleton_precision").get<double>();
    m.skeleton_recall = j.at("skeleton_recall").get<double>();
    m.vstructure_precision = j.at("vstructure_precision").get<double>();
    m.vstructure_recall = j.at("vstructure_recall").get<double>();
    return m;
}

namespace {

template <typename T>
std::pair<double, double> set_pr(const std::set<T>& learned, const std::set<T>& truth) {
    std::size_t hits = 0;
    for (const T& e : learned)
        if (truth.count(e)) ++hits;
    double precision = learned.empty() ? 1.0 : static_cast<double>(hits) / learned.size();
    double recall = truth.empty() ? 1.0 : static_cast<double>(hits) / truth.size();
    return {precision, recall};
}

}  // namespace

std::pair<double, double> skeleton_pr(const Cpdag& learned, const Dag& truth) {
    if (learned.node_count() != truth.node_count())
        throw std::invalid_argument("skeleton_pr: node count mismatch");
    return set_pr(skeleton(learned), skeleton(truth));
}

std::pair<double, double> vstructure_pr(const Cpdag& learned, const Dag& truth) {
    if (learned.node_count() != truth.node_count())
        throw std::invalid_argument("vstructure_pr: node count mismatch");
    return set_pr(v_structures(learned), v_structures(truth));
}

StructuralMetrics structural_metrics(const Cpdag& learned, const Dag& truth) {
    StructuralMetrics m;
    std::tie(m.skeleton_precision, m.skeleton_recall) = skeleton_pr(learned, truth);
    std::tie(m.vstructure_precision, m.vstructure_recall) = vstructure_pr(learned, truth);
    return m;
}

nlohmann::json PcorConfig::to_json() const {
    return {{"pair_budget", pair_budget},
            {"direction_epsilon", direction_epsilon},
            {"tolerance_log_or", tolerance_log_or},
            {"inference", inference == InferenceMode::Exact ? "exact" : "monte_carlo"},
            {"mc_samples", mc_samples},
            {"seed", seed}};
}

PcorConfig PcorConfig::from_json(const nlohmann::json& j) {
    PcorConfig c;
    c.pair_budget = j.value("pair_budget", 50);
    c.direction_epsilon = j.value("direction_epsilon", 0.05);
    c.tolerance_log_or = j.value("tolerance_log_or", std::log(2.0));
    if (j.value("inference", "exact") == std::string("monte_carlo"))
        c.inference = InferenceMode::MonteCarlo;
    c.mc_samples = j.value("mc_samples", 200000);
    c.seed = j.value("seed", std::uint64_t{0});
    return c;
}

std::vector<double> interventional_dist(const DiscreteBayesNet& bn, int target, int do_var,
                                        int do_level, InferenceMode mode, int mc_samples,
                                        std::uint64_t seed) {
    if (do_var == target) throw std::invalid_argument("interventional_dist: do_var == target");
    Intervention iv{do_var, do_level};
    if (mode == InferenceMode::Exact) {
        if (elimination_width(bn, target, iv) <= kMaxEliminationWidth)
            return exact_interventional(bn, target, iv);
        mc_samples = std::max(mc_samples, 200000);  // width fallback
    }
    Rng rng = make_rng(hash_combine(hash_combine(hash_combine(seed, std::uint64_t(target)),
                                                 std::uint64_t(do_var)),
                                    std::uint64_t(do_level)));
    return monte_carlo_interventional(bn, target, iv, mc_samples, rng);
}

namespace {

double clamped_odds(double p) {
    p = std::clamp(p, 1e-9, 1.0 - 1e-9);
    return p / (1.0 - p);
}

}  // namespace

double interventional_odds_ratio(const DiscreteBayesNet& bn, int do_var, int level_a, int level_b,
                                 int outcome, int outcome_level, InferenceMode mode, int mc_samples,
                                 std::uint64_t seed) {
    auto dist_a = interventional_dist(bn, outcome, do_var, level_a, mode, mc_samples, seed);
    auto dist_b = interventional_dist(bn, outcome, do_var, level_b, mode, mc_samples, seed);
    return clamped_odds(dist_a.at(outcome_level)) / clamped_odds(dist_b.at(outcome_level));
}

DiscreteBayesNet fit_parameters(const Dag& dag, const Dataset& data, double pseudo_count) {
    if (dag.node_count() != data.num_vars())
        throw std::invalid_argument("fit_parameters: node count mismatch");
    if (pseudo_count < 0.0) throw std::invalid_argument("fit_parameters: negative pseudo count");
    DiscreteBayesNet bn;
    bn.dag = dag;
    bn.cardinalities.resize(dag.node_count());
    for (int v = 0; v < dag.node_count(); ++v) bn.cardinalities[v] = data.cardinality(v);
    bn.cpts.resize(dag.node_count());
    for (int v = 0; v < dag.node_count(); ++v) {
        Cpt& cpt = bn.cpts[v];
        cpt.parents.assign(dag.parents(v).begin(), dag.parents(v).end());
        cpt.cardinality = bn.cardinalities[v];
        ContingencyCounts counts = count_family(data, v, cpt.parents);
        const double q = counts.parent_config_count;
        if (q > 1e8) throw std::invalid_argument("fit_parameters: parent configuration space too large");
        const std::size_t rows = static_cast<std::size_t>(q);
        const double r = cpt.cardinality;
        cpt.table.assign(rows * cpt.cardinality, 0.0);
        for (std::size_t j = 0; j < rows; ++j) {
            auto it = counts.rows.find(j);
            double n_j = 0.0;
            if (it != counts.rows.end())
                for (std::uint32_t c : it->second) n_j += c;
            double* row = cpt.row(j);
            double denom = n_j + pseudo_count;
            for (int k = 0; k < cpt.cardinality; ++k) {
                double n_jk = (it != counts.rows.end()) ? it->second[k] : 0.0;
                row[k] = (denom > 0.0) ? (n_jk + pseudo_count / r) / denom : 1.0 / r;
            }
            // Exact renormalization against accumulated rounding.
            double sum = 0.0;
            for (int k = 0; k < cpt.cardinality; ++k) sum += row[k];
            for (int k = 0; k < cpt.cardinality; ++k) row[k] /= sum;
        }
    }
    return bn;
}

namespace {

// Strict-ancestor reachability matrix of the DAG.
std::vector<std::vector<char>> ancestor_matrix(const Dag& dag) {
    const int n = dag.node_count();
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    const auto order = topological_order(dag);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int v = *it;
        for (int c : dag.children(v)) {
            reach[v][c] = 1;
            for (int w = 0; w < n; ++w)
                if (reach[c][w]) reach[v][w] = 1;
        }
    }
    return reach;
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

double pcor(const DiscreteBayesNet& true_bn, const Cpdag& learned, const Dataset& data,
            const PcorConfig& config) {
    if (config.pair_budget < 1) throw std::invalid_argument("pcor: pair_budget must be >= 1");
    Dag learned_dag = cpdag_to_dag(learned);  // NoConsistentExtension propagates
    DiscreteBayesNet learned_bn = fit_parameters(learned_dag, data, 1.0);

    // Candidate pairs: do_var a strict ancestor of outcome in the true DAG.
    auto reach = ancestor_matrix(true_bn.dag);
    std::vector<std::pair<int, int>> pairs;
    const int n = true_bn.node_count();
    for (int d = 0; d < n; ++d)
        for (int o = 0; o < n; ++o)
            if (d != o && reach[d][o]) pairs.emplace_back(d, o);
    if (pairs.empty()) return 1.0;  // no real effects to get right

    if (static_cast<int>(pairs.size()) > config.pair_budget) {
        // Seeded partial Fisher-Yates over the deterministic pair list.
        Rng rng = make_rng(hash_combine(config.seed, hash_str("pcor_pairs")));
        for (int i = 0; i < config.pair_budget; ++i) {
            std::uniform_int_distribution<int> pick(i, static_cast<int>(pairs.size()) - 1);
            std::swap(pairs[i], pairs[pick(rng)]);
        }
        pairs.resize(config.pair_budget);
        std::sort(pairs.begin(), pairs.end());
    }

    std::int64_t correct = 0, total = 0;
    for (auto [do_var, outcome] : pairs) {
        const int r_do = true_bn.cardinalities[do_var];
        const int r_out = true_bn.cardinalities[outcome];
        // One distribution per intervention level and net, shared across
        // outcome levels and the reference.
        std::vector<std::vector<double>> true_dist(r_do), learned_dist(r_do);
        for (int level = 0; level < r_do; ++level) {
            true_dist[level] = interventional_dist(true_bn, outcome, do_var, level,
                                                   config.inference, config.mc_samples, config.seed);
            learned_dist[level] =
                interventional_dist(learned_bn, outcome, do_var, level, config.inference,
                                    config.mc_samples, config.seed);
        }
        for (int level = 1; level < r_do; ++level) {  // reference is level 0
            for (int k = 0; k < r_out; ++k) {
                double t = std::log(clamped_odds(true_dist[level][k]) /
                                    clamped_odds(true_dist[0][k]));
                double l = std::log(clamped_odds(learned_dist[level][k]) /
                                    clamped_odds(learned_dist[0][k]));
                bool shared_null =
                    std::abs(t) < config.direction_epsilon && std::abs(l) < config.direction_epsilon;
                bool same_direction =
                    sign_of(t) == sign_of(l) && std::abs(t - l) <= config.tolerance_log_or;
                if (shared_null || same_direction) ++correct;
                ++total;
            }
        }
    }
    if (total == 0) return 1.0;
    return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace causalsheet
