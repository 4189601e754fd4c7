#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "causalsheet/bayes_net.hpp"
#include "causalsheet/dataset.hpp"
#include "causalsheet/graph.hpp"
#include "json.hpp"

namespace causalsheet {

struct StructuralMetrics {
    double skeleton_precision = 0.0;
    double skeleton_recall = 0.0;
    double vstructure_precision = 0.0;
    double vstructure_recall = 0.0;

    nlohmann::json to_json() const;
    static StructuralMetrics from_json(const nlohmann::json& j);
    bool operator==(const StructuralMetrics&) const = default;
};

// Precision/recall conventions: an empty prediction has precision 1 ("no
// claims, no false claims"); an empty truth has recall 1.
std::pair<double, double> skeleton_pr(const Cpdag& learned, const Dag& truth);
std::pair<double, double> vstructure_pr(const Cpdag& learned, const Dag& truth);
StructuralMetrics structural_metrics(const Cpdag& learned, const Dag& truth);

enum class InferenceMode { Exact, MonteCarlo };

struct PcorConfig {
    int pair_budget = 50;
    double direction_epsilon = 0.05;      // |ln OR| below this is a null effect
    double tolerance_log_or = std::log(2.0);
    InferenceMode inference = InferenceMode::Exact;
    int mc_samples = 200000;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
    static PcorConfig from_json(const nlohmann::json& j);
};

// Elimination width beyond which exact inference falls back to Monte Carlo.
inline constexpr int kMaxEliminationWidth = 20;

// P(target | do(do_var = do_level)) with graph surgery. Exact mode uses
// variable elimination, falling back to Monte Carlo (200k samples) when the
// elimination width exceeds kMaxEliminationWidth.
std::vector<double> interventional_dist(const DiscreteBayesNet& bn, int target, int do_var,
                                        int do_level,
                                        InferenceMode mode = InferenceMode::Exact,
                                        int mc_samples = 200000, std::uint64_t seed = 0);

// Odds of outcome = outcome_level under do(do_var = level_a) over the same
// odds under do(do_var = level_b); probabilities clamped to [1e-9, 1 - 1e-9].
double interventional_odds_ratio(const DiscreteBayesNet& bn, int do_var, int level_a, int level_b,
                                 int outcome, int outcome_level,
                                 InferenceMode mode = InferenceMode::Exact,
                                 int mc_samples = 200000, std::uint64_t seed = 0);

// Bayesian CPT estimation: (N_ijk + pseudo_count/r) / (N_ij + pseudo_count).
DiscreteBayesNet fit_parameters(const Dag& dag, const Dataset& data, double pseudo_count);

// Proportion of correct interventional odds ratios. Candidate pairs are the
// ordered (do_var, outcome) pairs where do_var is a strict ancestor of outcome
// in the true DAG (capped at pair_budget by a seeded subsample); vacuously 1
// when the true DAG has no such pair. Throws NoConsistentExtension when the
// learned CPDAG admits no extension.
double pcor(const DiscreteBayesNet& true_bn, const Cpdag& learned, const Dataset& data,
            const PcorConfig& config);

}  // namespace causalsheet
