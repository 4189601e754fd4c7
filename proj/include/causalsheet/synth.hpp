#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "causalsheet/bayes_net.hpp"
#include "causalsheet/dataset.hpp"
#include "causalsheet/graph.hpp"
#include "causalsheet/rng.hpp"
#include "json.hpp"

namespace causalsheet {

enum class StructureType { ForestFire, PreferentialAttachment, IcDag };

std::string to_string(StructureType t);
StructureType structure_type_from_string(const std::string& s);

struct SynthesisConfig {
    int num_variables = 10;
    StructureType structure_type = StructureType::PreferentialAttachment;
    int complexity = 1;       // target edges-per-node ratio
    double alpha = 1.0;       // total Dirichlet concentration per CPT row
    int avg_levels = 3;
    int num_samples = 1000;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
    static SynthesisConfig from_json(const nlohmann::json& j);
    bool operator==(const SynthesisConfig&) const = default;
};

// Generator in-degree cap. Unbounded attachment produces hub nodes whose CPTs
// cannot be materialized (row count is the product of parent cardinalities).
inline constexpr int kGeneratorMaxInDegree = 6;

// Edge-count band: within +/-15% of complexity * num_variables, clamped to the
// densest possible DAG. Throws CalibrationFailed after 50 attempts.
Dag gen_dag(StructureType type, int num_variables, int complexity, Rng& rng);

// Cardinalities from {avg_levels-1, avg_levels, avg_levels+1} clipped at 2,
// with outliers re-drawn until the mean lands within +/-0.25 of avg_levels.
std::vector<int> assign_levels(int num_variables, int avg_levels, Rng& rng);

// Every CPT row drawn from a symmetric Dirichlet with per-component
// concentration alpha / cardinality (total concentration alpha).
DiscreteBayesNet parameterize(const Dag& dag, const std::vector<int>& cardinalities, double alpha,
                              Rng& rng);

// Ancestral sampling in topological order; level labels are "0".."r-1".
Dataset forward_sample(const DiscreteBayesNet& bn, int num_samples, Rng& rng);

struct SynthResult {
    DiscreteBayesNet net;
    Dataset data;
};

// Full pipeline with substreams derived from config.seed, so each stage is
// reproducible in isolation.
SynthResult synthesize(const SynthesisConfig& config);

}  // namespace causalsheet
