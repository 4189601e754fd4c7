#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "causalsheet/bayes_net.hpp"
#include "causalsheet/rng.hpp"

namespace causalsheet {

// Table over a sorted scope of variables, row-major with the last scope
// variable varying fastest.
struct Factor {
    std::vector<int> scope;   // ascending variable ids
    std::vector<int> cards;   // cardinalities aligned with scope
    std::vector<double> values;

    static Factor from_cpt(const DiscreteBayesNet& bn, int node);
    Factor multiply(const Factor& other) const;
    Factor marginalize(int var) const;
    Factor reduce(int var, int level) const;
    std::size_t size() const { return values.size(); }
};

struct Intervention {
    int var;
    int level;
};

// P(target | do(intervention)) by graph surgery + variable elimination with a
// min-degree ordering, restricted to the ancestors of target in the surgered
// graph. Returns a normalized vector of length cardinality(target).
std::vector<double> exact_interventional(const DiscreteBayesNet& bn, int target,
                                         std::optional<Intervention> intervention);

inline std::vector<double> exact_marginal(const DiscreteBayesNet& bn, int target) {
    return exact_interventional(bn, target, std::nullopt);
}

// Induced width of the elimination run exact_interventional would perform;
// used to decide when to fall back to Monte Carlo.
int elimination_width(const DiscreteBayesNet& bn, int target, std::optional<Intervention> intervention);

// Ancestral sampling with the intervened variable clamped; normalized by
// construction.
std::vector<double> monte_carlo_interventional(const DiscreteBayesNet& bn, int target,
                                               std::optional<Intervention> intervention,
                                               int num_samples, Rng& rng);

}  // namespace causalsheet
