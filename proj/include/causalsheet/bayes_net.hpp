#pragma once

#include <cstddef>
#include <vector>

#include "causalsheet/dataset.hpp"
#include "causalsheet/graph.hpp"
#include "json.hpp"

namespace causalsheet {

// Maps a joint assignment of the parent variables to a row index.
// Parents are kept in ascending variable order; the last parent varies fastest.
struct ParentIndexer {
    std::vector<int> parents;
    std::vector<std::size_t> strides;
    std::size_t config_count = 1;

    ParentIndexer() = default;
    ParentIndexer(std::vector<int> parent_vars, const std::vector<int>& cardinalities);

    template <typename ValueOf>  // ValueOf: (int var) -> int level
    std::size_t row(ValueOf&& value_of) const {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < parents.size(); ++i)
            idx += static_cast<std::size_t>(value_of(parents[i])) * strides[i];
        return idx;
    }
};

// Conditional probability table: one probability row per parent configuration.
struct Cpt {
    std::vector<int> parents;    // ascending
    int cardinality = 2;
    std::vector<double> table;   // config_count * cardinality, row-major

    std::size_t row_count() const { return table.size() / cardinality; }
    const double* row(std::size_t config) const { return table.data() + config * cardinality; }
    double* row(std::size_t config) { return table.data() + config * cardinality; }
};

struct DiscreteBayesNet {
    Dag dag;
    std::vector<int> cardinalities;
    std::vector<Cpt> cpts;  // indexed by node

    int node_count() const { return dag.node_count(); }
    void validate() const;  // throws std::invalid_argument

    // Exact marginals of every node by variable elimination.
    std::vector<std::vector<double>> marginals() const;

    nlohmann::json to_json() const;
    static DiscreteBayesNet from_json(const nlohmann::json& j);
};

}  // namespace causalsheet
