#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "causalsheet/dataset.hpp"
#include "causalsheet/graph.hpp"

namespace causalsheet {

struct ScoreConfig {
    double equivalent_sample_size = 1.0;
};

// Sufficient statistics for one (child, parent set) family. Rows are indexed
// by parent configuration; only observed configurations are stored.
struct ContingencyCounts {
    int child_cardinality = 0;
    double parent_config_count = 0;  // q as a real; may overflow integers for huge parent sets
    // observed parent config -> child-level counts
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> rows;

    std::uint32_t row_total(const std::vector<std::uint32_t>& row) const;
};

ContingencyCounts count_family(const Dataset& data, int child, const std::vector<int>& parents);

double local_bdeu(const Dataset& data, int child, const std::vector<int>& parents,
                  const ScoreConfig& config);
double network_bdeu(const Dataset& data, const Dag& dag, const ScoreConfig& config);

struct G2Result {
    double statistic = 0.0;
    double degrees_of_freedom = 0.0;
    double p_value = 1.0;
    bool independent = true;
};

// Conditional independence test on the stratified contingency table. Throws
// InsufficientData when the dataset averages fewer than 5 samples per cell.
G2Result g2_test(const Dataset& data, int x, int y, const std::vector<int>& conditioning_set,
                 double significance);

// Memoizing wrapper used by the learners; one instance per run.
class BdeuScorer {
public:
    BdeuScorer(const Dataset& data, ScoreConfig config);

    double local(int child, const std::vector<int>& parents) const;
    double network(const Dag& dag) const;

private:
    const Dataset& data_;
    ScoreConfig config_;
    mutable std::unordered_map<std::string, double> cache_;
};

class G2Tester {
public:
    G2Tester(const Dataset& data, double significance);

    // Treats InsufficientData as "independent by default" and counts the event.
    bool independent(int x, int y, const std::vector<int>& conditioning_set) const;
    G2Result test(int x, int y, const std::vector<int>& conditioning_set) const;
    int insufficient_data_events() const { return insufficient_events_; }

private:
    const Dataset& data_;
    double significance_;
    mutable int insufficient_events_ = 0;
    mutable std::unordered_map<std::string, G2Result> cache_;
};

}  // namespace causalsheet
