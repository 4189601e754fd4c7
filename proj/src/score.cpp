#include "causalsheet/score.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

#include "causalsheet/errors.hpp"

namespace causalsheet {

std::uint32_t ContingencyCounts::row_total(const std::vector<std::uint32_t>& row) const {
    std::uint32_t total = 0;
    for (std::uint32_t c : row) total += c;
    return total;
}

ContingencyCounts count_family(const Dataset& data, int child, const std::vector<int>& parents) {
    for (int p : parents)
        if (p == child) throw std::invalid_argument("count_family: child in parent set");
    ContingencyCounts counts;
    counts.child_cardinality = data.cardinality(child);
    counts.parent_config_count = 1.0;
    std::vector<std::uint64_t> strides(parents.size());
    std::uint64_t acc = 1;
    for (std::size_t i = parents.size(); i-- > 0;) {
        strides[i] = acc;
        acc *= static_cast<std::uint64_t>(data.cardinality(parents[i]));
        counts.parent_config_count *= data.cardinality(parents[i]);
    }
    const auto& child_col = data.columns.at(child);
    const int rows = data.num_rows();
    for (int r = 0; r < rows; ++r) {
        std::uint64_t config = 0;
        for (std::size_t i = 0; i < parents.size(); ++i)
            config += static_cast<std::uint64_t>(data.columns[parents[i]][r]) * strides[i];
        auto& row = counts.rows[config];
        if (row.empty()) row.assign(counts.child_cardinality, 0);
        ++row[child_col[r]];
    }
    return counts;
}

namespace {

double bdeu_from_counts(const ContingencyCounts& counts, double ess) {
    const double q = counts.parent_config_count;
    const double r = counts.child_cardinality;
    const double alpha_j = ess / q;
    const double alpha_jk = ess / (q * r);
    double score = 0.0;
    for (const auto& [config, row] : counts.rows) {
        std::uint32_t n_j = 0;
        for (std::uint32_t n : row) n_j += n;
        if (n_j == 0) continue;
        score += std::lgamma(alpha_j) - std::lgamma(alpha_j + n_j);
        for (std::uint32_t n : row) {
            if (n == 0) continue;
            score += std::lgamma(alpha_jk + n) - std::lgamma(alpha_jk);
        }
    }
    return score;
}

std::string family_key(int child, const std::vector<int>& parents) {
    std::string key = std::to_string(child) + ":";
    for (int p : parents) {
        key += std::to_string(p);
        key += ',';
    }
    return key;
}

}  // namespace

double local_bdeu(const Dataset& data, int child, const std::vector<int>& parents,
                  const ScoreConfig& config) {
    if (!(config.equivalent_sample_size > 0.0))
        throw std::invalid_argument("local_bdeu: equivalent_sample_size must be positive");
    return bdeu_from_counts(count_family(data, child, parents), config.equivalent_sample_size);
}

double network_bdeu(const Dataset& data, const Dag& dag, const ScoreConfig& config) {
    if (dag.node_count() != data.num_vars())
        throw std::invalid_argument("network_bdeu: node count mismatch");
    double total = 0.0;
    for (int v = 0; v < dag.node_count(); ++v) {
        std::vector<int> parents(dag.parents(v).begin(), dag.parents(v).end());
        total += local_bdeu(data, v, parents, config);
    }
    return total;
}

G2Result g2_test(const Dataset& data, int x, int y, const std::vector<int>& conditioning_set,
                 double significance) {
    if (x == y) throw std::invalid_argument("g2_test: x == y");
    for (int z : conditioning_set)
        if (z == x || z == y) throw std::invalid_argument("g2_test: conditioning set overlaps pair");

    const int rx = data.cardinality(x);
    const int ry = data.cardinality(y);
    double cells = static_cast<double>(rx) * ry;
    for (int z : conditioning_set) cells *= data.cardinality(z);
    const int n = data.num_rows();
    if (static_cast<double>(n) / cells < 5.0)
        throw InsufficientData("g2_test: fewer than 5 samples per cell on average");

    // Stratified counts: conditioning config -> rx*ry table.
    std::vector<std::uint64_t> strides(conditioning_set.size());
    std::uint64_t acc = 1;
    for (std::size_t i = conditioning_set.size(); i-- > 0;) {
        strides[i] = acc;
        acc *= static_cast<std::uint64_t>(data.cardinality(conditioning_set[i]));
    }
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> strata;
    const auto& col_x = data.columns.at(x);
    const auto& col_y = data.columns.at(y);
    for (int r = 0; r < n; ++r) {
        std::uint64_t config = 0;
        for (std::size_t i = 0; i < conditioning_set.size(); ++i)
            config += static_cast<std::uint64_t>(data.columns[conditioning_set[i]][r]) * strides[i];
        auto& table = strata[config];
        if (table.empty()) table.assign(static_cast<std::size_t>(rx) * ry, 0);
        ++table[static_cast<std::size_t>(col_x[r]) * ry + col_y[r]];
    }

    G2Result result;
    double full_strata = 1.0;
    for (int z : conditioning_set) full_strata *= data.cardinality(z);
    double nonzero_strata = 0.0;
    for (const auto& [config, table] : strata) {
        std::uint64_t total = 0;
        std::vector<std::uint64_t> row_sum(rx, 0), col_sum(ry, 0);
        for (int i = 0; i < rx; ++i)
            for (int j = 0; j < ry; ++j) {
                std::uint32_t o = table[static_cast<std::size_t>(i) * ry + j];
                row_sum[i] += o;
                col_sum[j] += o;
                total += o;
            }
        if (total == 0) continue;
        nonzero_strata += 1.0;
        for (int i = 0; i < rx; ++i)
            for (int j = 0; j < ry; ++j) {
                std::uint32_t o = table[static_cast<std::size_t>(i) * ry + j];
                if (o == 0) continue;  // 0 * ln 0 := 0
                double expected = static_cast<double>(row_sum[i]) * col_sum[j] / total;
                result.statistic += 2.0 * o * std::log(o / expected);
            }
    }
    // Empty strata are skipped; their df is subtracted from the full table's.
    result.degrees_of_freedom = static_cast<double>(rx - 1) * (ry - 1) * nonzero_strata;
    if (result.degrees_of_freedom <= 0.0 || result.statistic <= 0.0) {
        result.statistic = std::max(result.statistic, 0.0);
        result.p_value = 1.0;
    } else {
        boost::math::chi_squared dist(result.degrees_of_freedom);
        result.p_value = boost::math::cdf(boost::math::complement(dist, result.statistic));
    }
    result.independent = result.p_value > significance;
    return result;
}

// ---------------------------------------------------------------- wrappers

BdeuScorer::BdeuScorer(const Dataset& data, ScoreConfig config) : data_(data), config_(config) {}

double BdeuScorer::local(int child, const std::vector<int>& parents) const {
    std::vector<int> sorted = parents;
    std::sort(sorted.begin(), sorted.end());
    std::string key = family_key(child, sorted);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    double score = local_bdeu(data_, child, sorted, config_);
    cache_.emplace(std::move(key), score);
    return score;
}

double BdeuScorer::network(const Dag& dag) const {
    double total = 0.0;
    for (int v = 0; v < dag.node_count(); ++v)
        total += local(v, {dag.parents(v).begin(), dag.parents(v).end()});
    return total;
}

G2Tester::G2Tester(const Dataset& data, double significance)
    : data_(data), significance_(significance) {}

G2Result G2Tester::test(int x, int y, const std::vector<int>& conditioning_set) const {
    std::vector<int> sorted = conditioning_set;
    std::sort(sorted.begin(), sorted.end());
    std::string key = family_key(std::min(x, y) * 100000 + std::max(x, y), sorted);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    G2Result result = g2_test(data_, x, y, sorted, significance_);
    cache_.emplace(std::move(key), result);
    return result;
}

bool G2Tester::independent(int x, int y, const std::vector<int>& conditioning_set) const {
    try {
        return test(x, y, conditioning_set).independent;
    } catch (const InsufficientData&) {
        ++insufficient_events_;
        return true;
    }
}

}  // namespace causalsheet
