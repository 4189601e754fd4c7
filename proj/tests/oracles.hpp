// Test-side oracles, independent of the library implementation paths they
// check: brute-force DAG enumeration, full-joint inference, a naive G^2, and
// an arbitrary-precision BDeu evaluator.
#pragma once

#include <gmp.h>
#include <mpfr.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "causalsheet/bayes_net.hpp"
#include "causalsheet/graph.hpp"

namespace oracles {

using causalsheet::Dag;
using causalsheet::DiscreteBayesNet;
using causalsheet::EdgeKey;
using causalsheet::VStructure;

// All labeled DAGs on n nodes (n <= 5 stays tractable: 29,281 DAGs at n = 5).
// Each unordered pair is absent, forward, or backward; acyclic combos kept.
inline std::vector<Dag> all_dags(int n) {
    std::vector<std::pair<int, int>> pairs;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
    std::uint64_t combos = 1;
    for (std::size_t i = 0; i < pairs.size(); ++i) combos *= 3;
    std::vector<Dag> out;
    for (std::uint64_t code = 0; code < combos; ++code) {
        Dag dag(n);
        std::uint64_t rem = code;
        bool ok = true;
        for (const auto& [u, v] : pairs) {
            int state = static_cast<int>(rem % 3);
            rem /= 3;
            if (!ok || state == 0) continue;
            int from = state == 1 ? u : v;
            int to = state == 1 ? v : u;
            if (dag.reachable(to, from))
                ok = false;
            else
                dag.add_edge(from, to);
        }
        if (ok) out.push_back(std::move(dag));
    }
    return out;
}

// Markov equivalence class key: (skeleton, v-structures).
inline std::pair<std::set<EdgeKey>, std::set<VStructure>> class_key(const Dag& dag) {
    return {causalsheet::skeleton(dag), causalsheet::v_structures(dag)};
}

// Groups DAGs into Markov equivalence classes.
inline std::map<std::pair<std::set<EdgeKey>, std::set<VStructure>>, std::vector<std::size_t>>
group_by_class(const std::vector<Dag>& dags) {
    std::map<std::pair<std::set<EdgeKey>, std::set<VStructure>>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < dags.size(); ++i) groups[class_key(dags[i])].push_back(i);
    return groups;
}

// Full-joint interventional distribution by enumerating every configuration.
inline std::vector<double> joint_interventional(const DiscreteBayesNet& bn, int target, int do_var,
                                                int do_level) {
    const int n = bn.node_count();
    std::vector<int> assign(n, 0);
    std::vector<double> dist(bn.cardinalities[target], 0.0);
    while (true) {
        if (do_var < 0 || assign[do_var] == do_level) {
            double p = 1.0;
            for (int v = 0; v < n; ++v) {
                if (v == do_var) continue;  // surgery removes its factor
                causalsheet::ParentIndexer idx(bn.cpts[v].parents, bn.cardinalities);
                std::size_t config = idx.row([&](int u) { return assign[u]; });
                p *= bn.cpts[v].row(config)[assign[v]];
            }
            dist[assign[target]] += p;
        }
        int i = n - 1;
        while (i >= 0 && assign[i] == bn.cardinalities[i] - 1) assign[i--] = 0;
        if (i < 0) break;
        ++assign[i];
    }
    double sum = 0.0;
    for (double p : dist) sum += p;
    for (double& p : dist) p /= sum;
    return dist;
}

inline std::vector<double> joint_marginal(const DiscreteBayesNet& bn, int target) {
    return joint_interventional(bn, target, -1, 0);
}

// BDeu local score at 256-bit precision straight from the Gamma formula.
// counts: parent config -> child-level counts; q = parent config count.
inline double bdeu_mpfr(const std::vector<std::vector<unsigned>>& counts, double q, int r,
                        double ess) {
    const mpfr_prec_t prec = 256;
    mpfr_t score, alpha_j, alpha_jk, tmp, arg;
    mpfr_inits2(prec, score, alpha_j, alpha_jk, tmp, arg, (mpfr_ptr) nullptr);
    mpfr_set_d(score, 0.0, MPFR_RNDN);
    mpfr_set_d(alpha_j, ess, MPFR_RNDN);
    mpfr_div_d(alpha_j, alpha_j, q, MPFR_RNDN);
    mpfr_div_si(alpha_jk, alpha_j, r, MPFR_RNDN);
    for (const auto& row : counts) {
        unsigned n_j = 0;
        for (unsigned c : row) n_j += c;
        if (n_j == 0) continue;
        mpfr_lngamma(tmp, alpha_j, MPFR_RNDN);
        mpfr_add(score, score, tmp, MPFR_RNDN);
        mpfr_add_ui(arg, alpha_j, n_j, MPFR_RNDN);
        mpfr_lngamma(tmp, arg, MPFR_RNDN);
        mpfr_sub(score, score, tmp, MPFR_RNDN);
        for (unsigned c : row) {
            if (c == 0) continue;
            mpfr_add_ui(arg, alpha_jk, c, MPFR_RNDN);
            mpfr_lngamma(tmp, arg, MPFR_RNDN);
            mpfr_add(score, score, tmp, MPFR_RNDN);
            mpfr_lngamma(tmp, alpha_jk, MPFR_RNDN);
            mpfr_sub(score, score, tmp, MPFR_RNDN);
        }
    }
    double out = mpfr_get_d(score, MPFR_RNDN);
    mpfr_clears(score, alpha_j, alpha_jk, tmp, arg, (mpfr_ptr) nullptr);
    return out;
}

// Naive stratified G^2 with explicit triple loops over dense tables.
// tables: one rx*ry count table per conditioning stratum.
inline double g2_naive(const std::vector<std::vector<std::vector<unsigned>>>& tables) {
    double g2 = 0.0;
    for (const auto& table : tables) {
        const std::size_t rx = table.size();
        if (rx == 0) continue;
        const std::size_t ry = table[0].size();
        double total = 0.0;
        std::vector<double> row_sum(rx, 0.0), col_sum(ry, 0.0);
        for (std::size_t i = 0; i < rx; ++i)
            for (std::size_t j = 0; j < ry; ++j) {
                row_sum[i] += table[i][j];
                col_sum[j] += table[i][j];
                total += table[i][j];
            }
        if (total == 0.0) continue;
        for (std::size_t i = 0; i < rx; ++i)
            for (std::size_t j = 0; j < ry; ++j) {
                double o = table[i][j];
                if (o == 0.0) continue;
                double e = row_sum[i] * col_sum[j] / total;
                g2 += 2.0 * o * std::log(o / e);
            }
    }
    return g2;
}

}  // namespace oracles
