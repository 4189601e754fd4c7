#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

#include "causalsheet/errors.hpp"
#include "causalsheet/learn.hpp"

namespace causalsheet {

namespace {

// Max p-value of x vs t over conditioning subsets of cpc (up to max_size).
// This is the "min association": the weakest evidence any subset produces.
// InsufficientData counts as independence (p = 1).
double max_p_value(const G2Tester& tester, int x, int t, const std::vector<int>& cpc,
                   int max_size, const Deadline& deadline) {
    double worst = 0.0;
    const int n = static_cast<int>(cpc.size());
    const int cap = std::min(max_size, n);
    std::vector<int> subset;
    // Iterative subset enumeration by size.
    for (int size = 0; size <= cap && worst <= 1.0; ++size) {
        std::vector<int> idx(size);
        for (int i = 0; i < size; ++i) idx[i] = i;
        bool more = true;
        while (more) {
            deadline.check("mmpc");
            subset.clear();
            for (int i : idx) subset.push_back(cpc[i]);
            double p;
            try {
                p = tester.test(x, t, subset).p_value;
            } catch (const InsufficientData&) {
                p = 1.0;
            }
            worst = std::max(worst, p);
            if (worst >= 1.0) return worst;
            if (size == 0) break;
            int i = size - 1;
            while (i >= 0 && idx[i] == n - size + i) --i;
            if (i < 0)
                more = false;
            else {
                ++idx[i];
                for (int k = i + 1; k < size; ++k) idx[k] = idx[k - 1] + 1;
            }
        }
    }
    return worst;
}

// Max-min parents-and-children discovery for one target.
std::vector<int> mmpc_one(const G2Tester& tester, int t, int n, const LearnerConfig& config,
                          const Deadline& deadline) {
    std::vector<int> cpc;
    std::set<int> excluded;  // candidates independent given some tested subset
    while (true) {
        int best = -1;
        double best_p = std::numeric_limits<double>::infinity();
        for (int x = 0; x < n; ++x) {
            if (x == t || excluded.count(x)) continue;
            if (std::find(cpc.begin(), cpc.end(), x) != cpc.end()) continue;
            double p = max_p_value(tester, x, t, cpc, config.max_conditioning_size, deadline);
            if (p > config.significance) {
                excluded.insert(x);
                continue;
            }
            if (p < best_p) {
                best_p = p;
                best = x;
            }
        }
        if (best < 0) break;
        cpc.push_back(best);
        std::sort(cpc.begin(), cpc.end());
    }
    // Backward pass: drop members separable given the rest.
    for (std::size_t i = 0; i < cpc.size();) {
        std::vector<int> rest = cpc;
        rest.erase(rest.begin() + i);
        double p = max_p_value(tester, cpc[i], t, rest, config.max_conditioning_size, deadline);
        if (p > config.significance)
            cpc.erase(cpc.begin() + i);
        else
            ++i;
    }
    return cpc;
}

}  // namespace

Cpdag learn_mmhc(const Dataset& data, const LearnerConfig& config) {
    const int n = data.num_vars();
    if (n < 2) throw std::invalid_argument("learn_mmhc: need at least 2 variables");
    Deadline deadline(config.time_budget_seconds);
    G2Tester tester(data, config.significance);
    BdeuScorer scorer(data, config.score);

    // MMPC with symmetric correction.
    std::vector<std::set<int>> pc(n);
    {
        std::vector<std::vector<int>> raw(n);
        for (int t = 0; t < n; ++t) raw[t] = mmpc_one(tester, t, n, config, deadline);
        for (int t = 0; t < n; ++t)
            for (int x : raw[t])
                if (std::find(raw[x].begin(), raw[x].end(), t) != raw[x].end()) pc[t].insert(x);
    }

    // Greedy hill climb restricted to MMPC-permitted adjacencies.
    Dag dag(n, data.variable_names);
    auto add_delta = [&](int u, int v) {
        std::vector<int> before(dag.parents(v).begin(), dag.parents(v).end());
        std::vector<int> after = before;
        after.insert(std::lower_bound(after.begin(), after.end(), u), u);
        return scorer.local(v, after) - scorer.local(v, before);
    };
    auto remove_delta = [&](int u, int v) {
        std::vector<int> before(dag.parents(v).begin(), dag.parents(v).end());
        std::vector<int> after = before;
        after.erase(std::find(after.begin(), after.end(), u));
        return scorer.local(v, after) - scorer.local(v, before);
    };

    constexpr double kMinImprovement = 1e-9;
    enum class Kind { Add, Remove, Reverse };
    while (true) {
        deadline.check("mmhc hill climb");
        double best_delta = kMinImprovement;
        Kind best_kind = Kind::Add;
        int best_u = -1, best_v = -1;
        auto consider = [&](Kind kind, int u, int v, double delta) {
            if (delta > best_delta + kMinImprovement || (best_u < 0 && delta > kMinImprovement)) {
                best_delta = delta;
                best_kind = kind;
                best_u = u;
                best_v = v;
            }
        };
        for (int u = 0; u < n; ++u)
            for (int v : pc[u]) {
                if (dag.has_edge(u, v) || dag.has_edge(v, u)) continue;
                if (static_cast<int>(dag.parents(v).size()) >= config.max_parents) continue;
                if (dag.reachable(v, u)) continue;  // would close a cycle
                consider(Kind::Add, u, v, add_delta(u, v));
            }
        for (auto [u, v] : dag.edges()) consider(Kind::Remove, u, v, remove_delta(u, v));
        for (auto [u, v] : dag.edges()) {
            if (static_cast<int>(dag.parents(u).size()) >= config.max_parents) continue;
            dag.remove_edge(u, v);
            bool cycle = dag.reachable(u, v);
            dag.add_edge(u, v);
            if (cycle) continue;
            consider(Kind::Reverse, u, v, remove_delta(u, v) + add_delta(v, u));
        }
        if (best_u < 0) break;
        switch (best_kind) {
            case Kind::Add: dag.add_edge(best_u, best_v); break;
            case Kind::Remove: dag.remove_edge(best_u, best_v); break;
            case Kind::Reverse:
                dag.remove_edge(best_u, best_v);
                dag.add_edge(best_v, best_u);
                break;
        }
    }
    return dag_to_cpdag(dag);
}

}  // namespace causalsheet
