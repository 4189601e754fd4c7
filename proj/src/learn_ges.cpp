#include <algorithm>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>
#include <vector>

#include "causalsheet/errors.hpp"
#include "causalsheet/learn.hpp"

namespace causalsheet {

namespace {

constexpr double kMinImprovement = 1e-9;

std::vector<int> sorted_union(const std::set<int>& a, const std::vector<int>& b) {
    std::set<int> s = a;
    s.insert(b.begin(), b.end());
    return {s.begin(), s.end()};
}

bool is_clique(const Cpdag& g, const std::vector<int>& nodes) {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t k = i + 1; k < nodes.size(); ++k)
            if (!g.adjacent(nodes[i], nodes[k])) return false;
    return true;
}

// True if every semi-directed path from `from` to `to` passes through `blocked`.
bool all_paths_blocked(const Cpdag& g, int from, int to, const std::set<int>& blocked) {
    if (blocked.count(from)) return true;
    std::vector<char> seen(g.node_count(), 0);
    std::queue<int> q;
    q.push(from);
    seen[from] = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        auto step = [&](int w) {
            if (w == to) return true;
            if (!seen[w] && !blocked.count(w)) {
                seen[w] = 1;
                q.push(w);
            }
            return false;
        };
        for (int w : g.children(v))
            if (step(w)) return false;
        for (int w : g.neighbors(v))
            if (step(w)) return false;
    }
    return true;
}

// Neighbors of y that are adjacent to x (Chickering's NA set).
std::vector<int> na_set(const Cpdag& g, int y, int x) {
    std::vector<int> out;
    for (int w : g.neighbors(y))
        if (g.adjacent(w, x)) out.push_back(w);
    return out;
}

// Enumerate subsets of pool in lexicographic order, smallest first. Pools
// beyond kMaxPool elements are truncated to pair subsets to bound the scan.
template <typename Fn>
void for_each_pool_subset(const std::vector<int>& pool, Fn&& fn) {
    constexpr int kMaxPool = 12;
    const int n = static_cast<int>(pool.size());
    if (n <= kMaxPool) {
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            std::vector<int> subset;
            for (int i = 0; i < n; ++i)
                if (mask & (1u << i)) subset.push_back(pool[i]);
            fn(subset);
        }
        return;
    }
    fn({});
    for (int i = 0; i < n; ++i) {
        fn({pool[i]});
        for (int k = i + 1; k < n; ++k) fn({pool[i], pool[k]});
    }
}

struct Move {
    double delta = -std::numeric_limits<double>::infinity();
    int x = -1, y = -1;
    std::vector<int> subset;  // T for insert, H for delete
    bool valid() const { return x >= 0; }
};

void rebuild_cpdag(Cpdag& g) {
    Dag extension = cpdag_to_dag(g);
    g = dag_to_cpdag(extension);
}

}  // namespace

Cpdag learn_ges(const Dataset& data, const LearnerConfig& config) {
    const int n = data.num_vars();
    if (n < 2) throw std::invalid_argument("learn_ges: need at least 2 variables");
    Deadline deadline(config.time_budget_seconds);
    BdeuScorer scorer(data, config.score);
    Cpdag g(n, data.variable_names);

    // Forward phase: best valid insertion until no improvement.
    while (true) {
        deadline.check("ges forward");
        Move best;
        for (int x = 0; x < n; ++x) {
            for (int y = 0; y < n; ++y) {
                if (x == y || g.adjacent(x, y)) continue;
                const std::vector<int> na = na_set(g, y, x);
                std::vector<int> pool;
                for (int w : g.neighbors(y))
                    if (!g.adjacent(w, x)) pool.push_back(w);
                for_each_pool_subset(pool, [&](const std::vector<int>& t) {
                    std::vector<int> clique_nodes = na;
                    clique_nodes.insert(clique_nodes.end(), t.begin(), t.end());
                    if (!is_clique(g, clique_nodes)) return;
                    std::set<int> blocked(clique_nodes.begin(), clique_nodes.end());
                    if (!all_paths_blocked(g, y, x, blocked)) return;
                    std::vector<int> base = sorted_union(g.parents(y), clique_nodes);
                    std::vector<int> with_x = base;
                    with_x.insert(std::lower_bound(with_x.begin(), with_x.end(), x), x);
                    double delta = scorer.local(y, with_x) - scorer.local(y, base);
                    if (delta > best.delta + kMinImprovement ||
                        (!best.valid() && delta > kMinImprovement)) {
                        if (delta > kMinImprovement) best = {delta, x, y, t};
                    }
                });
            }
        }
        if (!best.valid()) break;
        g.add_directed(best.x, best.y);
        for (int t : best.subset) g.orient(t, best.y);
        rebuild_cpdag(g);
    }

    // Backward phase: best valid deletion until no improvement.
    while (true) {
        deadline.check("ges backward");
        Move best;
        for (int x = 0; x < n; ++x) {
            for (int y = 0; y < n; ++y) {
                if (x == y) continue;
                if (!g.has_directed(x, y) && !g.has_undirected(x, y)) continue;
                const std::vector<int> na = na_set(g, y, x);
                for_each_pool_subset(na, [&](const std::vector<int>& h) {
                    std::vector<int> remaining;
                    std::set_difference(na.begin(), na.end(), h.begin(), h.end(),
                                        std::back_inserter(remaining));
                    if (!is_clique(g, remaining)) return;
                    std::set<int> family(g.parents(y).begin(), g.parents(y).end());
                    family.insert(x);  // x scored as a parent whether edge directed or not
                    family.insert(remaining.begin(), remaining.end());
                    std::vector<int> before(family.begin(), family.end());
                    family.erase(x);
                    std::vector<int> after(family.begin(), family.end());
                    double delta = scorer.local(y, after) - scorer.local(y, before);
                    if (delta > best.delta + kMinImprovement ||
                        (!best.valid() && delta > kMinImprovement)) {
                        if (delta > kMinImprovement) best = {delta, x, y, h};
                    }
                });
            }
        }
        if (!best.valid()) break;
        if (g.has_directed(best.x, best.y))
            g.remove_directed(best.x, best.y);
        else
            g.remove_undirected(best.x, best.y);
        for (int h : best.subset) {
            if (g.has_undirected(best.y, h)) g.orient(best.y, h);
            if (g.has_undirected(best.x, h)) g.orient(best.x, h);
        }
        rebuild_cpdag(g);
    }
    return g;
}

}  // namespace causalsheet
