#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "causalsheet/errors.hpp"
#include "causalsheet/learn.hpp"

namespace causalsheet {

namespace {

// Subsets of `pool` of the given size, in lexicographic order.
template <typename Fn>
bool for_each_subset(const std::vector<int>& pool, int size, Fn&& fn) {
    if (size == 0) return fn(std::vector<int>{});
    if (size > static_cast<int>(pool.size())) return false;
    std::vector<int> idx(size);
    for (int i = 0; i < size; ++i) idx[i] = i;
    while (true) {
        std::vector<int> subset(size);
        for (int i = 0; i < size; ++i) subset[i] = pool[idx[i]];
        if (fn(subset)) return true;
        int i = size - 1;
        while (i >= 0 && idx[i] == static_cast<int>(pool.size()) - size + i) --i;
        if (i < 0) return false;
        ++idx[i];
        for (int k = i + 1; k < size; ++k) idx[k] = idx[k - 1] + 1;
    }
}

}  // namespace

Cpdag learn_pc(const Dataset& data, const LearnerConfig& config) {
    const int n = data.num_vars();
    if (n < 2) throw std::invalid_argument("learn_pc: need at least 2 variables");
    Deadline deadline(config.time_budget_seconds);
    G2Tester tester(data, config.significance);

    // Adjacency search on the complete graph, separating sets of growing size.
    std::vector<std::set<int>> adj(n);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (u != v) adj[u].insert(v);
    std::map<EdgeKey, std::vector<int>> sepset;

    for (int level = 0; level <= config.max_conditioning_size; ++level) {
        bool any_testable = false;
        for (int x = 0; x < n; ++x) {
            deadline.check("pc adjacency search");
            for (int y : std::vector<int>(adj[x].begin(), adj[x].end())) {
                if (!adj[x].count(y)) continue;  // removed earlier this sweep
                std::vector<int> pool;
                for (int z : adj[x])
                    if (z != y) pool.push_back(z);
                if (static_cast<int>(pool.size()) < level) continue;
                any_testable = true;
                bool removed = for_each_subset(pool, level, [&](const std::vector<int>& subset) {
                    if (tester.independent(x, y, subset)) {
                        adj[x].erase(y);
                        adj[y].erase(x);
                        sepset[make_edge_key(x, y)] = subset;
                        return true;
                    }
                    return false;
                });
                (void)removed;
            }
        }
        if (!any_testable) break;
    }

    // Collider orientation from separating sets; conflicting demands cancel.
    std::set<std::pair<int, int>> demands;
    for (int z = 0; z < n; ++z) {
        std::vector<int> nbrs(adj[z].begin(), adj[z].end());
        for (std::size_t i = 0; i < nbrs.size(); ++i)
            for (std::size_t k = i + 1; k < nbrs.size(); ++k) {
                int x = nbrs[i], y = nbrs[k];
                if (adj[x].count(y)) continue;  // shielded
                auto it = sepset.find(make_edge_key(x, y));
                if (it == sepset.end()) continue;
                const auto& s = it->second;
                if (!std::binary_search(s.begin(), s.end(), z)) {
                    demands.insert({x, z});
                    demands.insert({y, z});
                }
            }
    }

    Cpdag g(n, data.variable_names);
    for (int u = 0; u < n; ++u)
        for (int v : adj[u])
            if (u < v) g.add_undirected(u, v);
    for (auto [u, v] : demands) {
        if (demands.count({v, u})) continue;  // conflict: stays undirected
        if (g.has_undirected(u, v)) g.orient(u, v);
    }
    apply_meek_rules(g);
    return g;
}

}  // namespace causalsheet
