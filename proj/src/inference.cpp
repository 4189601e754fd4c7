#include "causalsheet/inference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>

namespace causalsheet {

Factor Factor::from_cpt(const DiscreteBayesNet& bn, int node) {
    const Cpt& cpt = bn.cpts.at(node);
    Factor f;
    f.scope = cpt.parents;
    f.scope.push_back(node);
    std::sort(f.scope.begin(), f.scope.end());
    f.cards.reserve(f.scope.size());
    for (int v : f.scope) f.cards.push_back(bn.cardinalities.at(v));
    f.values.resize(cpt.table.size());

    // Re-lay the CPT (parents-then-node order) onto the sorted scope.
    std::vector<int> assign(f.scope.size(), 0);
    ParentIndexer indexer(cpt.parents, bn.cardinalities);
    auto level_of = [&](int var) {
        auto it = std::lower_bound(f.scope.begin(), f.scope.end(), var);
        return assign[static_cast<std::size_t>(it - f.scope.begin())];
    };
    const std::size_t total = f.values.size();
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (std::size_t i = f.scope.size(); i-- > 0;) {
            assign[i] = static_cast<int>(rem % f.cards[i]);
            rem /= f.cards[i];
        }
        std::size_t config = indexer.row(level_of);
        f.values[flat] = cpt.row(config)[level_of(node)];
    }
    return f;
}

Factor Factor::multiply(const Factor& other) const {
    Factor out;
    std::set_union(scope.begin(), scope.end(), other.scope.begin(), other.scope.end(),
                   std::back_inserter(out.scope));
    out.cards.resize(out.scope.size());
    std::size_t total = 1;
    for (std::size_t i = 0; i < out.scope.size(); ++i) {
        int v = out.scope[i];
        auto it = std::lower_bound(scope.begin(), scope.end(), v);
        if (it != scope.end() && *it == v)
            out.cards[i] = cards[static_cast<std::size_t>(it - scope.begin())];
        else {
            auto jt = std::lower_bound(other.scope.begin(), other.scope.end(), v);
            out.cards[i] = other.cards[static_cast<std::size_t>(jt - other.scope.begin())];
        }
        total *= static_cast<std::size_t>(out.cards[i]);
    }
    // Position maps from the output scope into each input scope.
    auto positions = [&](const std::vector<int>& sub) {
        std::vector<int> pos(out.scope.size(), -1);
        for (std::size_t i = 0; i < out.scope.size(); ++i) {
            auto it = std::lower_bound(sub.begin(), sub.end(), out.scope[i]);
            if (it != sub.end() && *it == out.scope[i]) pos[i] = static_cast<int>(it - sub.begin());
        }
        return pos;
    };
    std::vector<int> pos_a = positions(scope), pos_b = positions(other.scope);

    out.values.resize(total);
    std::vector<int> assign(out.scope.size(), 0);
    std::vector<std::size_t> stride_a(out.scope.size(), 0), stride_b(out.scope.size(), 0);
    {
        std::vector<std::size_t> sa(scope.size()), sb(other.scope.size());
        std::size_t acc = 1;
        for (std::size_t i = scope.size(); i-- > 0;) { sa[i] = acc; acc *= cards[i]; }
        acc = 1;
        for (std::size_t i = other.scope.size(); i-- > 0;) { sb[i] = acc; acc *= other.cards[i]; }
        for (std::size_t i = 0; i < out.scope.size(); ++i) {
            if (pos_a[i] >= 0) stride_a[i] = sa[pos_a[i]];
            if (pos_b[i] >= 0) stride_b[i] = sb[pos_b[i]];
        }
    }
    std::size_t ia = 0, ib = 0;
    for (std::size_t flat = 0; flat < total; ++flat) {
        out.values[flat] = values[ia] * other.values[ib];
        // Odometer increment over the output assignment.
        for (std::size_t i = out.scope.size(); i-- > 0;) {
            ++assign[i];
            ia += stride_a[i];
            ib += stride_b[i];
            if (assign[i] < out.cards[i]) break;
            ia -= static_cast<std::size_t>(assign[i]) * stride_a[i];
            ib -= static_cast<std::size_t>(assign[i]) * stride_b[i];
            assign[i] = 0;
        }
    }
    return out;
}

Factor Factor::marginalize(int var) const {
    auto it = std::lower_bound(scope.begin(), scope.end(), var);
    if (it == scope.end() || *it != var) throw std::invalid_argument("Factor: var not in scope");
    const std::size_t pos = static_cast<std::size_t>(it - scope.begin());
    Factor out;
    out.scope = scope;
    out.scope.erase(out.scope.begin() + pos);
    out.cards = cards;
    out.cards.erase(out.cards.begin() + pos);
    std::size_t inner = 1;
    for (std::size_t i = pos + 1; i < scope.size(); ++i) inner *= cards[i];
    std::size_t outer = values.size() / (inner * cards[pos]);
    out.values.assign(values.size() / cards[pos], 0.0);
    for (std::size_t o = 0; o < outer; ++o)
        for (int k = 0; k < cards[pos]; ++k) {
            const double* src = values.data() + (o * cards[pos] + k) * inner;
            double* dst = out.values.data() + o * inner;
            for (std::size_t i = 0; i < inner; ++i) dst[i] += src[i];
        }
    return out;
}

Factor Factor::reduce(int var, int level) const {
    auto it = std::lower_bound(scope.begin(), scope.end(), var);
    if (it == scope.end() || *it != var) throw std::invalid_argument("Factor: var not in scope");
    const std::size_t pos = static_cast<std::size_t>(it - scope.begin());
    Factor out;
    out.scope = scope;
    out.scope.erase(out.scope.begin() + pos);
    out.cards = cards;
    out.cards.erase(out.cards.begin() + pos);
    std::size_t inner = 1;
    for (std::size_t i = pos + 1; i < scope.size(); ++i) inner *= cards[i];
    std::size_t outer = values.size() / (inner * cards[pos]);
    out.values.resize(values.size() / cards[pos]);
    for (std::size_t o = 0; o < outer; ++o) {
        const double* src = values.data() + (o * cards[pos] + level) * inner;
        double* dst = out.values.data() + o * inner;
        std::copy(src, src + inner, dst);
    }
    return out;
}

namespace {

// Ancestors of target in the surgered graph (incoming edges of the intervened
// variable removed), including target itself.
std::vector<int> relevant_nodes(const DiscreteBayesNet& bn, int target,
                                std::optional<Intervention> intervention) {
    std::vector<char> mark(bn.node_count(), 0);
    std::queue<int> q;
    q.push(target);
    mark[target] = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        if (intervention && v == intervention->var) continue;  // surgery cuts its parents
        for (int p : bn.dag.parents(v))
            if (!mark[p]) {
                mark[p] = 1;
                q.push(p);
            }
    }
    std::vector<int> out;
    for (int v = 0; v < bn.node_count(); ++v)
        if (mark[v]) out.push_back(v);
    return out;
}

struct Prepared {
    std::vector<Factor> factors;
    std::vector<int> to_eliminate;  // ascending
};

Prepared prepare_factors(const DiscreteBayesNet& bn, int target,
                         std::optional<Intervention> intervention) {
    Prepared prep;
    std::set<int> elim;
    for (int v : relevant_nodes(bn, target, intervention)) {
        if (v != target) elim.insert(v);
        if (intervention && v == intervention->var) continue;  // clamped: no own factor
        Factor f = Factor::from_cpt(bn, v);
        if (intervention &&
            std::binary_search(f.scope.begin(), f.scope.end(), intervention->var))
            f = f.reduce(intervention->var, intervention->level);
        prep.factors.push_back(std::move(f));
    }
    if (intervention) elim.erase(intervention->var);
    prep.to_eliminate.assign(elim.begin(), elim.end());
    return prep;
}

// Min-degree elimination order over the interaction graph of the factor scopes.
std::vector<int> min_degree_order(const Prepared& prep, int* width_out) {
    std::map<int, std::set<int>> adj;
    for (const Factor& f : prep.factors)
        for (int u : f.scope)
            for (int v : f.scope)
                if (u != v) adj[u].insert(v);
    std::set<int> pending(prep.to_eliminate.begin(), prep.to_eliminate.end());
    for (int v : pending) adj[v];  // ensure isolated nodes exist
    std::vector<int> order;
    int width = 0;
    while (!pending.empty()) {
        int best = -1;
        std::size_t best_deg = 0;
        for (int v : pending) {
            std::size_t deg = adj[v].size();
            if (best < 0 || deg < best_deg || (deg == best_deg && v < best)) {
                best = v;
                best_deg = deg;
            }
        }
        width = std::max(width, static_cast<int>(adj[best].size()) + 1);
        // Connect the neighborhood, then drop the node.
        for (int u : adj[best])
            for (int v : adj[best])
                if (u != v) adj[u].insert(v);
        for (int u : adj[best]) adj[u].erase(best);
        adj.erase(best);
        pending.erase(best);
        order.push_back(best);
    }
    if (width_out) *width_out = width;
    return order;
}

}  // namespace

int elimination_width(const DiscreteBayesNet& bn, int target,
                      std::optional<Intervention> intervention) {
    Prepared prep = prepare_factors(bn, target, intervention);
    int width = 0;
    min_degree_order(prep, &width);
    return width;
}

std::vector<double> exact_interventional(const DiscreteBayesNet& bn, int target,
                                         std::optional<Intervention> intervention) {
    if (intervention && intervention->var == target)
        throw std::invalid_argument("exact_interventional: do-variable equals target");
    Prepared prep = prepare_factors(bn, target, intervention);
    std::vector<Factor> factors = std::move(prep.factors);
    for (int v : min_degree_order(prep, nullptr)) {
        Factor combined;
        bool have = false;
        std::vector<Factor> rest;
        rest.reserve(factors.size());
        for (Factor& f : factors) {
            if (std::binary_search(f.scope.begin(), f.scope.end(), v)) {
                combined = have ? combined.multiply(f) : std::move(f);
                have = true;
            } else {
                rest.push_back(std::move(f));
            }
        }
        if (have) rest.push_back(combined.marginalize(v));
        factors = std::move(rest);
    }
    Factor result;
    result.scope = {target};
    result.cards = {bn.cardinalities.at(target)};
    result.values.assign(bn.cardinalities.at(target), 1.0);
    for (const Factor& f : factors) result = result.multiply(f);
    if (result.scope != std::vector<int>{target})
        throw std::logic_error("exact_interventional: stray scope after elimination");
    double sum = std::accumulate(result.values.begin(), result.values.end(), 0.0);
    if (!(sum > 0.0)) throw std::logic_error("exact_interventional: zero mass");
    for (double& p : result.values) p /= sum;
    return result.values;
}

std::vector<double> monte_carlo_interventional(const DiscreteBayesNet& bn, int target,
                                               std::optional<Intervention> intervention,
                                               int num_samples, Rng& rng) {
    const auto order = topological_order(bn.dag);
    std::vector<ParentIndexer> indexers(bn.node_count());
    for (int v = 0; v < bn.node_count(); ++v)
        indexers[v] = ParentIndexer(bn.cpts[v].parents, bn.cardinalities);
    std::vector<int> values(bn.node_count(), 0);
    std::vector<std::int64_t> tally(bn.cardinalities.at(target), 0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int s = 0; s < num_samples; ++s) {
        for (int v : order) {
            if (intervention && v == intervention->var) {
                values[v] = intervention->level;
                continue;
            }
            const Cpt& cpt = bn.cpts[v];
            std::size_t config = indexers[v].row([&](int p) { return values[p]; });
            const double* row = cpt.row(config);
            double u = unif(rng);
            int level = 0;
            double acc = row[0];
            while (level + 1 < cpt.cardinality && u > acc) acc += row[++level];
            values[v] = level;
        }
        ++tally[values[target]];
    }
    std::vector<double> out(tally.size());
    for (std::size_t k = 0; k < tally.size(); ++k)
        out[k] = static_cast<double>(tally[k]) / static_cast<double>(num_samples);
    return out;
}

}  // namespace causalsheet
