#include "causalsheet/graph.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

#include "causalsheet/errors.hpp"

namespace causalsheet {

std::vector<std::string> default_node_names(int node_count) {
    std::vector<std::string> names;
    names.reserve(node_count);
    for (int i = 0; i < node_count; ++i) names.push_back("X" + std::to_string(i));
    return names;
}

// ---------------------------------------------------------------- Dag

Dag::Dag(int node_count, std::vector<std::string> node_names)
    : node_names_(std::move(node_names)), parents_(node_count), children_(node_count) {
    if (node_count <= 0) throw std::invalid_argument("Dag: node_count must be positive");
    if (node_names_.empty()) node_names_ = default_node_names(node_count);
    if (static_cast<int>(node_names_.size()) != node_count)
        throw std::invalid_argument("Dag: node_names size mismatch");
}

void Dag::check_node(int v) const {
    if (v < 0 || v >= node_count()) throw std::out_of_range("Dag: node index out of range");
}

void Dag::add_edge(int parent, int child) {
    check_node(parent);
    check_node(child);
    if (parent == child) throw std::invalid_argument("Dag: self-loop");
    if (has_edge(parent, child)) throw std::invalid_argument("Dag: duplicate edge");
    parents_[child].insert(parent);
    children_[parent].insert(child);
    ++edge_count_;
}

void Dag::remove_edge(int parent, int child) {
    check_node(parent);
    check_node(child);
    if (!has_edge(parent, child)) throw std::invalid_argument("Dag: missing edge");
    parents_[child].erase(parent);
    children_[parent].erase(child);
    --edge_count_;
}

bool Dag::has_edge(int parent, int child) const {
    check_node(parent);
    check_node(child);
    return children_[parent].count(child) > 0;
}

std::vector<std::pair<int, int>> Dag::edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(edge_count_);
    for (int u = 0; u < node_count(); ++u)
        for (int v : children_[u]) out.emplace_back(u, v);
    return out;
}

bool Dag::reachable(int from, int to) const {
    check_node(from);
    check_node(to);
    if (from == to) return true;
    std::vector<char> seen(node_count(), 0);
    std::queue<int> q;
    q.push(from);
    seen[from] = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v : children_[u]) {
            if (v == to) return true;
            if (!seen[v]) {
                seen[v] = 1;
                q.push(v);
            }
        }
    }
    return false;
}

nlohmann::json Dag::to_json() const {
    nlohmann::json directed = nlohmann::json::array();
    for (auto [u, v] : edges()) directed.push_back({u, v});
    return {{"nodes", node_names_}, {"directed", directed}, {"undirected", nlohmann::json::array()}};
}

Dag Dag::from_json(const nlohmann::json& j) {
    std::vector<std::string> names = j.at("nodes").get<std::vector<std::string>>();
    Dag dag(static_cast<int>(names.size()), names);
    for (const auto& e : j.at("directed")) dag.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
    if (j.contains("undirected") && !j.at("undirected").empty())
        throw std::invalid_argument("Dag::from_json: undirected edges present");
    return dag;
}

bool Dag::operator==(const Dag& other) const {
    return node_count() == other.node_count() && children_ == other.children_;
}

// ---------------------------------------------------------------- Cpdag

Cpdag::Cpdag(int node_count, std::vector<std::string> node_names)
    : node_names_(std::move(node_names)),
      parents_(node_count),
      children_(node_count),
      neighbors_(node_count) {
    if (node_count <= 0) throw std::invalid_argument("Cpdag: node_count must be positive");
    if (node_names_.empty()) node_names_ = default_node_names(node_count);
    if (static_cast<int>(node_names_.size()) != node_count)
        throw std::invalid_argument("Cpdag: node_names size mismatch");
}

Cpdag Cpdag::from_dag(const Dag& dag) {
    Cpdag g(dag.node_count(), dag.node_names());
    for (auto [u, v] : dag.edges()) g.add_directed(u, v);
    return g;
}

void Cpdag::check_node(int v) const {
    if (v < 0 || v >= node_count()) throw std::out_of_range("Cpdag: node index out of range");
}

void Cpdag::add_directed(int u, int v) {
    check_node(u);
    check_node(v);
    if (u == v) throw std::invalid_argument("Cpdag: self-loop");
    if (adjacent(u, v)) throw std::invalid_argument("Cpdag: pair already linked");
    children_[u].insert(v);
    parents_[v].insert(u);
    ++directed_count_;
}

void Cpdag::add_undirected(int u, int v) {
    check_node(u);
    check_node(v);
    if (u == v) throw std::invalid_argument("Cpdag: self-loop");
    if (adjacent(u, v)) throw std::invalid_argument("Cpdag: pair already linked");
    neighbors_[u].insert(v);
    neighbors_[v].insert(u);
    ++undirected_count_;
}

void Cpdag::remove_directed(int u, int v) {
    if (!has_directed(u, v)) throw std::invalid_argument("Cpdag: missing directed edge");
    children_[u].erase(v);
    parents_[v].erase(u);
    --directed_count_;
}

void Cpdag::remove_undirected(int u, int v) {
    if (!has_undirected(u, v)) throw std::invalid_argument("Cpdag: missing undirected edge");
    neighbors_[u].erase(v);
    neighbors_[v].erase(u);
    --undirected_count_;
}

void Cpdag::orient(int u, int v) {
    remove_undirected(u, v);
    add_directed(u, v);
}

bool Cpdag::has_directed(int u, int v) const {
    check_node(u);
    check_node(v);
    return children_[u].count(v) > 0;
}

bool Cpdag::has_undirected(int u, int v) const {
    check_node(u);
    check_node(v);
    return neighbors_[u].count(v) > 0;
}

bool Cpdag::adjacent(int u, int v) const {
    return has_directed(u, v) || has_directed(v, u) || has_undirected(u, v);
}

std::set<int> Cpdag::adjacents(int v) const {
    std::set<int> adj = neighbors_[v];
    adj.insert(parents_[v].begin(), parents_[v].end());
    adj.insert(children_[v].begin(), children_[v].end());
    return adj;
}

std::vector<std::pair<int, int>> Cpdag::directed_edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(directed_count_);
    for (int u = 0; u < node_count(); ++u)
        for (int v : children_[u]) out.emplace_back(u, v);
    return out;
}

std::vector<std::pair<int, int>> Cpdag::undirected_edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(undirected_count_);
    for (int u = 0; u < node_count(); ++u)
        for (int v : neighbors_[u])
            if (u < v) out.emplace_back(u, v);
    return out;
}

nlohmann::json Cpdag::to_json() const {
    nlohmann::json directed = nlohmann::json::array();
    for (auto [u, v] : directed_edges()) directed.push_back({u, v});
    nlohmann::json undirected = nlohmann::json::array();
    for (auto [u, v] : undirected_edges()) undirected.push_back({u, v});
    return {{"nodes", node_names_}, {"directed", directed}, {"undirected", undirected}};
}

Cpdag Cpdag::from_json(const nlohmann::json& j) {
    std::vector<std::string> names = j.at("nodes").get<std::vector<std::string>>();
    Cpdag g(static_cast<int>(names.size()), names);
    for (const auto& e : j.at("directed")) g.add_directed(e.at(0).get<int>(), e.at(1).get<int>());
    if (j.contains("undirected"))
        for (const auto& e : j.at("undirected")) g.add_undirected(e.at(0).get<int>(), e.at(1).get<int>());
    return g;
}

bool Cpdag::operator==(const Cpdag& other) const {
    return node_count() == other.node_count() && children_ == other.children_ &&
           neighbors_ == other.neighbors_;
}

// ---------------------------------------------------------------- operations

std::vector<int> topological_order(const Dag& dag) {
    const int n = dag.node_count();
    std::vector<int> indegree(n);
    for (int v = 0; v < n; ++v) indegree[v] = static_cast<int>(dag.parents(v).size());
    std::set<int> ready;
    for (int v = 0; v < n; ++v)
        if (indegree[v] == 0) ready.insert(v);
    std::vector<int> order;
    order.reserve(n);
    while (!ready.empty()) {
        int u = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(u);
        for (int v : dag.children(u))
            if (--indegree[v] == 0) ready.insert(v);
    }
    if (static_cast<int>(order.size()) != n) throw CycleDetected("topological_order: cycle in edge set");
    return order;
}

std::set<EdgeKey> skeleton(const Dag& g) {
    std::set<EdgeKey> out;
    for (auto [u, v] : g.edges()) out.insert(make_edge_key(u, v));
    return out;
}

std::set<EdgeKey> skeleton(const Cpdag& g) {
    std::set<EdgeKey> out;
    for (auto [u, v] : g.directed_edges()) out.insert(make_edge_key(u, v));
    for (auto [u, v] : g.undirected_edges()) out.insert(make_edge_key(u, v));
    return out;
}

namespace {

template <typename Graph>
std::set<VStructure> collect_v_structures(const Graph& g) {
    std::set<VStructure> out;
    for (int c = 0; c < g.node_count(); ++c) {
        const auto& ps = g.parents(c);
        for (auto a = ps.begin(); a != ps.end(); ++a) {
            for (auto b = std::next(a); b != ps.end(); ++b) {
                if (!g.adjacent(*a, *b)) out.insert({c, *a, *b});
            }
        }
    }
    return out;
}

}  // namespace

std::set<VStructure> v_structures(const Dag& g) { return collect_v_structures(g); }
std::set<VStructure> v_structures(const Cpdag& g) { return collect_v_structures(g); }

namespace {

// One sweep of Meek rules 1-4 over a snapshot of g; returns demanded
// orientations (u, v) meaning u -> v.
std::set<std::pair<int, int>> meek_demands(const Cpdag& g, const std::set<EdgeKey>& frozen) {
    std::set<std::pair<int, int>> demands;
    for (auto [a, b0] : g.undirected_edges()) {
        // Examine both roles of the undirected pair.
        for (auto [x, y] : {std::pair{a, b0}, std::pair{b0, a}}) {
            if (frozen.count(make_edge_key(x, y))) continue;
            // Rule 1: w -> x, x - y, w and y non-adjacent  =>  x -> y.
            for (int w : g.parents(x)) {
                if (w != y && !g.adjacent(w, y)) {
                    demands.insert({x, y});
                    break;
                }
            }
            // Rule 2: x -> w -> y with x - y  =>  x -> y.
            for (int w : g.children(x)) {
                if (g.has_directed(w, y)) {
                    demands.insert({x, y});
                    break;
                }
            }
            // Rule 3: x - c -> y, x - d -> y, c and d non-adjacent  =>  x -> y.
            {
                std::vector<int> into_y;
                for (int c : g.neighbors(x))
                    if (g.has_directed(c, y)) into_y.push_back(c);
                bool fired = false;
                for (std::size_t i = 0; i < into_y.size() && !fired; ++i)
                    for (std::size_t k = i + 1; k < into_y.size() && !fired; ++k)
                        if (!g.adjacent(into_y[i], into_y[k])) {
                            demands.insert({x, y});
                            fired = true;
                        }
            }
            // Rule 4: x - d, d -> c, c -> y, d and y non-adjacent  =>  x -> y.
            {
                bool fired = false;
                for (int d : g.neighbors(x)) {
                    if (d == y || g.adjacent(d, y)) continue;
                    for (int c : g.children(d)) {
                        if (g.has_directed(c, y)) {
                            demands.insert({x, y});
                            fired = true;
                            break;
                        }
                    }
                    if (fired) break;
                }
            }
        }
    }
    return demands;
}

}  // namespace

void apply_meek_rules(Cpdag& g) {
    std::set<EdgeKey> frozen;  // pairs with conflicting demands stay undirected
    while (true) {
        auto demands = meek_demands(g, frozen);
        if (demands.empty()) break;
        bool changed = false;
        for (auto [u, v] : demands) {
            if (!g.has_undirected(u, v)) continue;  // already handled this sweep
            if (demands.count({v, u})) {
                frozen.insert(make_edge_key(u, v));
            } else {
                g.orient(u, v);
                changed = true;
            }
        }
        if (!changed) break;
    }
}

Cpdag dag_to_cpdag(const Dag& dag) {
    Cpdag g(dag.node_count(), dag.node_names());
    for (auto [u, v] : dag.edges()) g.add_undirected(u, v);
    for (const auto& vs : v_structures(dag)) {
        if (g.has_undirected(vs.parent_a, vs.collider)) g.orient(vs.parent_a, vs.collider);
        if (g.has_undirected(vs.parent_b, vs.collider)) g.orient(vs.parent_b, vs.collider);
    }
    apply_meek_rules(g);
    return g;
}

Dag cpdag_to_dag(const Cpdag& cpdag) {
    Cpdag work = cpdag;
    Dag out(cpdag.node_count(), cpdag.node_names());
    for (auto [u, v] : cpdag.directed_edges()) out.add_edge(u, v);

    std::vector<char> removed(cpdag.node_count(), 0);
    int remaining = cpdag.node_count();
    while (remaining > 0) {
        int picked = -1;
        for (int x = 0; x < work.node_count() && picked < 0; ++x) {
            if (removed[x]) continue;
            if (!work.children(x).empty()) continue;  // not a sink
            // Undirected neighbors must be adjacent to every other adjacent of x.
            bool ok = true;
            auto adj = work.adjacents(x);
            for (int y : work.neighbors(x)) {
                for (int z : adj) {
                    if (z != y && !work.adjacent(y, z)) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) break;
            }
            if (ok) picked = x;
        }
        if (picked < 0)
            throw NoConsistentExtension("cpdag_to_dag: no removable sink; PDAG admits no extension");
        for (int y : std::set<int>(work.neighbors(picked))) {
            out.add_edge(y, picked);
            work.remove_undirected(y, picked);
        }
        for (int p : std::set<int>(work.parents(picked))) work.remove_directed(p, picked);
        removed[picked] = 1;
        --remaining;
    }
    // The extension must be acyclic; a cycle here signals an invalid input PDAG.
    topological_order(out);
    return out;
}

}  // namespace causalsheet
