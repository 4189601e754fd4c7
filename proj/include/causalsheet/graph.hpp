#pragma once

#include <compare>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace causalsheet {

// Unordered node pair, stored with first < second.
using EdgeKey = std::pair<int, int>;

inline EdgeKey make_edge_key(int u, int v) { return u < v ? EdgeKey{u, v} : EdgeKey{v, u}; }

// Unshielded collider parent_a -> collider <- parent_b with parent_a < parent_b.
struct VStructure {
    int collider;
    int parent_a;
    int parent_b;

    auto operator<=>(const VStructure&) const = default;
};

class Dag {
public:
    Dag() = default;
    explicit Dag(int node_count, std::vector<std::string> node_names = {});

    int node_count() const { return static_cast<int>(parents_.size()); }
    const std::vector<std::string>& node_names() const { return node_names_; }

    void add_edge(int parent, int child);
    void remove_edge(int parent, int child);
    bool has_edge(int parent, int child) const;
    bool adjacent(int u, int v) const { return has_edge(u, v) || has_edge(v, u); }

    const std::set<int>& parents(int v) const { return parents_.at(v); }
    const std::set<int>& children(int v) const { return children_.at(v); }

    int edge_count() const { return edge_count_; }
    // Edge list as (parent, child) pairs in lexicographic order.
    std::vector<std::pair<int, int>> edges() const;

    // True if adding parent -> child would close a directed cycle.
    bool reachable(int from, int to) const;

    nlohmann::json to_json() const;
    static Dag from_json(const nlohmann::json& j);

    bool operator==(const Dag& other) const;

private:
    void check_node(int v) const;

    std::vector<std::string> node_names_;
    std::vector<std::set<int>> parents_;
    std::vector<std::set<int>> children_;
    int edge_count_ = 0;
};

class Cpdag {
public:
    Cpdag() = default;
    explicit Cpdag(int node_count, std::vector<std::string> node_names = {});

    // All edges of the DAG become directed edges.
    static Cpdag from_dag(const Dag& dag);

    int node_count() const { return static_cast<int>(parents_.size()); }
    const std::vector<std::string>& node_names() const { return node_names_; }

    void add_directed(int u, int v);
    void add_undirected(int u, int v);
    void remove_directed(int u, int v);
    void remove_undirected(int u, int v);
    // Replaces the undirected edge u - v with u -> v.
    void orient(int u, int v);

    bool has_directed(int u, int v) const;
    bool has_undirected(int u, int v) const;
    bool adjacent(int u, int v) const;

    const std::set<int>& parents(int v) const { return parents_.at(v); }
    const std::set<int>& children(int v) const { return children_.at(v); }
    const std::set<int>& neighbors(int v) const { return neighbors_.at(v); }
    std::set<int> adjacents(int v) const;

    int directed_count() const { return directed_count_; }
    int undirected_count() const { return undirected_count_; }

    std::vector<std::pair<int, int>> directed_edges() const;
    // Undirected edges as (u, v) with u < v, lexicographic.
    std::vector<std::pair<int, int>> undirected_edges() const;

    nlohmann::json to_json() const;
    static Cpdag from_json(const nlohmann::json& j);

    bool operator==(const Cpdag& other) const;

private:
    void check_node(int v) const;

    std::vector<std::string> node_names_;
    std::vector<std::set<int>> parents_;
    std::vector<std::set<int>> children_;
    std::vector<std::set<int>> neighbors_;
    int directed_count_ = 0;
    int undirected_count_ = 0;
};

// Kahn's algorithm, smallest ready index first. Throws CycleDetected.
std::vector<int> topological_order(const Dag& dag);

std::set<EdgeKey> skeleton(const Dag& g);
std::set<EdgeKey> skeleton(const Cpdag& g);

std::set<VStructure> v_structures(const Dag& g);
std::set<VStructure> v_structures(const Cpdag& g);

// Orients the undirected part of g by Meek rules 1-4 until fixpoint. Opposite
// orientations demanded within one sweep cancel out: the edge stays undirected
// for good.
void apply_meek_rules(Cpdag& g);

// Completed PDAG of dag's Markov equivalence class: skeleton plus v-structure
// orientations closed under the Meek rules.
Cpdag dag_to_cpdag(const Dag& dag);

// Consistent extension via the Dor-Tarsi procedure (repeatedly remove a sink
// whose undirected neighbors form a clique with its adjacents). Throws
// NoConsistentExtension when the input admits none.
Dag cpdag_to_dag(const Cpdag& cpdag);

std::vector<std::string> default_node_names(int node_count);

}  // namespace causalsheet
