#include "causalsheet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "causalsheet/errors.hpp"

namespace causalsheet {

std::string to_string(StructureType t) {
    switch (t) {
        case StructureType::ForestFire: return "forest_fire";
        case StructureType::PreferentialAttachment: return "preferential_attachment";
        case StructureType::IcDag: return "ic_dag";
    }
    throw std::invalid_argument("unknown StructureType");
}

StructureType structure_type_from_string(const std::string& s) {
    if (s == "forest_fire") return StructureType::ForestFire;
    if (s == "preferential_attachment") return StructureType::PreferentialAttachment;
    if (s == "ic_dag") return StructureType::IcDag;
    throw std::invalid_argument("unknown structure type: " + s);
}

nlohmann::json SynthesisConfig::to_json() const {
    return {{"num_variables", num_variables},
            {"structure_type", to_string(structure_type)},
            {"complexity", complexity},
            {"alpha", alpha},
            {"avg_levels", avg_levels},
            {"num_samples", num_samples},
            {"seed", seed}};
}

SynthesisConfig SynthesisConfig::from_json(const nlohmann::json& j) {
    SynthesisConfig c;
    c.num_variables = j.at("num_variables").get<int>();
    c.structure_type = structure_type_from_string(j.at("structure_type").get<std::string>());
    c.complexity = j.at("complexity").get<int>();
    c.alpha = j.at("alpha").get<double>();
    c.avg_levels = j.at("avg_levels").get<int>();
    c.num_samples = j.at("num_samples").get<int>();
    c.seed = j.value("seed", std::uint64_t{0});
    return c;
}

namespace {

struct EdgeBand {
    int target;
    int low;
    int high;
};

EdgeBand edge_band(int num_variables, int complexity) {
    const long long max_edges = static_cast<long long>(num_variables) * (num_variables - 1) / 2;
    long long target = std::min<long long>(static_cast<long long>(complexity) * num_variables, max_edges);
    EdgeBand band;
    band.target = static_cast<int>(target);
    band.low = static_cast<int>(std::ceil(0.85 * static_cast<double>(target)));
    band.high = static_cast<int>(std::floor(1.15 * static_cast<double>(target)));
    band.high = static_cast<int>(std::min<long long>(band.high, max_edges));
    band.low = std::min(band.low, band.high);
    return band;
}

int pick_weighted(const std::vector<double>& weights, double total, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, total);
    double u = unif(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u <= acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
}

// Preferential attachment: each new node links to m existing nodes chosen
// proportional to degree+1, edges oriented new -> old. A preferential top-up
// pass brings the total up to the target when m*(n-1) undershoots it.
Dag gen_preferential(int n, const EdgeBand& band, int m, Rng& rng) {
    Dag dag(n);
    std::vector<int> degree(n, 0);
    std::vector<int> indegree(n, 0);
    for (int v = 1; v < n; ++v) {
        const int links = std::min(v, m);
        std::vector<char> taken(v, 0);
        for (int e = 0; e < links && dag.edge_count() < band.target; ++e) {
            std::vector<double> w(v, 0.0);
            double total = 0.0;
            for (int u = 0; u < v; ++u) {
                if (taken[u] || indegree[u] >= kGeneratorMaxInDegree) continue;
                w[u] = degree[u] + 1.0;
                total += w[u];
            }
            if (total <= 0.0) break;
            int u = pick_weighted(w, total, rng);
            taken[u] = 1;
            dag.add_edge(v, u);
            ++degree[v];
            ++degree[u];
            ++indegree[u];
        }
    }
    // Top-up: extra new->old edges, targets chosen preferentially.
    int guard = 20 * band.target + 100;
    while (dag.edge_count() < band.target && guard-- > 0) {
        std::uniform_int_distribution<int> pick_src(1, n - 1);
        int v = pick_src(rng);
        std::vector<double> w(v, 0.0);
        double total = 0.0;
        for (int u = 0; u < v; ++u) {
            if (dag.has_edge(v, u) || indegree[u] >= kGeneratorMaxInDegree) continue;
            w[u] = degree[u] + 1.0;
            total += w[u];
        }
        if (total <= 0.0) continue;
        int u = pick_weighted(w, total, rng);
        dag.add_edge(v, u);
        ++degree[v];
        ++degree[u];
        ++indegree[u];
    }
    return dag;
}

// Forest fire: each new node picks an ambassador and burns through its
// neighborhood with probability p per neighbor; the new node links to every
// burned node, edges oriented new -> old.
Dag gen_forest_fire(int n, double p, Rng& rng) {
    Dag dag(n);
    std::vector<std::vector<int>> undirected(n);
    std::vector<int> indegree(n, 0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int v = 1; v < n; ++v) {
        std::uniform_int_distribution<int> pick(0, v - 1);
        int ambassador = pick(rng);
        std::vector<char> burned(v, 0);
        std::queue<int> frontier;
        burned[ambassador] = 1;
        frontier.push(ambassador);
        std::vector<int> targets{ambassador};
        while (!frontier.empty()) {
            int x = frontier.front();
            frontier.pop();
            for (int y : undirected[x]) {
                if (y >= v || burned[y]) continue;
                if (unif(rng) < p) {
                    burned[y] = 1;
                    frontier.push(y);
                    targets.push_back(y);
                }
            }
        }
        for (int u : targets) {
            if (indegree[u] >= kGeneratorMaxInDegree) continue;
            dag.add_edge(v, u);
            ++indegree[u];
            undirected[v].push_back(u);
            undirected[u].push_back(v);
        }
    }
    return dag;
}

// Connected-DAG MCMC: start from a directed path, run 10*n^2 add/remove moves
// that preserve acyclicity, weak connectivity, and the edge-count band.
Dag gen_ic_dag(int n, const EdgeBand& band, Rng& rng) {
    Dag dag(n);
    for (int v = 0; v + 1 < n; ++v) dag.add_edge(v, v + 1);
    std::vector<int> indegree(n, 0);
    for (int v = 1; v < n; ++v) indegree[v] = 1;

    auto weakly_connected_without = [&](int u, int v) {
        // BFS over the skeleton with edge u->v removed.
        std::vector<char> seen(n, 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        int count = 1;
        while (!q.empty()) {
            int x = q.front();
            q.pop();
            auto visit = [&](int y) {
                if (!seen[y]) {
                    seen[y] = 1;
                    ++count;
                    q.push(y);
                }
            };
            for (int y : dag.children(x))
                if (!(x == u && y == v)) visit(y);
            for (int y : dag.parents(x))
                if (!(y == u && x == v)) visit(y);
        }
        return count == n;
    };

    std::uniform_int_distribution<int> pick(0, n - 1);
    const long long moves = 10LL * n * n;
    for (long long step = 0; step < moves; ++step) {
        int u = pick(rng), v = pick(rng);
        if (u == v) continue;
        if (dag.has_edge(u, v)) {
            if (dag.edge_count() - 1 < band.low) continue;
            if (!weakly_connected_without(u, v)) continue;
            dag.remove_edge(u, v);
            --indegree[v];
        } else {
            if (dag.adjacent(u, v)) continue;
            if (dag.edge_count() + 1 > band.high) continue;
            if (indegree[v] >= kGeneratorMaxInDegree) continue;
            if (dag.reachable(v, u)) continue;  // would close a cycle
            dag.add_edge(u, v);
            ++indegree[v];
        }
    }
    return dag;
}

}  // namespace

Dag gen_dag(StructureType type, int num_variables, int complexity, Rng& rng) {
    if (num_variables < 2) throw std::invalid_argument("gen_dag: num_variables must be >= 2");
    if (complexity < 1) throw std::invalid_argument("gen_dag: complexity must be >= 1");
    const EdgeBand band = edge_band(num_variables, complexity);

    const int kAttempts = 50;
    if (type == StructureType::PreferentialAttachment) {
        for (int attempt = 0; attempt < kAttempts; ++attempt) {
            Dag dag = gen_preferential(num_variables, band, complexity, rng);
            if (dag.edge_count() >= band.low && dag.edge_count() <= band.high) return dag;
        }
    } else if (type == StructureType::IcDag) {
        for (int attempt = 0; attempt < kAttempts; ++attempt) {
            Dag dag = gen_ic_dag(num_variables, band, rng);
            if (dag.edge_count() >= band.low && dag.edge_count() <= band.high) return dag;
        }
    } else {
        // Bisection on the forward-burn probability.
        std::uniform_int_distribution<std::uint64_t> reseed;
        double lo = 0.0, hi = 1.0;
        for (int attempt = 0; attempt < kAttempts; ++attempt) {
            double p = 0.5 * (lo + hi);
            Rng attempt_rng = make_rng(reseed(rng));
            Dag dag = gen_forest_fire(num_variables, p, attempt_rng);
            if (dag.edge_count() >= band.low && dag.edge_count() <= band.high) return dag;
            if (dag.edge_count() < band.low)
                lo = p;
            else
                hi = p;
        }
    }
    throw CalibrationFailed("gen_dag: could not reach edge band [" + std::to_string(band.low) +
                            ", " + std::to_string(band.high) + "] for " + to_string(type) + " n=" +
                            std::to_string(num_variables) + " complexity=" +
                            std::to_string(complexity));
}

std::vector<int> assign_levels(int num_variables, int avg_levels, Rng& rng) {
    if (num_variables < 1) throw std::invalid_argument("assign_levels: num_variables must be >= 1");
    if (avg_levels < 2) throw std::invalid_argument("assign_levels: avg_levels must be >= 2");
    std::uniform_int_distribution<int> draw(avg_levels - 1, avg_levels + 1);
    auto one = [&] { return std::max(2, draw(rng)); };
    std::vector<int> levels(num_variables);
    for (int& l : levels) l = one();

    auto mean = [&] {
        return std::accumulate(levels.begin(), levels.end(), 0.0) / num_variables;
    };
    std::uniform_int_distribution<int> pick(0, num_variables - 1);
    for (int guard = 0; guard < 100000 && std::abs(mean() - avg_levels) > 0.25; ++guard) {
        double m = mean();
        int i = pick(rng);
        if ((m > avg_levels && levels[i] > avg_levels) || (m < avg_levels && levels[i] < avg_levels))
            levels[i] = one();
    }
    if (std::abs(mean() - avg_levels) > 0.25)
        for (int& l : levels) l = avg_levels;  // re-draw loop starved (tiny graphs); force exact
    return levels;
}

DiscreteBayesNet parameterize(const Dag& dag, const std::vector<int>& cardinalities, double alpha,
                              Rng& rng) {
    if (static_cast<int>(cardinalities.size()) != dag.node_count())
        throw std::invalid_argument("parameterize: cardinalities length mismatch");
    if (!(alpha > 0.0)) throw std::invalid_argument("parameterize: alpha must be positive");
    DiscreteBayesNet bn;
    bn.dag = dag;
    bn.cardinalities = cardinalities;
    bn.cpts.resize(dag.node_count());
    for (int v = 0; v < dag.node_count(); ++v) {
        Cpt& cpt = bn.cpts[v];
        cpt.parents.assign(dag.parents(v).begin(), dag.parents(v).end());
        cpt.cardinality = cardinalities[v];
        std::size_t q = 1;
        for (int p : cpt.parents) q *= static_cast<std::size_t>(cardinalities[p]);
        cpt.table.resize(q * cpt.cardinality);
        const double shape = alpha / cpt.cardinality;
        std::gamma_distribution<double> gamma(shape, 1.0);
        for (std::size_t j = 0; j < q; ++j) {
            double* row = cpt.row(j);
            double sum = 0.0;
            do {
                sum = 0.0;
                for (int k = 0; k < cpt.cardinality; ++k) {
                    row[k] = gamma(rng);
                    sum += row[k];
                }
            } while (!(sum > 1e-300));  // guard against full-row underflow
            for (int k = 0; k < cpt.cardinality; ++k) row[k] /= sum;
        }
    }
    return bn;
}

Dataset forward_sample(const DiscreteBayesNet& bn, int num_samples, Rng& rng) {
    const int n = bn.node_count();
    const auto order = topological_order(bn.dag);
    std::vector<ParentIndexer> indexers(n);
    for (int v = 0; v < n; ++v) indexers[v] = ParentIndexer(bn.cpts[v].parents, bn.cardinalities);

    Dataset ds;
    ds.variable_names = bn.dag.node_names();
    ds.level_labels.resize(n);
    for (int v = 0; v < n; ++v)
        for (int k = 0; k < bn.cardinalities[v]; ++k) ds.level_labels[v].push_back(std::to_string(k));
    ds.columns.assign(n, {});
    for (int v = 0; v < n; ++v) ds.columns[v].reserve(num_samples);

    std::vector<int> values(n, 0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int s = 0; s < num_samples; ++s) {
        for (int v : order) {
            const Cpt& cpt = bn.cpts[v];
            std::size_t config = indexers[v].row([&](int p) { return values[p]; });
            const double* row = cpt.row(config);
            double u = unif(rng);
            int level = 0;
            double acc = row[0];
            while (level + 1 < cpt.cardinality && u > acc) acc += row[++level];
            values[v] = level;
        }
        for (int v = 0; v < n; ++v) ds.columns[v].push_back(static_cast<std::uint8_t>(values[v]));
    }
    return ds;
}

SynthResult synthesize(const SynthesisConfig& config) {
    Rng dag_rng = make_rng(hash_combine(config.seed, hash_str("dag")));
    Rng level_rng = make_rng(hash_combine(config.seed, hash_str("levels")));
    Rng cpt_rng = make_rng(hash_combine(config.seed, hash_str("cpts")));
    Rng sample_rng = make_rng(hash_combine(config.seed, hash_str("samples")));

    SynthResult out;
    Dag dag = gen_dag(config.structure_type, config.num_variables, config.complexity, dag_rng);
    auto levels = assign_levels(config.num_variables, config.avg_levels, level_rng);
    out.net = parameterize(dag, levels, config.alpha, cpt_rng);
    out.data = forward_sample(out.net, config.num_samples, sample_rng);
    return out;
}

}  // namespace causalsheet
