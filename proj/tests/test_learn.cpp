#include <cmath>

#include "causalsheet/errors.hpp"
#include "causalsheet/learn.hpp"
#include "causalsheet/metrics.hpp"
#include "causalsheet/synth.hpp"
#include "doctest.h"

using namespace causalsheet;

namespace {

// Collider 0 -> 2 <- 1 with additive (non-XOR) strong effects, so both the
// marginal and conditional dependences are visible to every learner.
DiscreteBayesNet collider_net() {
    DiscreteBayesNet bn;
    bn.dag = Dag(3);
    bn.dag.add_edge(0, 2);
    bn.dag.add_edge(1, 2);
    bn.cardinalities = {2, 2, 2};
    bn.cpts.resize(3);
    bn.cpts[0] = {{}, 2, {0.5, 0.5}};
    bn.cpts[1] = {{}, 2, {0.5, 0.5}};
    // P(2=1 | 0=a, 1=b) = 0.1 + 0.5a + 0.3b
    bn.cpts[2] = {{0, 1}, 2, {0.9, 0.1, 0.6, 0.4, 0.4, 0.6, 0.1, 0.9}};
    return bn;
}

Dataset collider_data(int n = 50000, std::uint64_t seed = 17) {
    Rng rng = make_rng(seed);
    return forward_sample(collider_net(), n, rng);
}

Dataset chain_data(int n = 50000, std::uint64_t seed = 18) {
    DiscreteBayesNet bn;
    bn.dag = Dag(3);
    bn.dag.add_edge(0, 1);
    bn.dag.add_edge(1, 2);
    bn.cardinalities = {2, 2, 2};
    bn.cpts.resize(3);
    bn.cpts[0] = {{}, 2, {0.5, 0.5}};
    bn.cpts[1] = {{0}, 2, {0.8, 0.2, 0.2, 0.8}};
    bn.cpts[2] = {{1}, 2, {0.8, 0.2, 0.2, 0.8}};
    Rng rng = make_rng(seed);
    return forward_sample(bn, n, rng);
}

Dataset independent_data(int vars, int n, std::uint64_t seed) {
    Dataset ds;
    Rng rng = make_rng(seed);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int v = 0; v < vars; ++v) {
        ds.variable_names.push_back("X" + std::to_string(v));
        ds.level_labels.push_back({"0", "1"});
        std::vector<std::uint8_t> col(n);
        for (auto& c : col) c = static_cast<std::uint8_t>(coin(rng));
        ds.columns.push_back(std::move(col));
    }
    return ds;
}

LearnerConfig config_for(Algorithm a) {
    LearnerConfig c;
    c.algorithm = a;
    return c;
}

bool is_exact_collider(const Cpdag& g) {
    return g.directed_count() == 2 && g.undirected_count() == 0 && g.has_directed(0, 2) &&
           g.has_directed(1, 2);
}

}  // namespace

TEST_SUITE_BEGIN("learn");

TEST_CASE("all three learners recover the canonical collider exactly") {
    Dataset data = collider_data();
    CHECK(is_exact_collider(learn_pc(data, config_for(Algorithm::Pc))));
    CHECK(is_exact_collider(learn_ges(data, config_for(Algorithm::Ges))));
    CHECK(is_exact_collider(learn_mmhc(data, config_for(Algorithm::Mmhc))));
}

TEST_CASE("independent columns give the empty graph") {
    Dataset data = independent_data(3, 20000, 19);
    for (Algorithm a : {Algorithm::Pc, Algorithm::Ges, Algorithm::Mmhc}) {
        Cpdag g = learn(data, config_for(a));
        CHECK(g.directed_count() == 0);
        CHECK(g.undirected_count() == 0);
    }
}

TEST_CASE("two perfectly correlated variables give one undirected edge") {
    Dataset data = independent_data(1, 1000, 20);
    data.variable_names.push_back("copy");
    data.level_labels.push_back(data.level_labels[0]);
    data.columns.push_back(data.columns[0]);
    for (Algorithm a : {Algorithm::Pc, Algorithm::Ges, Algorithm::Mmhc}) {
        Cpdag g = learn(data, config_for(a));
        CHECK(g.directed_count() == 0);
        CHECK(g.undirected_count() == 1);
        CHECK(g.has_undirected(0, 1));
    }
}

TEST_CASE("ges on chain data returns the undirected path class") {
    Dataset data = chain_data();
    Cpdag g = learn_ges(data, config_for(Algorithm::Ges));
    CHECK(skeleton(g) == std::set<EdgeKey>{{0, 1}, {1, 2}});
    CHECK(v_structures(g).empty());
    CHECK(g.directed_count() == 0);
}

TEST_CASE("ges keeps the empty graph when nothing improves the score") {
    // Balanced, exactly independent 2x2 counts.
    Dataset ds;
    ds.variable_names = {"a", "b"};
    ds.level_labels = {{"0", "1"}, {"0", "1"}};
    ds.columns = {{}, {}};
    for (int i = 0; i < 200; ++i) {
        ds.columns[0].push_back(static_cast<std::uint8_t>(i < 100 ? 0 : 1));
        ds.columns[1].push_back(static_cast<std::uint8_t>(i % 2));
    }
    Cpdag g = learn_ges(ds, config_for(Algorithm::Ges));
    CHECK(g.directed_count() == 0);
    CHECK(g.undirected_count() == 0);
}

TEST_CASE("learners are deterministic and outputs admit an extension") {
    SynthesisConfig sc;
    sc.num_variables = 8;
    sc.structure_type = StructureType::IcDag;
    sc.complexity = 2;
    sc.alpha = 10.0;
    sc.avg_levels = 3;
    sc.num_samples = 5000;
    sc.seed = 99;
    Dataset data = synthesize(sc).data;
    for (Algorithm a : {Algorithm::Pc, Algorithm::Ges, Algorithm::Mmhc}) {
        Cpdag g1 = learn(data, config_for(a));
        Cpdag g2 = learn(data, config_for(a));
        CHECK(g1 == g2);
        CHECK_NOTHROW(cpdag_to_dag(g1));
    }
}

TEST_CASE("learners respect a tiny time budget with a Timeout") {
    Dataset data = collider_data(20000, 21);
    for (Algorithm a : {Algorithm::Pc, Algorithm::Ges, Algorithm::Mmhc}) {
        LearnerConfig c = config_for(a);
        c.time_budget_seconds = 1e-9;
        CHECK_THROWS_AS(learn(data, c), TimeoutError);
    }
}

TEST_CASE("large-sample smoke: skeleton F1 >= 0.9 on easy nets") {
    // 10-node nets, complexity 1, alpha 100, levels 3, N = 50,000.
    double f1_sum[3] = {0, 0, 0};
    const int seeds = 10;
    for (int seed = 0; seed < seeds; ++seed) {
        SynthesisConfig sc;
        sc.num_variables = 10;
        sc.structure_type = StructureType::PreferentialAttachment;
        sc.complexity = 1;
        sc.alpha = 100.0;
        sc.avg_levels = 3;
        sc.num_samples = 50000;
        sc.seed = 1000 + seed;
        SynthResult truth = synthesize(sc);
        int i = 0;
        for (Algorithm a : {Algorithm::Pc, Algorithm::Ges, Algorithm::Mmhc}) {
            Cpdag g = learn(truth.data, config_for(a));
            auto [p, r] = skeleton_pr(g, truth.net.dag);
            double f1 = (p + r > 0) ? 2 * p * r / (p + r) : 0.0;
            f1_sum[i++] += f1;
        }
    }
    CHECK(f1_sum[0] / seeds >= 0.9);  // pc
    CHECK(f1_sum[1] / seeds >= 0.9);  // ges
    CHECK(f1_sum[2] / seeds >= 0.9);  // mmhc
}

TEST_SUITE_END();
