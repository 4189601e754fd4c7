#include <cmath>

#include "causalsheet/inference.hpp"
#include "causalsheet/synth.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace causalsheet;

namespace {

DiscreteBayesNet random_net(int nodes, int complexity, double alpha, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    Dag dag = gen_dag(StructureType::PreferentialAttachment, nodes, complexity, rng);
    auto levels = assign_levels(nodes, 3, rng);
    return parameterize(dag, levels, alpha, rng);
}

}  // namespace

TEST_SUITE_BEGIN("inference");

TEST_CASE("factor multiply and marginalize against direct computation") {
    Factor a;
    a.scope = {0, 2};
    a.cards = {2, 3};
    a.values = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    Factor b;
    b.scope = {1, 2};
    b.cards = {2, 3};
    b.values = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    Factor prod = a.multiply(b);
    REQUIRE(prod.scope == std::vector<int>{0, 1, 2});
    // Spot-check: value at (x0=1, x1=0, x2=2) = a(1,2) * b(0,2).
    // Row-major with the last scope var fastest: index = (1*2 + 0)*3 + 2.
    CHECK(prod.values[(1 * 2 + 0) * 3 + 2] == doctest::Approx(0.6 * 3.0));
    Factor marg = prod.marginalize(2);
    REQUIRE(marg.scope == std::vector<int>{0, 1});
    CHECK(marg.values[0] ==
          doctest::Approx(0.1 * 1.0 + 0.2 * 2.0 + 0.3 * 3.0));  // x0=0, x1=0 summed over x2
}

TEST_CASE("exact marginals match full-joint enumeration") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        DiscreteBayesNet bn = random_net(5, 2, 5.0, seed);
        for (int v = 0; v < bn.node_count(); ++v) {
            auto got = exact_marginal(bn, v);
            auto want = oracles::joint_marginal(bn, v);
            for (std::size_t k = 0; k < want.size(); ++k)
                CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-9));
        }
    }
}

TEST_CASE("exact interventional distributions match enumeration") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        DiscreteBayesNet bn = random_net(6, 2, 2.0, 100 + seed);
        Rng pick = make_rng(seed);
        for (int trial = 0; trial < 5; ++trial) {
            int do_var = static_cast<int>(pick() % bn.node_count());
            int target = static_cast<int>(pick() % bn.node_count());
            if (do_var == target) continue;
            int do_level = static_cast<int>(pick() % bn.cardinalities[do_var]);
            auto got = exact_interventional(bn, target, Intervention{do_var, do_level});
            auto want = oracles::joint_interventional(bn, target, do_var, do_level);
            for (std::size_t k = 0; k < want.size(); ++k)
                CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-9));
        }
    }
}

TEST_CASE("monte carlo agrees with exact inference") {
    DiscreteBayesNet bn = random_net(6, 2, 5.0, 42);
    Rng rng = make_rng(1);
    auto exact = exact_interventional(bn, 4, Intervention{0, 1});
    auto mc = monte_carlo_interventional(bn, 4, Intervention{0, 1}, 1000000, rng);
    for (std::size_t k = 0; k < exact.size(); ++k)
        CHECK(std::abs(mc[k] - exact[k]) < 0.005);
}

TEST_CASE("elimination width is small on sparse nets") {
    DiscreteBayesNet bn = random_net(12, 1, 5.0, 7);
    CHECK(elimination_width(bn, 3, std::nullopt) <= 12);
}

TEST_SUITE_END();
