#include <doctest.h>

#include <cmath>

#include "allpay/valuations.hpp"
#include "helpers.hpp"

using namespace allpay;

TEST_CASE("xos value and maximizing clause") {
    const XOSValuation v({{3.0, 0.0}, {0.0, 2.0}});
    CHECK(v.value(0) == 0.0);
    CHECK(v.value(0b11) == 3.0);
    CHECK(v.value(0b10) == 2.0);
    CHECK(v.maximizing_clause(0b11) == 0);
    CHECK_THROWS_AS((void)v.value(0b100), std::invalid_argument);
    CHECK_THROWS_AS((void)v.maximizing_clause(0), std::invalid_argument);

    const XOSValuation additive({{1.0, 1.0}});
    CHECK(additive.value(0b01) == 1.0);
    CHECK(additive.maximizing_clause(0b10) == 0);

    const XOSValuation tied({{2.0, 0.0}, {2.0, 0.0}});
    CHECK(tied.maximizing_clause(0b01) == 0);  // ties to the lowest index
}

TEST_CASE("marginal inequality: slack and universality") {
    const XOSValuation v({{3.0, 0.0}, {0.0, 2.0}});
    const auto both = xos_marginal_check(v, 0b11);
    CHECK(both.holds);
    CHECK(both.slack == doctest::Approx(2.0).epsilon(1e-12));

    const auto empty = xos_marginal_check(v, 0);
    CHECK(empty.holds);
    CHECK(empty.slack == 0.0);

    // additive valuations are tight; dyadic entries make the arithmetic exact
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> w(3);
        for (double& x : w) x = std::floor(rng.uniform01() * 256.0) / 256.0;
        const XOSValuation add({w});
        const ItemMask s = static_cast<ItemMask>(rng.uniform01() * 8);
        CHECK(xos_marginal_check(add, s).slack == 0.0);
    }

    Rng gen(17);
    for (int t = 0; t < 2000; ++t) {
        const auto x = test_helpers::random_xos(gen, 4);
        const ItemMask s = static_cast<ItemMask>(gen.uniform01() * 16);
        const auto check = xos_marginal_check(x, s);
        CHECK(check.slack >= -1e-12);
        CHECK(check.holds);
    }
}

TEST_CASE("optimal_combinatorial on small instances") {
    const XOSValuation both({{1.0, 1.0}});
    const auto solo = optimal_combinatorial({both});
    CHECK(solo.welfare == doctest::Approx(2.0));
    CHECK(solo.item_contribution[0] == doctest::Approx(1.0));
    CHECK(solo.item_contribution[1] == doctest::Approx(1.0));

    const auto split = optimal_combinatorial({XOSValuation({{3.0, 0.0}}), XOSValuation({{0.0, 2.0}})});
    CHECK(split.welfare == doctest::Approx(5.0));
    CHECK(split.winner[0] == 0);
    CHECK(split.winner[1] == 1);
    CHECK(split.item_contribution[0] == doctest::Approx(3.0));
    CHECK(split.item_contribution[1] == doctest::Approx(2.0));

    // identical bidders: the lexicographically smallest assignment wins the tie
    const auto tie = optimal_combinatorial({XOSValuation({{1.0, 1.0}}), XOSValuation({{1.0, 1.0}})});
    CHECK(tie.welfare == doctest::Approx(2.0));
    CHECK(tie.winner[0] == 0);
    CHECK(tie.winner[1] == 0);

    const XOSValuation wide({std::vector<double>(30, 1.0)});
    CHECK_THROWS_AS((void)optimal_combinatorial({wide, wide}), std::invalid_argument);
}

TEST_CASE("concave transform of a multi-unit valuation") {
    const MultiUnitValuation f({0.0, 2.0, 3.0, 3.5});
    const ConcavePL g = submodular_to_concave(f);
    CHECK(g.eval(0.5) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(g.eval(2.0 / 3.0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(g.eval(0.0) == 0.0);
    CHECK(g.eval(1.0) == doctest::Approx(3.5));

    const ConcavePL line = submodular_to_concave(MultiUnitValuation({0.0, 1.0}));
    CHECK(line.eval(0.37) == doctest::Approx(0.37).epsilon(1e-15));

    // the transform reproduces the floor interpolation at random points
    Rng rng(3);
    for (int t = 0; t < 1000; ++t) {
        const double x = 3.0 * rng.uniform01();
        const int k = static_cast<int>(std::floor(x));
        const double expect = f.value[k] + (x - k) * (f.value[k + 1] - f.value[k]);
        CHECK(g.eval(x / 3.0) == doctest::Approx(expect).epsilon(1e-12));
    }

    // concavity: nonincreasing slopes for submodular inputs
    for (int k = 1; k < g.segments(); ++k) CHECK(g.slope(k) <= g.slope(k - 1) + 1e-12);
}

TEST_CASE("multi-unit optimum: greedy, ties, errors") {
    const MultiUnitValuation f1({0.0, 2.0, 3.0, 3.5});
    const MultiUnitValuation f2({0.0, 1.8, 2.0, 2.1});
    const auto opt = optimal_multiunit({f1, f2}, 3);
    CHECK(opt.allocation == std::vector<int>{2, 1});
    CHECK(opt.welfare == doctest::Approx(4.8));

    const auto solo = optimal_multiunit({f1}, 3);
    CHECK(solo.allocation == std::vector<int>{3});
    CHECK(solo.welfare == doctest::Approx(3.5));

    const MultiUnitValuation concave({0.0, 4.0, 7.0, 9.0, 10.0});
    const auto even = optimal_multiunit({concave, concave}, 4);
    CHECK(even.allocation == std::vector<int>{2, 2});

    CHECK_THROWS_AS((void)optimal_multiunit({MultiUnitValuation({0.0, 1.0, 3.0})}, 2),
                    std::invalid_argument);
    const auto fallback = optimal_multiunit({MultiUnitValuation({0.0, 1.0, 3.0})}, 2, true);
    CHECK(fallback.welfare == doctest::Approx(3.0));
}

TEST_CASE("greedy equals exhaustive search on random submodular instances") {
    Rng rng(29);
    for (int t = 0; t < 200; ++t) {
        const int n = 2 + static_cast<int>(rng.uniform01() * 3);
        const int m = 2 + static_cast<int>(rng.uniform01() * 7);
        std::vector<MultiUnitValuation> fs;
        for (int i = 0; i < n; ++i) fs.push_back(test_helpers::random_submodular(rng, m));
        const auto greedy = optimal_multiunit(fs, m);
        const auto brute = brute_force_multiunit(fs, m);
        CHECK(greedy.welfare == doctest::Approx(brute.welfare).epsilon(1e-12));
    }
}

TEST_CASE("discrete optimum equals the continuous share optimum") {
    Rng rng(31);
    for (int t = 0; t < 200; ++t) {
        const int n = 2 + static_cast<int>(rng.uniform01() * 3);
        const int m = 2 + static_cast<int>(rng.uniform01() * 6);
        std::vector<MultiUnitValuation> fs;
        std::vector<ConcavePL> gs;
        for (int i = 0; i < n; ++i) {
            fs.push_back(test_helpers::random_submodular(rng, m));
            gs.push_back(submodular_to_concave(fs.back()));
        }
        CHECK(std::abs(optimal_multiunit(fs, m).welfare - continuous_share_optimum(gs)) <= 1e-9);
    }
}

TEST_CASE("multi-unit valuation validation") {
    CHECK_THROWS_AS(MultiUnitValuation({0.5, 1.0}), std::invalid_argument);   // f(0) != 0
    CHECK_THROWS_AS(MultiUnitValuation({0.0, 2.0, 1.0}), std::invalid_argument);  // decreasing
    CHECK(MultiUnitValuation({0.0, 1.0, 3.0}).is_submodular() == false);
    CHECK(MultiUnitValuation({0.0, 2.0, 3.0, 3.5}).is_submodular());
}
