#include <doctest.h>

#include <cmath>

#include "allpay/psam.hpp"
#include "allpay/rng.hpp"
#include "helpers.hpp"

using namespace allpay;
using namespace allpay::psam;

TEST_CASE("proportional shares") {
    CHECK(fractional_shares({1.0, 1.0}, 4) == std::vector<double>{2.0, 2.0});
    CHECK(fractional_shares({0.0, 0.0}, 5) == std::vector<double>{0.0, 0.0});
    const auto prop = fractional_shares({2.5, 1.6, 1.9}, 6);  // bids already sum to m
    CHECK(prop[0] == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(prop[1] == doctest::Approx(1.6).epsilon(1e-14));
    CHECK(prop[2] == doctest::Approx(1.9).epsilon(1e-14));
    CHECK_THROWS_AS((void)fractional_shares({-1.0, 2.0}, 3), std::invalid_argument);
}

TEST_CASE("systematic rounding: integral input, two-point lottery, worked example") {
    const auto integral = dependent_round({2.0, 2.0});
    integral.validate();
    CHECK(integral.support.size() == 1);
    CHECK(integral.support[0].allocation == std::vector<int>{2, 2});
    CHECK(integral.support[0].probability == doctest::Approx(1.0));

    const auto coin = dependent_round({0.5, 0.5});
    coin.validate();
    CHECK(coin.support.size() == 2);
    for (const auto& e : coin.support) CHECK(e.probability == doctest::Approx(0.5));

    // consecutive-arc rounding of (2.5, 1.6, 1.9)
    const auto mixed = dependent_round({2.5, 1.6, 1.9});
    mixed.validate();
    REQUIRE(mixed.support.size() == 3);
    CHECK(mixed.support[0].allocation == std::vector<int>{3, 2, 1});
    CHECK(mixed.support[0].probability == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(mixed.support[1].allocation == std::vector<int>{3, 1, 2});
    CHECK(mixed.support[1].probability == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(mixed.support[2].allocation == std::vector<int>{2, 2, 2});
    CHECK(mixed.support[2].probability == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS((void)dependent_round({0.5, 0.7}), std::invalid_argument);

    // cumulative fractional parts can overshoot the integral total in the
    // last bits; the arc layout must stay consistent anyway
    const auto drift = dependent_round({0.5, 0.5 + 4e-16, 3.0});
    CHECK_NOTHROW(drift.validate(1e-12));
}

TEST_CASE("the validator accepts any decomposition with the right marginals") {
    RandomAllocation handmade;
    handmade.fractional = {2.5, 1.6, 1.9};
    handmade.support = {{{3, 2, 1}, 0.1}, {{3, 1, 2}, 0.4}, {{2, 2, 2}, 0.5}};
    CHECK_NOTHROW(handmade.validate());

    handmade.support[0].probability = 0.2;  // marginals now off
    handmade.support[2].probability = 0.4;
    CHECK_THROWS_AS(handmade.validate(), std::invalid_argument);
}

TEST_CASE("rounding keeps exact marginals on random share vectors") {
    Rng rng(53);
    for (int t = 0; t < 2000; ++t) {
        const int n = 2 + static_cast<int>(rng.uniform01() * 10);
        std::vector<double> shares(static_cast<std::size_t>(n));
        double total = 0.0;
        for (auto& s : shares) {
            s = 3.0 * rng.uniform01();
            total += s;
        }
        const double target = std::ceil(total);
        for (auto& s : shares) s *= target / total;  // integral total
        const auto rounded = dependent_round(shares);
        CHECK_NOTHROW(rounded.validate(1e-12));
        CHECK(rounded.support.size() <= shares.size() + 1);
    }
}

TEST_CASE("single mechanism run") {
    const auto balanced = outcome({1.0, 1.0}, 4, 0.37);
    CHECK(balanced.allocation == std::vector<int>{2, 2});
    CHECK(balanced.payments == std::vector<double>{1.0, 1.0});

    const auto idle = outcome({0.0, 0.0}, 5, 0.9);
    CHECK(idle.allocation == std::vector<int>{0, 0});
    CHECK(idle.payments == std::vector<double>{0.0, 0.0});

    const auto skew = outcome({3.0, 1.0}, 1, 0.1);
    CHECK(skew.allocation == std::vector<int>{1, 0});
    CHECK(skew.payments == std::vector<double>{3.0, 1.0});
}

TEST_CASE("expected utility equals the share-transform value") {
    CHECK(expected_utility(MultiUnitValuation({0.0, 1.0, 2.0}), {1.0, 1.0}, 0, 2) ==
          doctest::Approx(0.0));
    CHECK(expected_utility(MultiUnitValuation({0.0, 2.0, 3.0, 3.5}), {1.0, 2.0}, 0, 3) ==
          doctest::Approx(1.0));
    CHECK(expected_utility(MultiUnitValuation({0.0, 2.0, 3.0, 3.5}), {0.0, 2.0}, 0, 3) == 0.0);
    CHECK_THROWS_AS((void)expected_utility(MultiUnitValuation({0.0, 1.0, 3.0}), {1.0, 1.0}, 0, 2),
                    std::invalid_argument);
}

TEST_CASE("utility through the explicit rounding lottery matches the transform") {
    Rng rng(59);
    for (int t = 0; t < 500; ++t) {
        const int n = 2 + static_cast<int>(rng.uniform01() * 4);
        const int m = 1 + static_cast<int>(rng.uniform01() * 6);
        std::vector<double> bids(static_cast<std::size_t>(n));
        for (auto& b : bids) b = rng.uniform01() * 3.0;
        bids[0] = std::max(bids[0], 1e-3);  // keep the total positive
        const auto f = test_helpers::random_submodular(rng, m);
        const std::size_t player = static_cast<std::size_t>(rng.uniform01() * n);

        const auto rounded = dependent_round(fractional_shares(bids, m));
        double through_lottery = -bids[player];
        for (const auto& e : rounded.support)
            through_lottery +=
                e.probability * f.value[static_cast<std::size_t>(e.allocation[player])];
        CHECK(std::abs(through_lottery - expected_utility(f, bids, player, m)) <= 1e-12);
    }
}

TEST_CASE("best response against fixed rival bids") {
    const ConcavePL linear = submodular_to_concave(MultiUnitValuation({0.0, 1.0, 2.0}));
    CHECK(kelly_best_response(linear, 0.5) == doctest::Approx(0.5).epsilon(1e-12));

    // marginal value below the aggregate price: sitting out is optimal
    const ConcavePL small = submodular_to_concave(MultiUnitValuation({0.0, 0.3, 0.3}));
    CHECK(kelly_best_response(small, 2.0) == 0.0);

    CHECK_THROWS_AS((void)kelly_best_response(linear, 0.0), std::invalid_argument);
}

TEST_CASE("pure equilibrium of the linear symmetric game") {
    const MultiUnitValuation f({0.0, 1.0, 2.0});
    const auto bids = pure_nash({f, f}, 2);
    CHECK(bids[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(bids[1] == doctest::Approx(0.5).epsilon(1e-10));

    CHECK_THROWS_AS((void)pure_nash({f, MultiUnitValuation({0.0, 0.0})}, 1), std::invalid_argument);

    // three unit-demand players cannot soak up four units: stationary
    // shares stay at 3/4 for every price and no equilibrium exists
    const MultiUnitValuation unit_demand({0.0, 1.0, 1.0, 1.0, 1.0});
    CHECK_THROWS_AS((void)pure_nash({unit_demand, unit_demand, unit_demand}, 4),
                    std::invalid_argument);
}

TEST_CASE("one strong bidder against many half-value rivals") {
    std::vector<MultiUnitValuation> fs;
    fs.emplace_back(std::vector<double>{0.0, 1.0});
    for (int i = 0; i < 49; ++i) fs.emplace_back(std::vector<double>{0.0, 0.5});
    const auto bids = pure_nash(fs, 1);
    double aggregate = 0.0;
    for (double b : bids) aggregate += b;
    CHECK(aggregate == doctest::Approx(49.0 / 99.0).epsilon(1e-10));

    const auto eff = efficiency(fs, 1);
    CHECK(eff.ratio == doctest::Approx(149.0 / 198.0).epsilon(1e-10));
    CHECK(eff.opt_welfare == doctest::Approx(1.0));
}

TEST_CASE("equilibrium is reproducible across brackets and has no profitable deviation") {
    Rng rng(61);
    for (int t = 0; t < 20; ++t) {
        const int n = 2 + static_cast<int>(rng.uniform01() * 4);
        const int m = 1 + static_cast<int>(rng.uniform01() * 6);
        std::vector<MultiUnitValuation> fs;
        for (int i = 0; i < n; ++i) fs.push_back(test_helpers::random_submodular(rng, m));
        const auto bids = pure_nash(fs, m);

        double top = 0.0, total = 0.0;
        for (const auto& f : fs) top = std::max(top, submodular_to_concave(f).slope(0));
        for (double b : bids) total += b;

        for (int r = 0; r < 10; ++r) {
            const double hi = top * (1.0 + rng.uniform01());
            const auto again = pure_nash(fs, m, hi * 1e-9 * (0.5 + rng.uniform01()), hi);
            for (std::size_t i = 0; i < bids.size(); ++i)
                CHECK(std::abs(again[i] - bids[i]) <= 1e-8);
        }
        for (std::size_t i = 0; i < bids.size(); ++i) {
            const ConcavePL g = submodular_to_concave(fs[i]);
            const double others = total - bids[i];
            const double br = kelly_best_response(g, others);
            CHECK(kelly_utility(g, br, others) - kelly_utility(g, bids[i], others) <= 1e-8);
        }
    }
}

TEST_CASE("equilibrium efficiency: symmetry and the 3/4 floor") {
    const MultiUnitValuation f({0.0, 4.0, 7.0, 9.0, 10.0});
    const auto sym = efficiency({f, f}, 4);
    CHECK(sym.ratio == doctest::Approx(1.0).epsilon(1e-9));

    Rng rng(67);
    for (int t = 0; t < 100; ++t) {
        const int n = 2 + static_cast<int>(rng.uniform01() * 3);
        const int m = 1 + static_cast<int>(rng.uniform01() * 7);
        std::vector<MultiUnitValuation> fs;
        for (int i = 0; i < n; ++i) fs.push_back(test_helpers::random_submodular(rng, m));
        const auto eff = efficiency(fs, m);
        CHECK(eff.ratio >= 0.75 - 1e-6);
        CHECK(eff.opt_welfare == doctest::Approx(brute_force_multiunit(fs, m).welfare).epsilon(1e-12));
    }
}
