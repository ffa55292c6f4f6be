#include <doctest.h>

#include <cmath>

#include "allpay/bounds.hpp"
#include "allpay/rng.hpp"
#include "helpers.hpp"

using namespace allpay;
using namespace allpay::bounds;

TEST_CASE("harmonic ratio check on hand inputs") {
    const auto unit = harmonic_ratio_check({{1.0, 1.0}, {1.0, 1.0}});
    CHECK(unit.lhs == doctest::Approx(2.0));
    CHECK(unit.rhs == doctest::Approx(1.0));
    CHECK(unit.holds);

    const auto skew = harmonic_ratio_check({{1.0, 1.0}, {1.0, 3.0}});
    CHECK(skew.lhs == doctest::Approx(10.0 / 3.0).epsilon(1e-12));
    CHECK(skew.holds);

    CHECK_THROWS_AS((void)harmonic_ratio_check({{1.0}, {1.0}}), std::invalid_argument);
    CHECK_THROWS_AS((void)harmonic_ratio_check({{1.0, 1.2}, {1.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS((void)harmonic_ratio_check({{1.0, 1.0}, {0.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("harmonic ratio holds on random inputs") {
    Rng rng(41);
    for (int n = 2; n <= 6; ++n) {
        for (int t = 0; t < 3000; ++t) {
            RatioInput in;
            in.G.resize(static_cast<std::size_t>(n));
            in.g.resize(static_cast<std::size_t>(n));
            for (auto& G : in.G) G = 1.0 - 0.999999 * rng.uniform01();
            for (auto& g : in.g) g = std::exp(-6.9 + 13.8 * rng.uniform01());
            CHECK(harmonic_ratio_check(in).holds);
        }
    }
}

TEST_CASE("minimum search stays above the square-root floor") {
    // for product 1 every G is forced to 1 and the minimum is n/(n-1)
    const auto unit = harmonic_ratio_min_search(2, 1.0, 16, 300, 9);
    CHECK(unit.min_value >= 1.0);
    CHECK(unit.min_value == doctest::Approx(2.0).epsilon(1e-3));

    const auto ten = harmonic_ratio_min_search(10, 1.0, 16, 300, 9);
    CHECK(ten.min_value == doctest::Approx(10.0 / 9.0).epsilon(1e-3));

    // product 0.25: the constrained minimum is 2 sqrt(P) - P (n-2)/(n-1),
    // reached by a single small-G coordinate with weight sqrt(P) (n-1) - (n-2) P
    const auto search = harmonic_ratio_min_search(10, 0.25, 24, 400, 9);
    CHECK(search.min_value >= 0.5 - 1e-9);
    CHECK(search.min_value == doctest::Approx(7.0 / 9.0).epsilon(2e-3));
}

TEST_CASE("two-block bound values and properties") {
    for (int n : {2, 5, 9}) {
        const double a = 0.37;
        CHECK(two_block_bound(n, n, a, 3.1) ==
              doctest::Approx(static_cast<double>(n) / (n - 1) * a).epsilon(1e-12));
    }
    CHECK(two_block_bound(10, 2, 0.25, 1e6) == doctest::Approx(0.5).epsilon(2e-5));

    Rng rng(43);
    for (int t = 0; t < 10000; ++t) {
        const int n = 2 + static_cast<int>(rng.uniform01() * 10);
        const int k = 1 + static_cast<int>(rng.uniform01() * n);
        const double a = 1.0 - 0.999 * rng.uniform01();
        const double g = std::exp(-4.6 + 13.8 * rng.uniform01());
        const double L = two_block_bound(n, k, a, g);
        CHECK(L >= a - 1e-12);
        if (static_cast<double>(k) <= 1.0 / (1.0 - std::sqrt(a))) CHECK(L >= std::sqrt(a) - 1e-12);
    }
    CHECK_THROWS_AS((void)two_block_bound(1, 1, 0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)two_block_bound(4, 5, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("deviation value of tabulated CDFs") {
    CHECK(deviation_value(PiecewiseCDF::uniform(1.0), 1.0) == 0.0);
    const auto half = PiecewiseCDF::uniform(0.5);  // x / v with v = 1/2
    CHECK(deviation_value(half, 2.0) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(deviation_value(PiecewiseCDF::point_mass_at_zero(), 0.7) == doctest::Approx(0.7));
}

TEST_CASE("welfare functional: degenerate and linear cases") {
    const auto all_zero = PiecewiseCDF::point_mass_at_zero();
    const auto at_v = welfare_functional(all_zero, 0.7, 0.56);
    CHECK(at_v.deviation_value == doctest::Approx(0.7));
    CHECK(at_v.value == doctest::Approx(0.7));

    const auto linear = welfare_functional(PiecewiseCDF::uniform(1.0), 1.0, 0.0);
    CHECK(linear.deviation_value == 0.0);
    CHECK(linear.value == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("floor formula and the tight family") {
    CHECK(welfare_functional_floor(0.0) == doctest::Approx(0.5));
    CHECK(welfare_functional_floor(1.0) == doctest::Approx(1.0));
    const double lambda = 0.56;
    const double floor = welfare_functional_floor(lambda);
    CHECK(floor == doctest::Approx(0.8569425066666667).epsilon(1e-12));
    CHECK_THROWS_AS((void)welfare_functional_floor(1.2), std::invalid_argument);

    // t = lambda^2 attains the floor exactly, for any split of t into
    // deviation value and flat run
    const double t = lambda * lambda;
    for (double v : {1.0, 2.5}) {
        const auto zero_dev = welfare_functional(hat_family(v, 0.0, t * v), v, lambda);
        CHECK(std::abs(zero_dev.value - floor * v) <= 1e-9);
        const auto split = welfare_functional(hat_family(v, 0.1 * v, (t - 0.1) * v), v, lambda);
        CHECK(std::abs(split.value - floor * v) <= 1e-9);
    }

    // closed form of the family value at any t
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const double tt = rng.uniform01();
        const auto r = welfare_functional(hat_family(1.0, 0.0, tt), 1.0, lambda);
        const double expect = 0.5 * (1.0 + tt * tt) + 2.0 * lambda / 3.0 * (1.0 - std::pow(tt, 1.5));
        CHECK(r.value == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("worst-case reshaping preserves area and never raises the functional") {
    // quadratic CDF: the flat run solves x0 + (1 - x0)^2 / 2 = area(1 - x^2)
    const auto quad = PiecewiseCDF::tabulate([](double x) { return x * x; }, 0.0, 1.0, 0.0, 2001);
    const double area = integrate(quad, 0.0, 1.0, Integrand::complement);
    double lo = 0.0, hi = 1.0;  // independent bisection oracle on the area match
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double hat_area = mid + 0.5 * (1.0 - mid) * (1.0 - mid);
        (hat_area < area ? lo : hi) = mid;
    }
    const double oracle_x0 = 0.5 * (lo + hi);
    CHECK(oracle_x0 == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-4));

    const PiecewiseCDF hat = worst_case_form(quad, 1.0);
    CHECK(hat.grid()[1] == doctest::Approx(oracle_x0).epsilon(1e-9));
    CHECK(integrate(hat, 0.0, 1.0, Integrand::complement) == doctest::Approx(area).epsilon(1e-9));

    const double lambda = 0.56;
    CHECK(welfare_functional(quad, 1.0, lambda).value >=
          welfare_functional(hat, 1.0, lambda).value - 1e-9);

    // members of the worst-case family are fixed points
    const PiecewiseCDF member = hat_family(1.0, 0.2, 0.3);
    const PiecewiseCDF again = worst_case_form(member, 1.0);
    CHECK(again.grid()[1] == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(welfare_functional(again, 1.0, lambda).value ==
          doctest::Approx(welfare_functional(member, 1.0, lambda).value).epsilon(1e-10));
}

TEST_CASE("worst-case reshaping on random CDFs") {
    Rng rng(47);
    for (int t = 0; t < 1000; ++t) {
        const auto f = test_helpers::random_cdf(rng);
        const auto hat = worst_case_form(f, 1.0);
        for (double lambda : {0.2, 0.56, 0.9}) {
            const double rf = welfare_functional(f, 1.0, lambda).value;
            const double rh = welfare_functional(hat, 1.0, lambda).value;
            CHECK(rf >= rh - 1e-9);
            CHECK(rf >= welfare_functional_floor(lambda) - 1e-6);
        }
    }
}
