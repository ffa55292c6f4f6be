#include <doctest.h>

#include <cmath>

#include "allpay/piecewise_cdf.hpp"
#include "allpay/profile.hpp"
#include "allpay/rng.hpp"
#include "helpers.hpp"

using namespace allpay;

namespace {

PiecewiseCDF strong_half()  // x / v on [0, v] for v = 1/2
{
    return PiecewiseCDF::tabulate([](double x) { return 2.0 * x; }, 0.0, 0.5, 0.0, 257);
}

PiecewiseCDF weak_half()  // x + 1/2 on [0, 1/2], mass 1/2 at zero
{
    return PiecewiseCDF::tabulate([](double x) { return x + 0.5; }, 0.0, 0.5, 0.5, 257);
}

}  // namespace

TEST_CASE("log_dense_grid covers the range strictly increasing") {
    const auto g = log_dense_grid(0.0, 0.5, 4097);
    CHECK(g.size() == 4097);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 0.5);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
    // clustering: the first step is far below the uniform spacing
    CHECK(g[1] - g[0] < 0.5 / 4096 / 100);
}

TEST_CASE("eval: interpolation, atom and tail rules") {
    const auto uniform = PiecewiseCDF::uniform(1.0);
    CHECK(uniform.eval(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(uniform.eval(2.0) == 1.0);
    CHECK(uniform.eval(0.0) == 0.0);

    const auto g2 = weak_half();
    CHECK(g2.eval(0.0) == 0.5);  // atom rule
    CHECK(g2.eval(0.25) == doctest::Approx(0.75).epsilon(1e-12));

    const auto g1 = strong_half();
    CHECK(g1.eval(0.25) == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS((void)uniform.eval(-0.1), std::invalid_argument);
}

TEST_CASE("sample: inverse transform with the atom rule") {
    const auto uniform = PiecewiseCDF::uniform(1.0);
    CHECK(uniform.sample(0.25) == doctest::Approx(0.25).epsilon(1e-15));

    PiecewiseCDF with_atom({0.0, 1.0}, {0.3, 1.0}, 0.3);
    CHECK(with_atom.sample(0.2) == 0.0);

    const auto g2 = weak_half();
    CHECK(g2.sample(0.75) == doctest::Approx(0.25).epsilon(1e-12));

    CHECK_THROWS_AS((void)uniform.sample(1.0), std::invalid_argument);
}

TEST_CASE("constructor rejects malformed tables") {
    CHECK_THROWS_AS(PiecewiseCDF({0.0, 1.0}, {0.5, 0.4}, 0.0), std::invalid_argument);  // decreasing
    CHECK_THROWS_AS(PiecewiseCDF({0.0, 1.0}, {0.0, 0.9}, 0.0), std::invalid_argument);  // terminal != 1
    CHECK_THROWS_AS(PiecewiseCDF({1.0, 0.5}, {0.0, 1.0}, 0.0), std::invalid_argument);  // not increasing
    // mass appearing before the tabulated support would be an interior atom
    CHECK_THROWS_AS(PiecewiseCDF({0.5, 1.0}, {0.4, 1.0}, 0.0), std::invalid_argument);
    // support starting above zero with a flat head is fine
    CHECK_NOTHROW(PiecewiseCDF({0.5, 1.0}, {0.0, 1.0}, 0.0));
}

TEST_CASE("cdf_product: identity, endpoints, pointwise agreement") {
    const auto g1 = strong_half();
    const auto g2 = weak_half();

    const auto same = cdf_product(std::vector<PiecewiseCDF>{g1});
    CHECK(same.eval(0.3) == doctest::Approx(g1.eval(0.3)).epsilon(1e-15));

    const auto prod = cdf_product(std::vector<PiecewiseCDF>{g1, g2});
    CHECK(prod.eval(0.5) == 1.0);
    CHECK(prod.eval(0.25) == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(prod.atom_at_zero() == 0.0);  // 0 * 0.5

    Rng rng(11);
    for (int t = 0; t < 400; ++t) {
        const double x = 0.55 * rng.uniform01();
        CHECK(std::abs(prod.eval(x) - g1.eval(x) * g2.eval(x)) <= 1e-10);
    }

    // three random factors, same pointwise property
    Rng gen(23);
    const auto a = test_helpers::random_cdf(gen);
    const auto b = test_helpers::random_cdf(gen);
    const auto c = test_helpers::random_cdf(gen);
    const auto abc = cdf_product(std::vector<PiecewiseCDF>{a, b, c});
    for (int t = 0; t < 400; ++t) {
        const double x = abc.support_max() * 1.02 * gen.uniform01();
        CHECK(std::abs(abc.eval(x) - a.eval(x) * b.eval(x) * c.eval(x)) <= 1e-10);
    }
    CHECK_THROWS_AS(cdf_product(std::vector<const PiecewiseCDF*>{}), std::invalid_argument);
}

TEST_CASE("integrate: closed forms per segment") {
    const auto uniform = PiecewiseCDF::uniform(1.0);
    CHECK(integrate(uniform, 0.0, 1.0, Integrand::complement) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(integrate(uniform, 0.0, 1.0, Integrand::sqrt_value) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(integrate(uniform, 0.0, 1.0, Integrand::value) == doctest::Approx(0.5).epsilon(1e-14));

    const auto g1 = strong_half();  // x/v, v = 1/2
    CHECK(integrate(g1, 0.0, 0.5, Integrand::complement) == doctest::Approx(0.25).epsilon(1e-12));

    // beyond the support the integrand is constant
    CHECK(integrate(uniform, 0.0, 2.0, Integrand::complement) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(integrate(uniform, 1.0, 2.0, Integrand::sqrt_value) == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS((void)integrate(uniform, 0.5, 0.2, Integrand::value), std::invalid_argument);
    CHECK(integrate(uniform, 0.3, 0.3, Integrand::value) == 0.0);
}

TEST_CASE("sampling then KS stays within the DKW band") {
    Rng gen(2024);
    const long n = 100000;
    const double band = 1.36 / std::sqrt(static_cast<double>(n)) * 1.5;
    std::vector<PiecewiseCDF> fs{PiecewiseCDF::uniform(1.0), weak_half(), strong_half(),
                                 test_helpers::random_cdf(gen)};
    for (const auto& f : fs) {
        std::vector<double> samples(n);
        for (auto& s : samples) s = f.sample(gen.uniform01());
        CHECK(ks_distance(samples, f) < band);
    }
}

TEST_CASE("ks_distance degenerate cases") {
    const auto uniform = PiecewiseCDF::uniform(1.0);
    CHECK(ks_distance(std::vector<double>(50, 0.0), uniform) == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)ks_distance({}, uniform), std::invalid_argument);
}

TEST_CASE("tables stay monotone in [0, 1] with terminal one") {
    Rng gen(7);
    for (int t = 0; t < 50; ++t) {
        const auto f = test_helpers::random_cdf(gen);
        const auto& v = f.values();
        CHECK(v.back() == 1.0);
        for (std::size_t i = 1; i < v.size(); ++i) {
            CHECK(v[i] >= v[i - 1]);
            CHECK(v[i] <= 1.0);
            CHECK(v[i - 1] >= 0.0);
        }
        CHECK(v.front() == f.atom_at_zero());
    }
}

TEST_CASE("expected max bid agrees with a Monte Carlo max") {
    // a lone uniform bidder: the expected maximum is the expected bid
    const MixedProfile lone(1, 1, {PiecewiseCDF::uniform(1.0)});
    CHECK(expected_max_bid(lone, 0) == doctest::Approx(0.5).epsilon(1e-12));

    const auto g1 = strong_half();
    const auto g2 = weak_half();
    const MixedProfile profile(2, 1, {g1, g2});
    const double expected = expected_max_bid(profile, 0);
    CHECK(expected == doctest::Approx(7.0 / 24.0).epsilon(1e-10));

    Rng gen(2025);
    McAccumulator acc;
    for (int s = 0; s < 200000; ++s)
        acc.add(std::max(g1.sample(gen.uniform01()), g2.sample(gen.uniform01())));
    CHECK(std::abs(acc.mean() - expected) <= 3.0 * acc.std_error());
}
