#pragma once

#include <cstdint>
#include <vector>

#include "allpay/piecewise_cdf.hpp"

namespace allpay::bounds {

/// Input of the harmonic-sum inequality: weights g_i > 0 and factors
/// G_i in (0, 1], at least two entries.
struct RatioInput {
    std::vector<double> G;
    std::vector<double> g;
};

struct RatioCheck {
    double lhs;  // sum_i g_i / (sum_{k != i} g_k / G_k)
    double rhs;  // sqrt(prod_i G_i)
    bool holds;  // lhs >= rhs - 1e-12
};

/// Evaluates the inequality  H(G, g) >= sqrt(prod G)  on one input.
RatioCheck harmonic_ratio_check(const RatioInput& in);

struct MinSearchResult {
    double min_value;
    std::vector<double> G;
    std::vector<double> g;
    bool g_at_cap;  // some weight pinned at the search box edge (the
                    // infimum can sit in a g -> infinity limit)
};

/// Multi-start coordinate descent for the minimum of H over (G, g) with
/// prod G fixed to `target_product`, 0 < G_i <= 1, g log-parameterized and
/// capped at 1e8.
MinSearchResult harmonic_ratio_min_search(int n, double target_product, int starts = 32,
                                          int iters = 600, std::uint64_t seed = 1);

/// Two-block reduction value
///   L = k g / ((k-1) g / a + n - k) + (n - k) / (k g / a + n - k - 1)
/// for n >= 2, 1 <= k <= n, a in (0, 1], g > 0. Always at least a; at
/// least sqrt(a) when k <= 1 / (1 - sqrt(a)).
double two_block_bound(int n, int k, double a, double g);

/// Best guaranteed one-item deviation utility against the max-bid CDF F:
/// max over x >= 0 of F(x) * v - x. The objective is piecewise linear, so
/// the maximum sits on a grid point (x = 0 included).
double deviation_value(const PiecewiseCDF& f, double v);

struct WelfareFunctional {
    double deviation_value;  // the inner max A
    double value;            // A + int_0^{v-A} (1-F) + lambda * int_0^{v-A} sqrt(F)
};

/// The per-item welfare functional used by the combinatorial bound.
WelfareFunctional welfare_functional(const PiecewiseCDF& f, double v, double lambda);

/// Worst-case reshaping of a CDF: zero up to x0, then the line (x + A) / v
/// up to v - A, with x0 chosen so the area of 1 - F over [0, v - A] is
/// preserved. Never increases the welfare functional.
PiecewiseCDF worst_case_form(const PiecewiseCDF& f, double v);

/// Member of the worst-case family with the given deviation value A and
/// flat run x0 (jump represented as a width ~1e-13 ramp).
PiecewiseCDF hat_family(double v, double deviation_value, double zero_run);

/// Lower bound (3 + 4 lambda - lambda^4) / 6 of the welfare functional per
/// unit of v, valid for lambda in [0, 1].
double welfare_functional_floor(double lambda);

}  // namespace allpay::bounds
