#pragma once

#include <vector>

#include "allpay/piecewise_cdf.hpp"
#include "allpay/rng.hpp"
#include "allpay/valuations.hpp"

namespace test_helpers {

/// Random monotone table on [0, hi] with an optional atom at zero.
inline allpay::PiecewiseCDF random_cdf(allpay::Rng& rng, double hi_scale = 1.0) {
    const std::size_t points = 4 + static_cast<std::size_t>(rng.uniform01() * 28);
    const double hi = hi_scale * (0.4 + 1.2 * rng.uniform01());
    const double atom = rng.uniform01() < 0.3 ? 0.4 * rng.uniform01() : 0.0;
    std::vector<double> grid{0.0}, values{atom};
    double x = 0.0, y = atom;
    for (std::size_t i = 0; i < points; ++i) {
        x += rng.uniform01() + 1e-3;
        grid.push_back(x);
        y += rng.uniform01() + 1e-3;
        values.push_back(y);
    }
    for (std::size_t i = 1; i < grid.size(); ++i) grid[i] *= hi / x;
    for (std::size_t i = 1; i < values.size(); ++i)
        values[i] = atom + (1.0 - atom) * (values[i] - atom) / (y - atom);
    values.back() = 1.0;
    return allpay::PiecewiseCDF(grid, values, atom);
}

inline allpay::XOSValuation random_xos(allpay::Rng& rng, std::size_t n_items) {
    const std::size_t n_clauses = 1 + static_cast<std::size_t>(rng.uniform01() * 3);
    std::vector<std::vector<double>> clauses(n_clauses, std::vector<double>(n_items));
    for (auto& c : clauses)
        for (double& w : c) w = rng.uniform01();
    return allpay::XOSValuation(clauses);
}

/// Random submodular valuation with strictly decreasing positive marginals.
inline allpay::MultiUnitValuation random_submodular(allpay::Rng& rng, int m) {
    std::vector<double> f{0.0};
    double marginal = 0.5 + 1.5 * rng.uniform01();
    for (int k = 0; k < m; ++k) {
        f.push_back(f.back() + marginal);
        marginal *= 0.35 + 0.6 * rng.uniform01();
        marginal = std::max(marginal, 1e-3);
    }
    return allpay::MultiUnitValuation(f);
}

}  // namespace test_helpers
