#pragma once

#include <vector>

#include "allpay/valuations.hpp"

namespace allpay::psam {

/// Proportional shares x_i = m b_i / sum(b). All-zero bids yield the zero
/// vector; negative bids are rejected.
std::vector<double> fractional_shares(const std::vector<double>& bids, int m);

/// Lottery over integral allocations with exact marginals.
struct RandomAllocation {
    struct Entry {
        std::vector<int> allocation;
        double probability;
    };
    std::vector<double> fractional;
    std::vector<Entry> support;

    /// Checks probabilities sum to 1, every entry is the floor or ceiling
    /// of its share, expected allocations match the fractional vector, and
    /// the support has at most n+1 entries. Throws on violation.
    void validate(double tol = 1e-12) const;
};

/// Systematic (circular) rounding of a fractional vector with integral
/// sum: the fractional parts are laid out as consecutive arcs and a
/// unit-spaced grid of marks at a common offset picks who is rounded up.
/// E[X_i] = x_i exactly and the support has at most n+1 outcomes.
RandomAllocation dependent_round(const std::vector<double>& shares);

struct Outcome {
    std::vector<int> allocation;
    std::vector<double> payments;  // equal to the bids
};

/// One mechanism run: proportional shares, systematic rounding at offset
/// u in [0, 1), everyone pays their bid.
Outcome outcome(const std::vector<double>& bids, int m, double u);

/// Exact expected utility of `player` under the rounding lottery:
/// g(b_i / sum b) - b_i through the piecewise-linear transform, no
/// sampling. Requires a submodular valuation.
double expected_utility(const MultiUnitValuation& f, const std::vector<double>& bids,
                        std::size_t player, int m);

double kelly_utility(const ConcavePL& g, double bid, double others_total);

/// Best response in the proportional-share game against a fixed total of
/// other bids: argmax of g(b / (b + others)) - b, solved per linear
/// segment in closed form. others_total must be positive (with no rival
/// bids the supremum is not attained).
double kelly_best_response(const ConcavePL& g, double others_total);

/// The unique pure equilibrium bid vector, found by bisection on the
/// aggregate bid: for a candidate total B every player's stationary share
/// solves slope(theta) (1 - theta) = B, and the root of sum(theta) = 1 is
/// bracketed. Requires at least two players with positive value.
std::vector<double> pure_nash(const std::vector<MultiUnitValuation>& fs, int m);

/// Same, from a caller-supplied bracket (used to probe uniqueness).
std::vector<double> pure_nash(const std::vector<MultiUnitValuation>& fs, int m, double bracket_lo,
                              double bracket_hi);

struct Efficiency {
    double ne_welfare;
    double opt_welfare;
    double ratio;
    std::vector<double> bids;
    std::vector<double> shares;
};

/// Equilibrium welfare (exact, via the concave transform at the fractional
/// shares) against the discrete optimum. The ratio is checked against the
/// 3/4 floor.
Efficiency efficiency(const std::vector<MultiUnitValuation>& fs, int m);

}  // namespace allpay::psam
