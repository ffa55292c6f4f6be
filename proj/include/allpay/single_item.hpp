#pragma once

#include <cstddef>
#include <vector>

#include "allpay/profile.hpp"

namespace allpay {

/// Single-item instance: valuations sorted nonincreasing. The top value is
/// the normalization scale for all constructed equilibria.
struct SingleItemInstance {
    std::vector<double> values;

    explicit SingleItemInstance(std::vector<double> vals);

    std::size_t n_players() const { return values.size(); }
    double top() const { return values.front(); }
    double second() const { return values[1]; }
};

/// Welfare-minimizing mixed equilibrium for instances with one strong
/// bidder and n-1 equal rivals (values v1 >= v > 0 for all others):
///   G_1(x) = x / (v (1 - v + x)^((n-2)/(n-1)))
///   G_i(x) = (1 - v + x)^(1/(n-1))  with mass (1 - v)^(1/(n-1)) at 0
/// on [0, v] after normalizing v1 to 1; the output is rescaled by v1.
MixedProfile worst_case_equilibrium(const SingleItemInstance& inst, std::size_t grid_points = 4097);

/// Equilibrium welfare in the infinite-rival limit, top value normalized
/// to 1: (1-v)^2 / v * ln(1/(1-v)) + v for v in (0, 1).
double asymptotic_welfare(double v);

/// Expected welfare of a constructed worst-case profile: the strong
/// bidder's win probability via Stieltjes integration of the rivals' max
/// CDF against her own bid table.
double equilibrium_welfare(const MixedProfile& profile, const SingleItemInstance& inst);

/// Equilibrium revenue in the many-symmetric-rivals limit with v1 = 1 and
/// rival value v: 2v - 1 - (1-v)^2/v * ln(1-v).
double closed_form_revenue(double v);

struct MaxBidBound {
    double expected_max_bid;
    double bound;  // second() / 2
    bool holds;    // expected_max_bid >= bound - 1e-9
};

/// Expected maximum bid of the symmetric k-rival equilibrium whose max-bid
/// CDF is (x/v2) ((v1-v2+x)/v1)^(1/(k-1)) on [0, v2], checked against the
/// revenue floor of half the second valuation.
MaxBidBound max_bid_bound_check(const SingleItemInstance& inst, int k, std::size_t grid_points = 4097);

/// Rank-prize weights: the top bidder wins with probability q1, the second
/// with q2; lower ranks get nothing here. Requires q2 < q1 and q1+q2 <= 1.
struct PrizeVector {
    double q1;
    double q2;
    PrizeVector(double q1_, double q2_);
};

struct QEquilibrium {
    MixedProfile profile;  // two active bidders, any extras at zero
    double revenue;        // v (q1 - q2) / 2 + v^2 (q1 - q2) / 2
    double expected_max_bid;
    double support_max;    // v (q1 - q2)
};

/// Mixed equilibrium of the rank-prize all-pay mechanism for values
/// (1, v, 0, ..., 0): both active bidders mix on [0, v (q1 - q2)].
QEquilibrium q_mechanism_equilibrium(double v, const PrizeVector& q, std::size_t n_players = 2);

struct FirstPriceProfile {
    std::vector<double> bids;  // everyone at the second valuation
    double revenue;
    double max_bid;
};

/// Worst-case pure equilibrium of the first-price auction under the
/// tie rule that favors player 1: all players bid the second valuation.
FirstPriceProfile first_price_worst_case(const SingleItemInstance& inst);

}  // namespace allpay
