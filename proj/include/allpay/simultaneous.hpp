#pragma once

#include <cstdint>
#include <vector>

#include "allpay/profile.hpp"
#include "allpay/valuations.hpp"

namespace allpay {

enum class TieRule { lowest_index, uniform_random };

struct AuctionOutcome {
    std::vector<std::size_t> winner;   // per item
    std::vector<double> payments;      // per player: sum of own bids (all-pay)
};

/// One realized simultaneous all-pay auction: each item goes to its
/// highest bidder (ties to the lowest index by default), everyone pays the
/// sum of their bids. `rng` is only consulted under random tie-breaking.
AuctionOutcome run_auction(const std::vector<std::vector<double>>& bids,
                           TieRule rule = TieRule::lowest_index, Rng* rng = nullptr);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long samples = 0;
};

/// Monte Carlo expected welfare of a profile. Deterministic for a fixed
/// (seed, workers) pair.
McEstimate mc_expected_welfare(const Profile& profile, const std::vector<XOSValuation>& vs,
                               long samples, std::uint64_t seed, int workers = 1);

/// Best guaranteed utility of deviating on one item against the rivals'
/// max-bid CDF: max over x >= 0 of F(x) * item_value - x.
double deviation_value(const PiecewiseCDF& opponents_max_cdf, double item_value);

struct InequalityReport {
    McEstimate welfare;                   // Monte Carlo left side
    double rhs = 0.0;                     // analytic right side
    double slack = 0.0;                   // welfare.mean - rhs
    bool holds_within_3sigma = false;     // slack >= -3 std errors
    std::vector<double> per_item_rhs;
    std::vector<double> deviation_values;  // per-item inner max A_j
};

/// Welfare floor from guaranteed one-item deviations: checks
///   E[SW] >= sum_j (A_j + int_0^{o_j - A_j} (1 - F_j))
/// on the supplied profile, with A_j and the optimal contributions o_j
/// computed from the exhaustive optimum.
InequalityReport validate_inequality_1(const Profile& profile, const std::vector<XOSValuation>& vs,
                                       long samples, std::uint64_t seed, int workers = 1);

/// The square-root welfare floor: E[SW] >= sum_j int_0^{o_j - A_j} sqrt(F_j).
InequalityReport validate_inequality_2(const Profile& profile, const std::vector<XOSValuation>& vs,
                                       long samples, std::uint64_t seed, int workers = 1);

/// Price-of-anarchy bound (6 lambda + 6) / (3 + 4 lambda - lambda^4)
/// obtained by combining the two welfare floors; minimized near 0.56.
double combined_poa_bound(double lambda);

enum class DeviationFamily {
    per_item_grid,      // replace one item's strategy by a fixed bid from a grid
    optimal_item_bid,   // bid argmax F_ij(x) o_j - x on optimal items, 0 elsewhere
};

struct RegretEstimate {
    double regret = 0.0;      // best deviation gain found (>= 0; the null deviation is included)
    double std_error = 0.0;   // of the best deviation's gain
    std::size_t item = 0;     // argmax deviation (grid family)
    double bid = 0.0;
    McEstimate baseline;
};

/// Empirical regret of one player against a family of deviations, using
/// common random numbers for the deviation/baseline difference. This is an
/// epsilon-equilibrium certificate relative to the family only.
RegretEstimate best_response_regret(const Profile& profile, const std::vector<XOSValuation>& vs,
                                    std::size_t player, DeviationFamily family, long samples,
                                    std::uint64_t seed, int grid_size = 400, int workers = 1);

}  // namespace allpay
