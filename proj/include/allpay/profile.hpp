#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "allpay/piecewise_cdf.hpp"
#include "allpay/rng.hpp"

namespace allpay {

/// Per-player, per-item bid distributions of a mixed strategy profile.
/// Immutable after construction; all members satisfy the table invariants.
struct MixedProfile {
    std::size_t n_players = 0;
    std::size_t n_items = 0;
    std::vector<PiecewiseCDF> cdfs;  // row-major: player * n_items + item

    MixedProfile(std::size_t players, std::size_t items, std::vector<PiecewiseCDF> tables);

    const PiecewiseCDF& cdf(std::size_t player, std::size_t item) const {
        return cdfs[player * n_items + item];
    }
};

/// Deterministic strategy profile: bids[player][item]. Kept separate from
/// MixedProfile because a point mass at a positive bid has no table
/// representation, and pure profiles need exact tie handling.
using PureProfile = std::vector<std::vector<double>>;

using Profile = std::variant<PureProfile, MixedProfile>;

std::size_t profile_players(const Profile& p);
std::size_t profile_items(const Profile& p);

/// Draws one full bid matrix into `out` (resized as needed). Pure profiles
/// copy their bids exactly. Variates are consumed in (player, item) order.
void sample_bids(const Profile& p, Rng& rng, std::vector<std::vector<double>>& out);

/// CDF of the highest bid on an item over all players.
PiecewiseCDF item_bid_cdf(const MixedProfile& p, std::size_t item);

/// CDF of the highest bid on an item when one player is excluded.
PiecewiseCDF item_bid_cdf_excluding(const MixedProfile& p, std::size_t item, std::size_t player);

/// Expected maximum bid on an item: integral of 1 - F over the support of
/// the max-bid CDF F.
double expected_max_bid(const MixedProfile& p, std::size_t item);

}  // namespace allpay
