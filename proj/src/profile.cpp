#include "allpay/profile.hpp"

#include <stdexcept>
#include <utility>

namespace allpay {

MixedProfile::MixedProfile(std::size_t players, std::size_t items, std::vector<PiecewiseCDF> tables)
    : n_players(players), n_items(items), cdfs(std::move(tables)) {
    if (n_players == 0 || n_items == 0) throw std::invalid_argument("MixedProfile: empty dimensions");
    if (cdfs.size() != n_players * n_items)
        throw std::invalid_argument("MixedProfile: table count does not match dimensions");
}

std::size_t profile_players(const Profile& p) {
    if (const auto* pure = std::get_if<PureProfile>(&p)) return pure->size();
    return std::get<MixedProfile>(p).n_players;
}

std::size_t profile_items(const Profile& p) {
    if (const auto* pure = std::get_if<PureProfile>(&p)) return pure->empty() ? 0 : pure->front().size();
    return std::get<MixedProfile>(p).n_items;
}

void sample_bids(const Profile& p, Rng& rng, std::vector<std::vector<double>>& out) {
    if (const auto* pure = std::get_if<PureProfile>(&p)) {
        out = *pure;
        return;
    }
    const auto& mixed = std::get<MixedProfile>(p);
    out.resize(mixed.n_players);
    for (std::size_t i = 0; i < mixed.n_players; ++i) {
        out[i].resize(mixed.n_items);
        for (std::size_t j = 0; j < mixed.n_items; ++j) out[i][j] = mixed.cdf(i, j).sample(rng.uniform01());
    }
}

PiecewiseCDF item_bid_cdf(const MixedProfile& p, std::size_t item) {
    if (item >= p.n_items) throw std::invalid_argument("item_bid_cdf: item out of range");
    std::vector<const PiecewiseCDF*> column;
    column.reserve(p.n_players);
    for (std::size_t i = 0; i < p.n_players; ++i) column.push_back(&p.cdf(i, item));
    return cdf_product(column);
}

PiecewiseCDF item_bid_cdf_excluding(const MixedProfile& p, std::size_t item, std::size_t player) {
    if (item >= p.n_items) throw std::invalid_argument("item_bid_cdf_excluding: item out of range");
    if (player >= p.n_players) throw std::invalid_argument("item_bid_cdf_excluding: player out of range");
    if (p.n_players == 1) return PiecewiseCDF::point_mass_at_zero();  // nobody else bids
    std::vector<const PiecewiseCDF*> column;
    column.reserve(p.n_players - 1);
    for (std::size_t i = 0; i < p.n_players; ++i)
        if (i != player) column.push_back(&p.cdf(i, item));
    return cdf_product(column);
}

double expected_max_bid(const MixedProfile& p, std::size_t item) {
    const PiecewiseCDF f = item_bid_cdf(p, item);
    return integrate(f, 0.0, f.support_max(), Integrand::complement);
}

}  // namespace allpay
