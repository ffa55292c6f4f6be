#include "allpay/simultaneous.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "allpay/bounds.hpp"

namespace allpay {

AuctionOutcome run_auction(const std::vector<std::vector<double>>& bids, TieRule rule, Rng* rng) {
    if (bids.empty() || bids.front().empty()) throw std::invalid_argument("run_auction: empty bid matrix");
    const std::size_t n = bids.size();
    const std::size_t m = bids.front().size();
    for (const auto& row : bids) {
        if (row.size() != m) throw std::invalid_argument("run_auction: ragged bid matrix");
        for (double b : row)
            if (!(b >= 0.0) || !std::isfinite(b))
                throw std::invalid_argument("run_auction: bids must be nonnegative");
    }
    if (rule == TieRule::uniform_random && rng == nullptr)
        throw std::invalid_argument("run_auction: random tie-breaking needs a generator");
    AuctionOutcome out;
    out.winner.resize(m);
    out.payments.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        out.payments[i] = std::accumulate(bids[i].begin(), bids[i].end(), 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double best = -1.0;
        std::size_t who = 0;
        std::size_t tied = 1;
        for (std::size_t i = 0; i < n; ++i) {
            if (bids[i][j] > best) {
                best = bids[i][j];
                who = i;
                tied = 1;
            } else if (bids[i][j] == best && rule == TieRule::uniform_random) {
                ++tied;  // reservoir pick among tied maxima
                if (rng->uniform01() < 1.0 / static_cast<double>(tied)) who = i;
            }
        }
        out.winner[j] = who;
    }
    return out;
}

namespace {

struct ItemThreshold {
    double max_other;       // highest rival bid on the item
    std::size_t rival_idx;  // lowest rival index attaining it
};

bool beats(double bid, const ItemThreshold& t, std::size_t player) {
    return bid > t.max_other || (bid == t.max_other && player < t.rival_idx);
}

double welfare_of(const std::vector<std::vector<double>>& bids, const std::vector<XOSValuation>& vs) {
    const std::size_t n = bids.size();
    const std::size_t m = bids.front().size();
    std::vector<ItemMask> won(n, 0);
    for (std::size_t j = 0; j < m; ++j) {
        double best = -1.0;
        std::size_t who = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (bids[i][j] > best) {
                best = bids[i][j];
                who = i;
            }
        won[who] |= (1ULL << j);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (won[i]) total += vs[i].value(won[i]);
    return total;
}

void check_shapes(const Profile& profile, const std::vector<XOSValuation>& vs) {
    if (vs.empty()) throw std::invalid_argument("valuation list is empty");
    if (profile_players(profile) != vs.size())
        throw std::invalid_argument("profile and valuation player counts differ");
    if (profile_items(profile) != vs.front().n_items())
        throw std::invalid_argument("profile and valuation item counts differ");
}

}  // namespace

McEstimate mc_expected_welfare(const Profile& profile, const std::vector<XOSValuation>& vs, long samples,
                               std::uint64_t seed, int workers) {
    check_shapes(profile, vs);
    if (samples <= 0) throw std::invalid_argument("mc_expected_welfare: sample count must be positive");
    if (const auto* pure = std::get_if<PureProfile>(&profile)) {
        // deterministic: a single evaluation is exact
        return {welfare_of(*pure, vs), 0.0, samples};
    }
    const auto acc = run_mc_workers(samples, seed, workers, [&](std::uint64_t wseed, long count,
                                                                McAccumulator& a) {
        Rng rng(wseed);
        std::vector<std::vector<double>> bids;
        for (long s = 0; s < count; ++s) {
            sample_bids(profile, rng, bids);
            a.add(welfare_of(bids, vs));
        }
    });
    return {acc.mean(), acc.std_error(), acc.count};
}

namespace {

struct ItemBoundTerms {
    double deviation_value;  // A_j
    double complement_part;  // int_0^{o_j - A_j} (1 - F_j)
    double sqrt_part;        // int_0^{o_j - A_j} sqrt(F_j)
};

ItemBoundTerms item_bound_terms(const Profile& profile, std::size_t item, std::size_t opt_winner,
                                double contribution) {
    ItemBoundTerms out{};
    if (const auto* pure = std::get_if<PureProfile>(&profile)) {
        double max_other = 0.0;
        double max_all = 0.0;
        for (std::size_t i = 0; i < pure->size(); ++i) {
            max_all = std::max(max_all, (*pure)[i][item]);
            if (i != opt_winner) max_other = std::max(max_other, (*pure)[i][item]);
        }
        out.deviation_value = std::max(contribution - max_other, 0.0);
        const double range = std::max(contribution - out.deviation_value, 0.0);
        out.complement_part = std::min(range, max_all);
        out.sqrt_part = std::max(range - max_all, 0.0);
        return out;
    }
    const auto& mixed = std::get<MixedProfile>(profile);
    const PiecewiseCDF f_excl = item_bid_cdf_excluding(mixed, item, opt_winner);
    const PiecewiseCDF f_all = item_bid_cdf(mixed, item);
    out.deviation_value = bounds::deviation_value(f_excl, contribution);
    const double range = std::max(contribution - out.deviation_value, 0.0);
    out.complement_part = integrate(f_all, 0.0, range, Integrand::complement);
    out.sqrt_part = integrate(f_all, 0.0, range, Integrand::sqrt_value);
    return out;
}

InequalityReport validate_inequality(const Profile& profile, const std::vector<XOSValuation>& vs,
                                     long samples, std::uint64_t seed, int workers, bool first_form) {
    check_shapes(profile, vs);
    const OptimalAssignment opt = optimal_combinatorial(vs);
    InequalityReport report;
    report.welfare = mc_expected_welfare(profile, vs, samples, seed, workers);
    const std::size_t m = vs.front().n_items();
    report.per_item_rhs.resize(m);
    report.deviation_values.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const ItemBoundTerms terms =
            item_bound_terms(profile, j, opt.winner[j], opt.item_contribution[j]);
        report.deviation_values[j] = terms.deviation_value;
        report.per_item_rhs[j] = first_form ? terms.deviation_value + terms.complement_part
                                            : terms.sqrt_part;
        report.rhs += report.per_item_rhs[j];
    }
    report.slack = report.welfare.mean - report.rhs;
    report.holds_within_3sigma = report.slack >= -3.0 * report.welfare.std_error;
    return report;
}

}  // namespace

InequalityReport validate_inequality_1(const Profile& profile, const std::vector<XOSValuation>& vs,
                                       long samples, std::uint64_t seed, int workers) {
    return validate_inequality(profile, vs, samples, seed, workers, true);
}

InequalityReport validate_inequality_2(const Profile& profile, const std::vector<XOSValuation>& vs,
                                       long samples, std::uint64_t seed, int workers) {
    return validate_inequality(profile, vs, samples, seed, workers, false);
}

double deviation_value(const PiecewiseCDF& opponents_max_cdf, double item_value) {
    return bounds::deviation_value(opponents_max_cdf, item_value);
}

double combined_poa_bound(double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("combined_poa_bound: lambda must be nonnegative");
    const double denom = 3.0 + 4.0 * lambda - std::pow(lambda, 4);
    if (denom <= 0.0) throw std::invalid_argument("combined_poa_bound: nonpositive denominator");
    return (6.0 * lambda + 6.0) / denom;
}

namespace {

/// Per-sample data for one player's deviations on one item, sorted by the
/// rival threshold so win counts become prefix queries.
struct ItemSweep {
    std::vector<double> threshold;        // sorted rival maxima
    std::vector<double> gain_prefix;      // prefix sums of (value with item - value without)
    std::vector<double> gain_tie_prefix;  // same, restricted to samples won on a tie
    double base_sum = 0.0;                // sum over samples of value-without minus other payments

    /// Sum over samples of the deviation utility at bid x, before
    /// subtracting N * x.
    double utility_sum(double x) const;
};

struct SweepIndex {
    double t;
    bool tie_win;
    double gain;
};

ItemSweep build_sweep(std::vector<SweepIndex> rows, double base_sum) {
    std::sort(rows.begin(), rows.end(), [](const SweepIndex& a, const SweepIndex& b) { return a.t < b.t; });
    ItemSweep s;
    s.base_sum = base_sum;
    s.threshold.resize(rows.size());
    s.gain_prefix.resize(rows.size() + 1, 0.0);
    s.gain_tie_prefix.resize(rows.size() + 1, 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        s.threshold[i] = rows[i].t;
        s.gain_prefix[i + 1] = s.gain_prefix[i] + rows[i].gain;
        s.gain_tie_prefix[i + 1] = s.gain_tie_prefix[i] + (rows[i].tie_win ? rows[i].gain : 0.0);
    }
    return s;
}

double ItemSweep::utility_sum(double x) const {
    const auto lo = std::lower_bound(threshold.begin(), threshold.end(), x);
    const auto hi = std::upper_bound(threshold.begin(), threshold.end(), x);
    const std::size_t below = static_cast<std::size_t>(lo - threshold.begin());
    const std::size_t upto = static_cast<std::size_t>(hi - threshold.begin());
    double won_gain = gain_prefix[below];
    won_gain += gain_tie_prefix[upto] - gain_tie_prefix[below];  // ties won by index priority
    return base_sum + won_gain;
}

}  // namespace

RegretEstimate best_response_regret(const Profile& profile, const std::vector<XOSValuation>& vs,
                                    std::size_t player, DeviationFamily family, long samples,
                                    std::uint64_t seed, int grid_size, int workers) {
    (void)workers;  // the sweep is cheap; a single stream keeps it simple
    check_shapes(profile, vs);
    const std::size_t n = vs.size();
    const std::size_t m = vs.front().n_items();
    if (player >= n) throw std::invalid_argument("best_response_regret: player out of range");
    if (grid_size < 1) throw std::invalid_argument("best_response_regret: empty deviation grid");
    const bool pure = std::holds_alternative<PureProfile>(profile);
    const long n_samples = pure ? 1 : std::max(samples, 1L);

    // top value scales the deviation grid
    double top_value = 0.0;
    for (const auto& v : vs)
        top_value = std::max(top_value, v.value(full_mask(m)));

    // per-sample draws
    std::vector<std::vector<SweepIndex>> rows(m);
    std::vector<double> base_sums(m, 0.0);
    McAccumulator baseline;
    std::vector<std::vector<double>> bids;
    std::vector<double> baseline_per_sample(static_cast<std::size_t>(n_samples));
    std::vector<std::vector<ItemThreshold>> thresholds(static_cast<std::size_t>(n_samples));
    std::vector<std::vector<double>> own_rows(static_cast<std::size_t>(n_samples));
    Rng rng(seed);
    for (long s = 0; s < n_samples; ++s) {
        sample_bids(profile, rng, bids);
        std::vector<ItemThreshold> th(m);
        ItemMask won = 0;
        double rowsum = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double best = -1.0;
            std::size_t who = player;  // placeholder; some rival always exists when n >= 2
            for (std::size_t i = 0; i < n; ++i) {
                if (i == player) continue;
                if (bids[i][j] > best) {
                    best = bids[i][j];
                    who = i;
                }
            }
            th[j] = {best, who};
            rowsum += bids[player][j];
            if (beats(bids[player][j], th[j], player)) won |= (1ULL << j);
        }
        const double base_s = vs[player].value(won) - rowsum;
        baseline.add(base_s);
        baseline_per_sample[static_cast<std::size_t>(s)] = base_s;
        thresholds[static_cast<std::size_t>(s)] = th;
        own_rows[static_cast<std::size_t>(s)] = bids[player];
        for (std::size_t j = 0; j < m; ++j) {
            const ItemMask without = won & ~(1ULL << j);
            const double val_with = vs[player].value(without | (1ULL << j));
            const double val_without = vs[player].value(without);
            rows[j].push_back({th[j].max_other, player < th[j].rival_idx, val_with - val_without});
            base_sums[j] += val_without - (rowsum - bids[player][j]);
        }
    }

    RegretEstimate out;
    out.baseline = {baseline.mean(), baseline.std_error(), n_samples};
    double best_gain = 0.0;  // the null deviation
    std::size_t best_item = 0;
    double best_bid = -1.0;
    const double nd = static_cast<double>(n_samples);

    if (family == DeviationFamily::per_item_grid) {
        for (std::size_t j = 0; j < m; ++j) {
            const ItemSweep sweep = build_sweep(rows[j], base_sums[j]);
            for (int t = 0; t <= grid_size; ++t) {
                const double x = 1.05 * top_value * static_cast<double>(t) / grid_size;
                const double mean_u = sweep.utility_sum(x) / nd - x;
                const double gain = mean_u - baseline.mean();
                if (gain > best_gain) {
                    best_gain = gain;
                    best_item = j;
                    best_bid = x;
                }
            }
        }
        out.regret = std::max(best_gain, 0.0);
        out.item = best_item;
        out.bid = best_bid;
        if (best_bid >= 0.0) {
            // per-sample difference of the best deviation, common random numbers
            McAccumulator diff;
            for (long s = 0; s < n_samples; ++s) {
                const auto su = static_cast<std::size_t>(s);
                const auto& own = own_rows[su];
                ItemMask won = 0;
                double rowsum = 0.0;
                for (std::size_t j = 0; j < m; ++j) {
                    const double b = (j == best_item) ? best_bid : own[j];
                    rowsum += b;
                    if (beats(b, thresholds[su][j], player)) won |= (1ULL << j);
                }
                diff.add(vs[player].value(won) - rowsum - baseline_per_sample[su]);
            }
            out.std_error = diff.std_error();
        }
        return out;
    }

    // fixed row: value-maximizing bid on the player's optimal items, zero elsewhere
    const OptimalAssignment opt = optimal_combinatorial(vs);
    std::vector<double> dev_row(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        if (opt.winner[j] != player) continue;
        if (const auto* p = std::get_if<PureProfile>(&profile)) {
            double max_other = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (i != player) max_other = std::max(max_other, (*p)[i][j]);
            dev_row[j] = opt.item_contribution[j] > max_other ? max_other : 0.0;
        } else {
            const auto& mixed = std::get<MixedProfile>(profile);
            const PiecewiseCDF f = item_bid_cdf_excluding(mixed, j, player);
            double best_val = 0.0, best_x = 0.0;
            for (std::size_t idx = 0; idx < f.grid().size(); ++idx) {
                const double val = f.values()[idx] * opt.item_contribution[j] - f.grid()[idx];
                if (val > best_val) {
                    best_val = val;
                    best_x = f.grid()[idx];
                }
            }
            dev_row[j] = best_x;
        }
    }
    McAccumulator diff;
    for (long s = 0; s < n_samples; ++s) {
        const auto su = static_cast<std::size_t>(s);
        ItemMask won = 0;
        double pay = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            pay += dev_row[j];
            if (beats(dev_row[j], thresholds[su][j], player)) won |= (1ULL << j);
        }
        diff.add(vs[player].value(won) - pay - baseline_per_sample[su]);
    }
    if (diff.mean() > best_gain) {
        out.regret = diff.mean();
        out.std_error = diff.std_error();
        out.item = m;  // marks the full-row deviation
        out.bid = -1.0;
    } else {
        out.regret = std::max(best_gain, 0.0);  // the null deviation
        out.std_error = 0.0;
        out.item = m;
        out.bid = -1.0;
    }
    return out;
}

}  // namespace allpay
