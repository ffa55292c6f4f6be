#include "allpay/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "allpay/psam.hpp"
#include "allpay/rng.hpp"

namespace allpay {

namespace {

struct Threshold {
    double bid = 0.0;
    std::size_t idx = 0;  // rival index for tie resolution
};

bool beats(double bid, const Threshold& t, std::size_t player) {
    return bid > t.bid || (bid == t.bid && player < t.idx);
}

/// Win-count sweep: thresholds sorted ascending with prefix sums of the
/// per-sample prize gain, split by tie priority.
class GainSweep {
  public:
    void reserve(std::size_t n) { rows_.reserve(n); }
    void add(const Threshold& t, bool tie_win, double gain) { rows_.push_back({t.bid, tie_win, gain}); }
    void finalize() {
        std::sort(rows_.begin(), rows_.end(),
                  [](const Row& a, const Row& b) { return a.bid < b.bid; });
        prefix_.assign(rows_.size() + 1, 0.0);
        tie_prefix_.assign(rows_.size() + 1, 0.0);
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            prefix_[i + 1] = prefix_[i] + rows_[i].gain;
            tie_prefix_[i + 1] = tie_prefix_[i] + (rows_[i].tie_win ? rows_[i].gain : 0.0);
        }
    }
    /// Sum of gains over samples the bid wins.
    double won_gain(double bid) const {
        auto cmp = [](const Row& r, double x) { return r.bid < x; };
        const std::size_t below =
            static_cast<std::size_t>(std::lower_bound(rows_.begin(), rows_.end(), bid, cmp) - rows_.begin());
        std::size_t upto = below;
        while (upto < rows_.size() && rows_[upto].bid == bid) ++upto;
        return prefix_[below] + (tie_prefix_[upto] - tie_prefix_[below]);
    }

  private:
    struct Row {
        double bid;
        bool tie_win;
        double gain;
    };
    std::vector<Row> rows_;
    std::vector<double> prefix_;
    std::vector<double> tie_prefix_;
};

double top_of(const std::vector<double>& values) {
    double top = 0.0;
    for (double v : values) top = std::max(top, v);
    return top;
}

/// Single-item mechanisms: per-sample rank thresholds for one player.
/// first = highest rival (with its index), second = second highest; the
/// second is absent when there is a single rival.
struct RankSample {
    Threshold first;
    Threshold second;
    bool has_second = false;
    double own_bid = 0.0;
};

void rank_thresholds(const std::vector<double>& column, std::size_t player, RankSample& out) {
    Threshold best{-1.0, 0}, runner{-1.0, 0};
    for (std::size_t k = 0; k < column.size(); ++k) {
        if (k == player) continue;
        const Threshold t{column[k], k};
        // priority order: higher bid first, lower index first on ties
        const bool above_best = t.bid > best.bid || (t.bid == best.bid && t.idx < best.idx);
        if (best.bid < 0.0 || above_best) {
            runner = best;
            best = t;
        } else if (runner.bid < 0.0 || t.bid > runner.bid || (t.bid == runner.bid && t.idx < runner.idx)) {
            runner = t;
        }
    }
    out.first = best;
    out.has_second = column.size() >= 3;
    if (out.has_second) out.second = runner;
}

struct SingleItemUtility {
    // utility(bid) = value_factor(bid) - payment(bid); all coefficients are
    // per-sample sums so the mean divides by the sample count at the end
    Mechanism mech;
    double value = 0.0;
    double q1 = 1.0, q2 = 0.0;

    double utility(double bid, bool wins_first, bool wins_second_or_better) const {
        switch (mech) {
            case Mechanism::single_allpay:
                return value * (wins_first ? 1.0 : 0.0) - bid;
            case Mechanism::first_price:
                return (value - bid) * (wins_first ? 1.0 : 0.0);
            case Mechanism::q_allpay: {
                const double prize =
                    q2 * (wins_second_or_better ? 1.0 : 0.0) + (q1 - q2) * (wins_first ? 1.0 : 0.0);
                return value * prize - bid;
            }
            default:
                throw std::logic_error("not a single-item mechanism");
        }
    }
};

EquilibriumCertificate certify_single_item(const CertifyTask& task) {
    const std::size_t n = profile_players(task.profile);
    if (profile_items(task.profile) != 1)
        throw std::invalid_argument("certify: single-item mechanisms need an n x 1 profile");
    if (task.values.size() != n)
        throw std::invalid_argument("certify: per-player values must match the profile");
    const bool pure = std::holds_alternative<PureProfile>(task.profile);
    const long n_samples = pure ? 1 : std::max<long>(task.samples, 1);
    const double top = top_of(task.values);

    EquilibriumCertificate cert;
    cert.samples = n_samples;
    cert.seed = task.seed;
    cert.grid_size = task.grid_size;
    cert.family = "per-item-grid";
    cert.eps = task.eps >= 0.0 ? task.eps : (pure ? 1e-8 : 1e-3 * top);

    for (std::size_t p = 0; p < n; ++p) {
        SingleItemUtility u{task.mechanism, task.values[p], task.q1, task.q2};
        Rng rng(substream_seed(task.seed, p));
        std::vector<std::vector<double>> bids;
        std::vector<RankSample> samples(static_cast<std::size_t>(n_samples));
        McAccumulator baseline;
        GainSweep first_sweep, second_sweep;
        first_sweep.reserve(samples.size());
        second_sweep.reserve(samples.size());
        std::vector<double> column(n);
        for (long s = 0; s < n_samples; ++s) {
            sample_bids(task.profile, rng, bids);
            for (std::size_t k = 0; k < n; ++k) column[k] = bids[k][0];
            RankSample& rs = samples[static_cast<std::size_t>(s)];
            rank_thresholds(column, p, rs);
            rs.own_bid = column[p];
            baseline.add(u.utility(rs.own_bid, beats(rs.own_bid, rs.first, p),
                                   !rs.has_second || beats(rs.own_bid, rs.second, p)));
            first_sweep.add(rs.first, p < rs.first.idx, 1.0);
            if (rs.has_second) second_sweep.add(rs.second, p < rs.second.idx, 1.0);
        }
        first_sweep.finalize();
        second_sweep.finalize();
        const double nd = static_cast<double>(n_samples);

        // mean utility of a fixed deviation bid
        auto deviation_mean = [&](double x) {
            const double wins1 = first_sweep.won_gain(x);
            const double wins2 = samples.front().has_second ? second_sweep.won_gain(x) : nd;
            switch (task.mechanism) {
                case Mechanism::single_allpay:
                    return (u.value * wins1) / nd - x;
                case Mechanism::first_price:
                    return ((u.value - x) * wins1) / nd;
                case Mechanism::q_allpay:
                    return (u.value * (u.q2 * wins2 + (u.q1 - u.q2) * wins1)) / nd - x;
                default:
                    throw std::logic_error("not a single-item mechanism");
            }
        };

        PlayerRegret pr;
        double best_gain = 0.0, best_bid = -1.0;
        for (int t = 0; t <= task.grid_size; ++t) {
            const double x = 1.05 * top * static_cast<double>(t) / task.grid_size;
            const double gain = deviation_mean(x) - baseline.mean();
            if (gain > best_gain) {
                best_gain = gain;
                best_bid = x;
            }
        }
        pr.regret = std::max(best_gain, 0.0);
        pr.deviation_bid = best_bid;
        if (best_bid >= 0.0) {
            McAccumulator diff;
            for (const RankSample& rs : samples) {
                const double dev = u.utility(best_bid, beats(best_bid, rs.first, p),
                                             !rs.has_second || beats(best_bid, rs.second, p));
                const double base = u.utility(rs.own_bid, beats(rs.own_bid, rs.first, p),
                                              !rs.has_second || beats(rs.own_bid, rs.second, p));
                diff.add(dev - base);
            }
            pr.std_error = diff.std_error();
        }
        cert.players.push_back(pr);
    }
    return cert;
}

EquilibriumCertificate certify_simultaneous(const CertifyTask& task) {
    EquilibriumCertificate cert;
    const std::size_t n = profile_players(task.profile);
    cert.samples = std::holds_alternative<PureProfile>(task.profile) ? 1 : task.samples;
    cert.seed = task.seed;
    cert.grid_size = task.grid_size;
    cert.family = "per-item-grid";
    double top = 0.0;
    for (const auto& v : task.xos) top = std::max(top, v.value(full_mask(v.n_items())));
    cert.eps = task.eps >= 0.0 ? task.eps : 1e-3 * top;
    for (std::size_t p = 0; p < n; ++p) {
        const RegretEstimate r =
            best_response_regret(task.profile, task.xos, p, DeviationFamily::per_item_grid, task.samples,
                                 substream_seed(task.seed, p), task.grid_size, task.workers);
        cert.players.push_back({r.regret, r.std_error, r.item, r.bid});
    }
    return cert;
}

EquilibriumCertificate certify_psam(const CertifyTask& task) {
    const auto* pure = std::get_if<PureProfile>(&task.profile);
    if (pure == nullptr || pure->empty() || pure->front().size() != 1)
        throw std::invalid_argument("certify: psam expects a pure n x 1 bid profile");
    if (task.multi.size() != pure->size())
        throw std::invalid_argument("certify: psam valuations must match the bid vector");
    std::vector<double> bids(pure->size());
    double total = 0.0;
    for (std::size_t i = 0; i < bids.size(); ++i) {
        bids[i] = (*pure)[i][0];
        total += bids[i];
    }
    EquilibriumCertificate cert;
    cert.samples = 0;
    cert.seed = task.seed;
    cert.grid_size = 0;
    cert.family = "exact-best-response";
    cert.eps = task.eps >= 0.0 ? task.eps : 1e-8;
    for (std::size_t i = 0; i < bids.size(); ++i) {
        const double others = total - bids[i];
        const ConcavePL g = submodular_to_concave(task.multi[i]);
        PlayerRegret pr;
        if (others > 0.0) {
            const double br = psam::kelly_best_response(g, others);
            pr.regret = std::max(psam::kelly_utility(g, br, others) - psam::kelly_utility(g, bids[i], others),
                                 0.0);
            pr.deviation_bid = br;
        } else {
            pr.regret = 0.0;  // no rival bids: no attained best response to compare against
            pr.deviation_bid = bids[i];
        }
        cert.players.push_back(pr);
    }
    return cert;
}

}  // namespace

EquilibriumCertificate certify(const CertifyTask& task) {
    EquilibriumCertificate cert;
    switch (task.mechanism) {
        case Mechanism::single_allpay:
        case Mechanism::first_price:
        case Mechanism::q_allpay:
            cert = certify_single_item(task);
            break;
        case Mechanism::simultaneous_allpay:
            cert = certify_simultaneous(task);
            break;
        case Mechanism::psam:
            cert = certify_psam(task);
            break;
    }
    cert.max_regret = 0.0;
    cert.certified = true;
    for (const auto& p : cert.players) {
        cert.max_regret = std::max(cert.max_regret, p.regret);
        if (p.regret > cert.eps + 3.0 * p.std_error) cert.certified = false;
    }
    return cert;
}

double win_probability(const MixedProfile& profile, std::size_t player, std::size_t item, double bid,
                       long samples, std::uint64_t seed) {
    if (bid < 0.0) throw std::invalid_argument("win_probability: negative bid");
    if (player >= profile.n_players || item >= profile.n_items)
        throw std::invalid_argument("win_probability: index out of range");
    if (samples <= 0) throw std::invalid_argument("win_probability: sample count must be positive");
    Rng rng(seed);
    long wins = 0;
    for (long s = 0; s < samples; ++s) {
        bool win = true;
        for (std::size_t k = 0; k < profile.n_players; ++k) {
            if (k == player) continue;
            const double b = profile.cdf(k, item).sample(rng.uniform01());
            if (b > bid || (b == bid && k < player)) {
                win = false;
                break;
            }
        }
        if (win) ++wins;
    }
    return static_cast<double>(wins) / static_cast<double>(samples);
}

double phi_divergence(const MixedProfile& profile, std::size_t player, std::size_t item, long samples,
                      std::uint64_t seed, int grid_points) {
    const PiecewiseCDF rivals = item_bid_cdf_excluding(profile, item, player);
    const double hi = rivals.support_max();
    double worst = 0.0;
    for (int t = 1; t <= grid_points; ++t) {
        const double x = hi * static_cast<double>(t) / (grid_points + 1);
        const double phi = win_probability(profile, player, item, x, samples, substream_seed(seed, t));
        worst = std::max(worst, std::abs(phi - rivals.eval(x)));
    }
    return worst;
}

AtomReport atom_diagnostic(const MixedProfile& profile) {
    AtomReport report;
    for (std::size_t i = 0; i < profile.n_players; ++i) {
        for (std::size_t j = 0; j < profile.n_items; ++j) {
            const auto& f = profile.cdf(i, j);
            const double span = std::max(f.support_max(), 1e-300);
            for (std::size_t t = 0; t + 1 < f.grid().size(); ++t) {
                const double jump = f.values()[t + 1] - f.values()[t];
                const double width = f.grid()[t + 1] - f.grid()[t];
                if (jump > 1e-6 && width <= 1e-9 * span)
                    report.findings.push_back({i, j, t, jump});
            }
        }
    }
    return report;
}

AtomReport atom_diagnostic(const Profile& profile) {
    if (const auto* mixed = std::get_if<MixedProfile>(&profile)) return atom_diagnostic(*mixed);
    return {};  // pure profiles carry no tables
}

}  // namespace allpay
