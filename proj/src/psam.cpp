#include "allpay/psam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace allpay::psam {

namespace {

double frac_mod1(double x) {
    double f = x - std::floor(x);
    if (f >= 1.0) f = 0.0;
    return f;
}

}  // namespace

std::vector<double> fractional_shares(const std::vector<double>& bids, int m) {
    if (m < 1) throw std::invalid_argument("fractional_shares: m >= 1 required");
    double total = 0.0;
    for (double b : bids) {
        if (!(b >= 0.0) || !std::isfinite(b))
            throw std::invalid_argument("fractional_shares: bids must be nonnegative");
        total += b;
    }
    std::vector<double> x(bids.size(), 0.0);
    if (total <= 0.0) return x;  // degenerate: nobody gets or pays anything
    for (std::size_t i = 0; i < bids.size(); ++i) x[i] = static_cast<double>(m) * bids[i] / total;
    return x;
}

void RandomAllocation::validate(double tol) const {
    const std::size_t n = fractional.size();
    if (support.empty()) throw std::invalid_argument("RandomAllocation: empty support");
    if (support.size() > n + 1) throw std::invalid_argument("RandomAllocation: support larger than n+1");
    double total_shares = 0.0;
    for (double x : fractional) total_shares += x;
    const long m = std::lround(total_shares);
    double prob_sum = 0.0;
    std::vector<double> expectation(n, 0.0);
    for (const auto& e : support) {
        if (e.allocation.size() != n) throw std::invalid_argument("RandomAllocation: ragged support");
        if (e.probability < 0.0) throw std::invalid_argument("RandomAllocation: negative probability");
        long sum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double lo = std::floor(fractional[i]) - 0.5;
            const double hi = std::ceil(fractional[i]) + 0.5;
            if (e.allocation[i] < lo || e.allocation[i] > hi)
                throw std::invalid_argument("RandomAllocation: entry outside floor/ceil of its share");
            sum += e.allocation[i];
            expectation[i] += e.probability * e.allocation[i];
        }
        if (sum != m) throw std::invalid_argument("RandomAllocation: outcome does not sum to m");
        prob_sum += e.probability;
    }
    if (std::abs(prob_sum - 1.0) > tol)
        throw std::invalid_argument("RandomAllocation: probabilities do not sum to 1");
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(expectation[i] - fractional[i]) > tol)
            throw std::invalid_argument("RandomAllocation: marginal mismatch");
}

namespace {

/// Fractional-part arcs laid end to end; the last boundary is pinned to
/// the integral total so unit-spaced marks always land in exactly one arc.
struct ArcLayout {
    std::vector<double> boundary;  // cumulative fractional parts
    long marks = 0;
};

ArcLayout build_arcs(const std::vector<double>& shares) {
    ArcLayout arcs;
    arcs.boundary.resize(shares.size());
    double cursor = 0.0;
    for (std::size_t i = 0; i < shares.size(); ++i) {
        cursor += shares[i] - std::floor(shares[i]);
        arcs.boundary[i] = cursor;
    }
    arcs.marks = std::lround(cursor);
    arcs.boundary.back() = static_cast<double>(arcs.marks);
    // rounding drift in the cumulative sums can overshoot the pinned last
    // boundary; the binary search needs a nondecreasing capped sequence
    double run = 0.0;
    for (double& b : arcs.boundary) {
        b = std::clamp(b, run, static_cast<double>(arcs.marks));
        run = b;
    }
    return arcs;
}

std::vector<int> round_at_offset(const std::vector<double>& shares, const ArcLayout& arcs, double u) {
    std::vector<int> alloc(shares.size());
    for (std::size_t i = 0; i < shares.size(); ++i) alloc[i] = static_cast<int>(std::floor(shares[i]));
    for (long j = 0; j < arcs.marks; ++j) {
        const double p = u + static_cast<double>(j);
        const auto it = std::upper_bound(arcs.boundary.begin(), arcs.boundary.end(), p);
        ++alloc[static_cast<std::size_t>(it - arcs.boundary.begin())];
    }
    return alloc;
}

void check_integral_total(const std::vector<double>& shares) {
    double total = 0.0;
    for (double x : shares) {
        if (!(x >= 0.0)) throw std::invalid_argument("dependent_round: negative share");
        total += x;
    }
    if (std::abs(total - std::round(total)) > 1e-9)
        throw std::invalid_argument("dependent_round: shares must sum to an integer");
}

}  // namespace

RandomAllocation dependent_round(const std::vector<double>& shares) {
    if (shares.empty()) throw std::invalid_argument("dependent_round: empty input");
    check_integral_total(shares);
    const ArcLayout arcs = build_arcs(shares);

    // outcome changes only where a mark crosses an arc boundary
    std::vector<double> cuts;
    cuts.reserve(shares.size() + 2);
    cuts.push_back(0.0);
    for (double b : arcs.boundary) cuts.push_back(frac_mod1(b));
    cuts.push_back(1.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    RandomAllocation out;
    out.fractional = shares;
    for (std::size_t t = 0; t + 1 < cuts.size(); ++t) {
        const double len = cuts[t + 1] - cuts[t];
        if (len <= 0.0) continue;
        const double mid = 0.5 * (cuts[t] + cuts[t + 1]);
        std::vector<int> alloc = round_at_offset(shares, arcs, mid);
        if (!out.support.empty() && out.support.back().allocation == alloc) {
            out.support.back().probability += len;
        } else {
            out.support.push_back({std::move(alloc), len});
        }
    }
    // merge any identical outcomes that were not adjacent
    for (std::size_t a = 0; a < out.support.size(); ++a) {
        for (std::size_t b = out.support.size(); b-- > a + 1;) {
            if (out.support[b].allocation == out.support[a].allocation) {
                out.support[a].probability += out.support[b].probability;
                out.support.erase(out.support.begin() + static_cast<std::ptrdiff_t>(b));
            }
        }
    }
    return out;
}

Outcome outcome(const std::vector<double>& bids, int m, double u) {
    if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("outcome: offset outside [0, 1)");
    const std::vector<double> shares = fractional_shares(bids, m);
    Outcome out;
    out.payments = bids;
    double total = 0.0;
    for (double b : bids) total += b;
    if (total <= 0.0) {
        out.allocation.assign(bids.size(), 0);
        out.payments.assign(bids.size(), 0.0);
        return out;
    }
    out.allocation = round_at_offset(shares, build_arcs(shares), u);
    return out;
}

double expected_utility(const MultiUnitValuation& f, const std::vector<double>& bids, std::size_t player,
                        int m) {
    if (player >= bids.size()) throw std::invalid_argument("expected_utility: player out of range");
    if (!f.is_submodular()) throw std::invalid_argument("expected_utility: valuation must be submodular");
    if (f.units() < m) throw std::invalid_argument("expected_utility: valuation shorter than m");
    double total = 0.0;
    for (double b : bids) {
        if (!(b >= 0.0)) throw std::invalid_argument("expected_utility: bids must be nonnegative");
        total += b;
    }
    if (total <= 0.0) return 0.0;
    const ConcavePL g = submodular_to_concave(f);
    return g.eval(bids[player] / total) - bids[player];
}

double kelly_utility(const ConcavePL& g, double bid, double others_total) {
    const double total = bid + others_total;
    if (total <= 0.0) return 0.0;
    return g.eval(bid / total) - bid;
}

double kelly_best_response(const ConcavePL& g, double others_total) {
    if (!(others_total > 0.0))
        throw std::invalid_argument("kelly_best_response: no best response against zero rival bids");
    const int m = g.segments();
    double best_bid = 0.0;
    double best_u = g.eval(0.0);  // == 0 for normalized valuations
    auto consider = [&](double b) {
        if (!(b >= 0.0) || !std::isfinite(b)) return;
        const double u = kelly_utility(g, b, others_total);
        if (u > best_u + 1e-15) {
            best_u = u;
            best_bid = b;
        } else if (u >= best_u - 1e-15 && b < best_bid) {
            best_bid = b;  // ties go to the smaller bid
        }
    };
    // share theta maps to bid b = others * theta / (1 - theta); on each
    // segment the stationary point of c * theta(b) - b is
    // b = sqrt(c * others) - others
    for (int k = 0; k < m; ++k) {
        const double c = g.slope(k);
        const double lo_theta = static_cast<double>(k) / m;
        const double hi_theta = static_cast<double>(k + 1) / m;
        const double lo_b = others_total * lo_theta / (1.0 - lo_theta);
        const double hi_b =
            hi_theta >= 1.0 ? std::numeric_limits<double>::infinity()
                            : others_total * hi_theta / (1.0 - hi_theta);
        consider(lo_b);
        if (c > 0.0) {
            const double stat = std::sqrt(c * others_total) - others_total;
            if (stat > lo_b && stat < hi_b) consider(stat);
        }
        if (std::isfinite(hi_b)) consider(hi_b);
    }
    return best_bid;
}

namespace {

/// Share solving slope(theta) (1 - theta) = B for one player, treating
/// kinks via their supergradient interval; 0 when even the first unit is
/// not worth the aggregate price.
double stationary_share(const ConcavePL& g, double aggregate) {
    const int m = g.segments();
    if (aggregate >= g.slope(0)) return 0.0;
    for (int k = 0; k < m; ++k) {
        const double c = g.slope(k);
        if (c <= 0.0) return static_cast<double>(k) / m;
        const double lo_theta = static_cast<double>(k) / m;
        const double hi_theta = static_cast<double>(k + 1) / m;
        const double hi_phi = c * (1.0 - lo_theta);
        const double lo_phi = c * (1.0 - hi_theta);
        if (aggregate > hi_phi) return lo_theta;  // stuck at the kink below
        if (aggregate >= lo_phi) return 1.0 - aggregate / c;
    }
    return 1.0 - aggregate / std::max(g.slope(m - 1), 1e-300);
}

}  // namespace

std::vector<double> pure_nash(const std::vector<MultiUnitValuation>& fs, int m) {
    double top_slope = 0.0;
    for (const auto& f : fs) {
        if (f.units() < m) throw std::invalid_argument("pure_nash: valuation shorter than m");
        top_slope = std::max(top_slope, submodular_to_concave(f).slope(0));
    }
    return pure_nash(fs, m, top_slope * 1e-12, top_slope);
}

std::vector<double> pure_nash(const std::vector<MultiUnitValuation>& fs, int m, double bracket_lo,
                              double bracket_hi) {
    if (fs.size() < 2) throw std::invalid_argument("pure_nash: at least two players required");
    std::vector<ConcavePL> gs;
    gs.reserve(fs.size());
    int active = 0;
    for (const auto& f : fs) {
        if (!f.is_submodular()) throw std::invalid_argument("pure_nash: valuations must be submodular");
        if (f.units() < m) throw std::invalid_argument("pure_nash: valuation shorter than m");
        gs.push_back(submodular_to_concave(f));
        if (gs.back().slope(0) > 0.0) ++active;
    }
    if (active < 2)
        throw std::invalid_argument("pure_nash: need at least two players with positive value");

    auto share_sum = [&](double aggregate) {
        double s = 0.0;
        for (const auto& g : gs) s += stationary_share(g, aggregate);
        return s;
    };

    double lo = std::max(bracket_lo, 1e-300);
    double hi = bracket_hi;
    // widen until the root is bracketed: share_sum is decreasing in the
    // aggregate, above 1 for tiny totals and 0 beyond the top slope
    while (share_sum(lo) < 1.0 && lo > 1e-290) lo *= 0.5;
    while (share_sum(hi) > 1.0) hi *= 2.0;
    if (share_sum(lo) < 1.0 - 1e-9)
        throw std::invalid_argument(
            "pure_nash: stationary shares never cover the supply (valuations plateau too early; "
            "no positive-bid equilibrium exists)");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (share_sum(mid) >= 1.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
    }
    const double aggregate = 0.5 * (lo + hi);
    std::vector<double> bids(fs.size(), 0.0);
    for (std::size_t i = 0; i < fs.size(); ++i) bids[i] = stationary_share(gs[i], aggregate) * aggregate;
    return bids;
}

Efficiency efficiency(const std::vector<MultiUnitValuation>& fs, int m) {
    Efficiency out;
    out.bids = pure_nash(fs, m);
    double total = 0.0;
    for (double b : out.bids) total += b;
    out.shares.assign(fs.size(), 0.0);
    out.ne_welfare = 0.0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        out.shares[i] = out.bids[i] / total;
        out.ne_welfare += submodular_to_concave(fs[i]).eval(out.shares[i]);
    }
    out.opt_welfare = optimal_multiunit(fs, m).welfare;
    out.ratio = out.ne_welfare / out.opt_welfare;
    if (out.ratio < 0.75 - 1e-6)
        throw std::logic_error("psam::efficiency: equilibrium below the 3/4 floor");
    return out;
}

}  // namespace allpay::psam
