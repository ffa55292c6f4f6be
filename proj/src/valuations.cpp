#include "allpay/valuations.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace allpay {

XOSValuation::XOSValuation(std::vector<std::vector<double>> cs) : clauses(std::move(cs)) {
    if (clauses.empty()) throw std::invalid_argument("XOSValuation: empty clause list");
    const std::size_t m = clauses.front().size();
    if (m == 0 || m > 63) throw std::invalid_argument("XOSValuation: unsupported item count");
    for (const auto& c : clauses) {
        if (c.size() != m) throw std::invalid_argument("XOSValuation: ragged clause list");
        for (double w : c)
            if (!(w >= 0.0) || !std::isfinite(w))
                throw std::invalid_argument("XOSValuation: clause entries must be nonnegative");
    }
}

double XOSValuation::value(ItemMask s) const {
    if (s & ~full_mask(n_items())) throw std::invalid_argument("XOSValuation: item out of range");
    double best = 0.0;
    for (const auto& c : clauses) {
        double sum = 0.0;
        ItemMask rest = s;
        while (rest) {
            const int j = std::countr_zero(rest);
            sum += c[static_cast<std::size_t>(j)];
            rest &= rest - 1;
        }
        best = std::max(best, sum);
    }
    return best;
}

std::size_t XOSValuation::maximizing_clause(ItemMask s) const {
    if (s == 0) throw std::invalid_argument("XOSValuation: maximizing clause of the empty set");
    if (s & ~full_mask(n_items())) throw std::invalid_argument("XOSValuation: item out of range");
    std::size_t best_idx = 0;
    double best = -1.0;
    for (std::size_t k = 0; k < clauses.size(); ++k) {
        double sum = 0.0;
        ItemMask rest = s;
        while (rest) {
            const int j = std::countr_zero(rest);
            sum += clauses[k][static_cast<std::size_t>(j)];
            rest &= rest - 1;
        }
        if (sum > best) {
            best = sum;
            best_idx = k;
        }
    }
    return best_idx;
}

MarginalCheck xos_marginal_check(const XOSValuation& v, ItemMask s) {
    const double vs = v.value(s);
    double marginals = 0.0;
    ItemMask rest = s;
    while (rest) {
        const int j = std::countr_zero(rest);
        marginals += vs - v.value(s & ~(1ULL << j));
        rest &= rest - 1;
    }
    const double slack = vs - marginals;
    return {slack >= -1e-12, slack};
}

OptimalAssignment optimal_combinatorial(const std::vector<XOSValuation>& vs) {
    if (vs.empty()) throw std::invalid_argument("optimal_combinatorial: no players");
    const std::size_t n = vs.size();
    const std::size_t m = vs.front().n_items();
    for (const auto& v : vs)
        if (v.n_items() != m) throw std::invalid_argument("optimal_combinatorial: item count mismatch");
    double combos = 1.0;
    for (std::size_t j = 0; j < m; ++j) combos *= static_cast<double>(n);
    if (combos > 1e7) throw std::invalid_argument("optimal_combinatorial: instance too large for exact search");

    // odometer over assignment vectors, item 0 most significant, so the
    // first maximum found is the lexicographically smallest one
    std::vector<std::size_t> assign(m, 0), best_assign(m, 0);
    std::vector<ItemMask> bundles(n, 0);
    double best = -1.0;
    while (true) {
        std::fill(bundles.begin(), bundles.end(), ItemMask{0});
        for (std::size_t j = 0; j < m; ++j) bundles[assign[j]] |= (1ULL << j);
        double welfare = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (bundles[i]) welfare += vs[i].value(bundles[i]);
        if (welfare > best) {
            best = welfare;
            best_assign = assign;
        }
        bool wrapped = true;
        for (std::size_t j = m; j-- > 0;) {
            if (++assign[j] < n) {
                wrapped = false;
                break;
            }
            assign[j] = 0;
        }
        if (wrapped) break;
    }

    OptimalAssignment out;
    out.winner = best_assign;
    out.bundles.assign(n, 0);
    for (std::size_t j = 0; j < m; ++j) out.bundles[best_assign[j]] |= (1ULL << j);
    out.welfare = best;
    out.item_contribution.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t i = best_assign[j];
        const std::size_t clause = vs[i].maximizing_clause(out.bundles[i]);
        out.item_contribution[j] = vs[i].clauses[clause][j];
    }
    return out;
}

MultiUnitValuation::MultiUnitValuation(std::vector<double> f) : value(std::move(f)) {
    if (value.size() < 2) throw std::invalid_argument("MultiUnitValuation: need value(0..m), m >= 1");
    if (std::abs(value.front()) > 1e-15) throw std::invalid_argument("MultiUnitValuation: value(0) must be 0");
    value.front() = 0.0;
    for (std::size_t k = 1; k < value.size(); ++k) {
        if (!std::isfinite(value[k]) || value[k] < value[k - 1] - 1e-12)
            throw std::invalid_argument("MultiUnitValuation: values must be finite and nondecreasing");
    }
}

bool MultiUnitValuation::is_submodular(double tol) const {
    for (std::size_t k = 2; k < value.size(); ++k) {
        const double prev = value[k - 1] - value[k - 2];
        const double cur = value[k] - value[k - 1];
        if (cur > prev + tol) return false;
    }
    return true;
}

double ConcavePL::eval(double share) const {
    if (share < 0.0 || share > 1.0 + 1e-12) throw std::invalid_argument("ConcavePL: share outside [0, 1]");
    share = std::min(share, 1.0);
    const int m = segments();
    const double scaled = share * static_cast<double>(m);
    int k = static_cast<int>(std::floor(scaled));
    if (k >= m) k = m - 1;
    const double frac = scaled - static_cast<double>(k);
    const auto ku = static_cast<std::size_t>(k);
    return value[ku] + frac * (value[ku + 1] - value[ku]);
}

ConcavePL submodular_to_concave(const MultiUnitValuation& f) {
    return ConcavePL{f.value};
}

namespace {

double marginal(const MultiUnitValuation& f, int k) {
    return f.value[static_cast<std::size_t>(k) + 1] - f.value[static_cast<std::size_t>(k)];
}

}  // namespace

MultiUnitOptimum optimal_multiunit(const std::vector<MultiUnitValuation>& fs, int m,
                                   bool brute_force_fallback) {
    if (fs.empty()) throw std::invalid_argument("optimal_multiunit: no players");
    for (const auto& f : fs) {
        if (f.units() < m) throw std::invalid_argument("optimal_multiunit: valuation shorter than m");
        if (!f.is_submodular()) {
            if (brute_force_fallback) return brute_force_multiunit(fs, m);
            throw std::invalid_argument("optimal_multiunit: non-submodular input (greedy not valid)");
        }
    }
    MultiUnitOptimum out;
    out.allocation.assign(fs.size(), 0);
    for (int round = 0; round < m; ++round) {
        std::size_t best_i = 0;
        double best_gain = -1.0;
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const double gain = marginal(fs[i], out.allocation[i]);
            if (gain > best_gain) {
                best_gain = gain;
                best_i = i;
            }
        }
        ++out.allocation[best_i];
        out.welfare += best_gain;
    }
    return out;
}

MultiUnitOptimum brute_force_multiunit(const std::vector<MultiUnitValuation>& fs, int m) {
    if (fs.empty()) throw std::invalid_argument("brute_force_multiunit: no players");
    for (const auto& f : fs)
        if (f.units() < m) throw std::invalid_argument("brute_force_multiunit: valuation shorter than m");
    const std::size_t n = fs.size();
    MultiUnitOptimum out;
    out.welfare = -1.0;
    // enumerate all compositions of m into n nonnegative parts
    std::vector<int> cur(n, 0);
    cur[0] = m;
    while (true) {
        double welfare = 0.0;
        for (std::size_t i = 0; i < n; ++i) welfare += fs[i].value[static_cast<std::size_t>(cur[i])];
        if (welfare > out.welfare) {
            out.welfare = welfare;
            out.allocation = cur;
        }
        // next composition: move one unit from the first positive prefix slot
        std::size_t i = 0;
        while (i + 1 < n && cur[i] == 0) ++i;
        if (i + 1 >= n) break;
        const int head = cur[i];
        cur[i] = 0;
        cur[0] = head - 1;
        ++cur[i + 1];
    }
    return out;
}

double continuous_share_optimum(const std::vector<ConcavePL>& gs) {
    if (gs.empty()) throw std::invalid_argument("continuous_share_optimum: no players");
    std::vector<std::pair<double, double>> slices;  // (slope, width)
    for (const auto& g : gs) {
        const double w = 1.0 / static_cast<double>(g.segments());
        for (int k = 0; k < g.segments(); ++k) slices.emplace_back(g.slope(k), w);
    }
    std::sort(slices.begin(), slices.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    double budget = 1.0, total = 0.0;
    for (const auto& [slope, width] : slices) {
        if (budget <= 0.0 || slope <= 0.0) break;
        const double take = std::min(width, budget);
        total += slope * take;
        budget -= take;
    }
    return total;
}

}  // namespace allpay
