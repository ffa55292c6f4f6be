#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace allpay {

/// Item subset as a bit mask; item j is bit (1 << j).
using ItemMask = std::uint64_t;

inline ItemMask full_mask(std::size_t n_items) {
    return n_items >= 64 ? ~0ULL : ((1ULL << n_items) - 1ULL);
}

/// Fractionally subadditive valuation: the max over a finite set of
/// additive clauses. Nonnegative clause entries make it monotone and
/// normalized (empty set worth 0).
struct XOSValuation {
    std::vector<std::vector<double>> clauses;

    explicit XOSValuation(std::vector<std::vector<double>> cs);

    std::size_t n_items() const { return clauses.front().size(); }

    /// max over clauses of the clause sum on `s`.
    double value(ItemMask s) const;

    /// Index of a clause attaining value(s); ties go to the lowest index.
    /// The set must be nonempty.
    std::size_t maximizing_clause(ItemMask s) const;
};

struct MarginalCheck {
    bool holds;
    double slack;  // v(S) - sum_j (v(S) - v(S \ {j}))
};

/// Checks v(S) >= sum over j of the singleton marginals v(S) - v(S\{j}).
/// Holds for every fractionally subadditive valuation; slack is 0 for
/// additive ones.
MarginalCheck xos_marginal_check(const XOSValuation& v, ItemMask s);

struct OptimalAssignment {
    std::vector<std::size_t> winner;        // per item, the player receiving it
    std::vector<ItemMask> bundles;          // per player
    double welfare = 0.0;
    std::vector<double> item_contribution;  // winner's maximizing-clause weight per item
};

/// Exhaustive welfare-maximizing partition of items among players. Ties go
/// to the lexicographically smallest assignment vector. Guarded to
/// n_players^n_items <= 1e7.
OptimalAssignment optimal_combinatorial(const std::vector<XOSValuation>& vs);

/// Multi-unit valuation: value[k] of receiving k of m identical units,
/// value[0] == 0, nondecreasing.
struct MultiUnitValuation {
    std::vector<double> value;  // indices 0..m

    explicit MultiUnitValuation(std::vector<double> f);

    int units() const { return static_cast<int>(value.size()) - 1; }
    bool is_submodular(double tol = 1e-12) const;  // nonincreasing marginals
};

/// Piecewise-linear interpolation of a multi-unit valuation on the share
/// scale: eval(k / m) == value[k]. Concave exactly when the source is
/// submodular.
struct ConcavePL {
    std::vector<double> value;  // at breakpoints k/m, k = 0..m

    double eval(double share) const;
    int segments() const { return static_cast<int>(value.size()) - 1; }
    /// Slope of segment k on the share scale, i.e. m * (f(k+1) - f(k)).
    double slope(int k) const {
        return (value[static_cast<std::size_t>(k) + 1] - value[static_cast<std::size_t>(k)]) *
               static_cast<double>(segments());
    }
};

ConcavePL submodular_to_concave(const MultiUnitValuation& f);

struct MultiUnitOptimum {
    std::vector<int> allocation;
    double welfare = 0.0;
};

/// Welfare-maximizing split of m units. Greedy on marginals (ties to the
/// lowest player), which is optimal for submodular inputs; non-submodular
/// inputs are rejected unless the brute-force fallback is requested.
MultiUnitOptimum optimal_multiunit(const std::vector<MultiUnitValuation>& fs, int m,
                                   bool brute_force_fallback = false);

/// Exhaustive search over all integral splits (independent oracle for the
/// greedy path).
MultiUnitOptimum brute_force_multiunit(const std::vector<MultiUnitValuation>& fs, int m);

/// Optimum of sum g_i(theta_i) over the probability simplex, by filling
/// segments in decreasing slope order.
double continuous_share_optimum(const std::vector<ConcavePL>& gs);

}  // namespace allpay
