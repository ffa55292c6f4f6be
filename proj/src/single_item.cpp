#include "allpay/single_item.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace allpay {

SingleItemInstance::SingleItemInstance(std::vector<double> vals) : values(std::move(vals)) {
    if (values.size() < 2) throw std::invalid_argument("SingleItemInstance: need at least two players");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] < 0.0)
            throw std::invalid_argument("SingleItemInstance: values must be finite and nonnegative");
        if (i > 0 && values[i] > values[i - 1] + 1e-12)
            throw std::invalid_argument("SingleItemInstance: values must be sorted nonincreasing");
    }
}

MixedProfile worst_case_equilibrium(const SingleItemInstance& inst, std::size_t grid_points) {
    const std::size_t n = inst.n_players();
    const double v1 = inst.top();
    if (!(v1 > 0.0)) throw std::invalid_argument("worst_case_equilibrium: top value must be positive");
    const double v = inst.second() / v1;
    if (!(v > 0.0 && v <= 1.0))
        throw std::invalid_argument("worst_case_equilibrium: rival value outside (0, v1]");
    for (std::size_t i = 1; i < inst.values.size(); ++i)
        if (std::abs(inst.values[i] - inst.second()) > 1e-12 * v1)
            throw std::invalid_argument("worst_case_equilibrium: rivals must share one value");

    const double nd = static_cast<double>(n);
    const double strong_exp = (nd - 2.0) / (nd - 1.0);
    const double rival_exp = 1.0 / (nd - 1.0);
    auto strong = [&](double x) {
        const double t = x / v1;  // normalized bid
        if (t >= v) return 1.0;
        return t / (v * std::pow(1.0 - v + t, strong_exp));
    };
    auto rival = [&](double x) {
        const double t = x / v1;
        if (t >= v) return 1.0;
        return std::pow(1.0 - v + t, rival_exp);
    };
    const double rival_atom = std::pow(1.0 - v, rival_exp);

    std::vector<PiecewiseCDF> tables;
    tables.reserve(n);
    tables.push_back(PiecewiseCDF::tabulate(strong, 0.0, v * v1, 0.0, grid_points, "worst-case-strong"));
    const PiecewiseCDF rival_table =
        PiecewiseCDF::tabulate(rival, 0.0, v * v1, rival_atom, grid_points, "worst-case-rival");
    for (std::size_t i = 1; i < n; ++i) tables.push_back(rival_table);
    return MixedProfile(n, 1, std::move(tables));
}

double asymptotic_welfare(double v) {
    if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("asymptotic_welfare: v outside (0, 1)");
    const double one_minus = 1.0 - v;
    return one_minus * one_minus / v * std::log(1.0 / one_minus) + v;
}

namespace {

/// Exact Stieltjes integral of one table against another on the merged
/// grid: both are piecewise linear, so per-segment trapezoids are exact.
double stieltjes_product_integral(const PiecewiseCDF& integrand, const PiecewiseCDF& against) {
    std::vector<double> merged;
    merged.reserve(integrand.grid().size() + against.grid().size() + 1);
    merged.insert(merged.end(), integrand.grid().begin(), integrand.grid().end());
    merged.insert(merged.end(), against.grid().begin(), against.grid().end());
    merged.push_back(0.0);
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

    // mass of `against` at zero picks up the integrand's value there
    double total = against.atom_at_zero() * integrand.eval(0.0);
    double x0 = merged.front();
    double f0 = integrand.eval(x0), g0 = against.eval(x0);
    for (std::size_t i = 1; i < merged.size(); ++i) {
        const double x1 = merged[i];
        const double f1 = integrand.eval(x1), g1 = against.eval(x1);
        total += 0.5 * (f0 + f1) * (g1 - g0);
        x0 = x1;
        f0 = f1;
        g0 = g1;
        if (x0 >= against.support_max()) break;
    }
    return total;
}

}  // namespace

double equilibrium_welfare(const MixedProfile& profile, const SingleItemInstance& inst) {
    if (profile.n_items != 1 || profile.n_players != inst.n_players())
        throw std::invalid_argument("equilibrium_welfare: profile/instance shape mismatch");
    const PiecewiseCDF rivals_max = item_bid_cdf_excluding(profile, 0, 0);
    const double p1 = stieltjes_product_integral(rivals_max, profile.cdf(0, 0));
    return inst.top() * p1 + (1.0 - p1) * inst.second();
}

double closed_form_revenue(double v) {
    if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("closed_form_revenue: v outside (0, 1)");
    const double one_minus = 1.0 - v;
    return 2.0 * v - 1.0 - one_minus * one_minus / v * std::log(one_minus);
}

MaxBidBound max_bid_bound_check(const SingleItemInstance& inst, int k, std::size_t grid_points) {
    if (k < 2) throw std::invalid_argument("max_bid_bound_check: k >= 2 required");
    const double v1 = inst.top(), v2 = inst.second();
    if (!(v2 > 0.0)) throw std::invalid_argument("max_bid_bound_check: second value must be positive");
    const double e = 1.0 / (static_cast<double>(k) - 1.0);
    auto cdf = [&](double x) {
        if (x >= v2) return 1.0;
        return (x / v2) * std::pow((v1 - v2 + x) / v1, e);
    };
    const PiecewiseCDF f = PiecewiseCDF::tabulate(cdf, 0.0, v2, 0.0, grid_points, "symmetric-max-bid");
    const double expected = integrate(f, 0.0, v2, Integrand::complement);
    const double bound = 0.5 * v2;
    return {expected, bound, expected >= bound - 1e-9};
}

PrizeVector::PrizeVector(double q1_, double q2_) : q1(q1_), q2(q2_) {
    if (!(q1 > 0.0 && q1 <= 1.0 && q2 >= 0.0 && q2 < q1 && q1 + q2 <= 1.0 + 1e-12))
        throw std::invalid_argument("PrizeVector: need 0 <= q2 < q1 and q1 + q2 <= 1");
}

QEquilibrium q_mechanism_equilibrium(double v, const PrizeVector& q, std::size_t n_players) {
    if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("q_mechanism_equilibrium: v outside (0, 1)");
    if (n_players < 2) throw std::invalid_argument("q_mechanism_equilibrium: need at least two players");
    const double dq = q.q1 - q.q2;
    const double s = v * dq;  // common support end
    // both CDFs are linear, so two grid points represent them exactly
    std::vector<PiecewiseCDF> tables;
    tables.reserve(n_players);
    tables.push_back(PiecewiseCDF({0.0, s}, {0.0, 1.0}, 0.0, "q-strong"));
    tables.push_back(PiecewiseCDF({0.0, s}, {1.0 - v, 1.0}, 1.0 - v, "q-weak"));
    for (std::size_t i = 2; i < n_players; ++i) tables.push_back(PiecewiseCDF::point_mass_at_zero());
    MixedProfile profile(n_players, 1, std::move(tables));
    const double revenue = 0.5 * s + 0.5 * v * s;
    const double max_bid = expected_max_bid(profile, 0);
    return {std::move(profile), revenue, max_bid, s};
}

FirstPriceProfile first_price_worst_case(const SingleItemInstance& inst) {
    const double v2 = inst.second();
    return {std::vector<double>(inst.n_players(), v2), v2, v2};
}

}  // namespace allpay
