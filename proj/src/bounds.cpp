#include "allpay/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "allpay/rng.hpp"

namespace allpay::bounds {

namespace {

constexpr double kLogGCap = 18.420680743952367;  // ln 1e8

void check_input(const RatioInput& in) {
    if (in.G.size() != in.g.size() || in.G.size() < 2)
        throw std::invalid_argument("harmonic_ratio: need matching G, g with n >= 2");
    for (double G : in.G)
        if (!(G > 0.0 && G <= 1.0)) throw std::invalid_argument("harmonic_ratio: G outside (0, 1]");
    for (double g : in.g)
        if (!(g > 0.0)) throw std::invalid_argument("harmonic_ratio: weights must be positive");
}

double harmonic_sum(const std::vector<double>& G, const std::vector<double>& g) {
    const std::size_t n = G.size();
    double total_ratio = 0.0;
    for (std::size_t k = 0; k < n; ++k) total_ratio += g[k] / G[k];
    double h = 0.0;
    for (std::size_t i = 0; i < n; ++i) h += g[i] / (total_ratio - g[i] / G[i]);
    return h;
}

}  // namespace

RatioCheck harmonic_ratio_check(const RatioInput& in) {
    check_input(in);
    double prod = 1.0;
    for (double G : in.G) prod *= G;
    const double lhs = harmonic_sum(in.G, in.g);
    const double rhs = std::sqrt(prod);
    return {lhs, rhs, lhs >= rhs - 1e-12};
}

MinSearchResult harmonic_ratio_min_search(int n, double target_product, int starts, int iters,
                                          std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("harmonic_ratio_min_search: n >= 2 required");
    if (!(target_product > 0.0 && target_product <= 1.0))
        throw std::invalid_argument("harmonic_ratio_min_search: target product outside (0, 1]");
    const double log_target = std::log(target_product);
    const auto nu = static_cast<std::size_t>(n);

    // state: y_i = ln G_i <= 0 with sum y fixed, z_i = ln g_i in [-cap, cap]
    auto evaluate = [&](const std::vector<double>& y, const std::vector<double>& z) {
        std::vector<double> G(nu), g(nu);
        for (std::size_t i = 0; i < nu; ++i) {
            G[i] = std::exp(y[i]);
            g[i] = std::exp(z[i]);
        }
        return harmonic_sum(G, g);
    };

    MinSearchResult best;
    best.min_value = std::numeric_limits<double>::infinity();

    Rng rng(seed);
    std::vector<std::pair<std::vector<double>, std::vector<double>>> inits;
    // structured starts: product mass on the first k coordinates, heavy or
    // light weights there
    for (int k = 1; k <= n; ++k) {
        for (double zval : {0.0, 6.0, 14.0}) {
            std::vector<double> y(nu, 0.0), z(nu, 0.0);
            for (int i = 0; i < k; ++i) {
                y[static_cast<std::size_t>(i)] = log_target / k;
                z[static_cast<std::size_t>(i)] = zval;
            }
            inits.emplace_back(std::move(y), std::move(z));
        }
    }
    while (static_cast<int>(inits.size()) < starts) {
        std::vector<double> y(nu), z(nu);
        double total = 0.0;
        for (std::size_t i = 0; i < nu; ++i) {
            y[i] = -std::log(1.0 - 0.999 * rng.uniform01());
            total += y[i];
        }
        for (std::size_t i = 0; i < nu; ++i) y[i] *= log_target / total;  // scale onto the constraint
        for (std::size_t i = 0; i < nu; ++i) z[i] = -4.0 + 16.0 * rng.uniform01();
        inits.emplace_back(std::move(y), std::move(z));
    }

    for (auto& [y, z] : inits) {
        double cur = evaluate(y, z);
        double step = 0.5;
        for (int it = 0; it < iters && step > 1e-7; ++it) {
            bool improved = false;
            // paired transfers on y keep the product constraint exact
            for (std::size_t i = 0; i < nu; ++i) {
                for (std::size_t j = 0; j < nu; ++j) {
                    if (i == j) continue;
                    const double delta = std::min(step, -y[j]);  // keep y_j <= 0
                    if (delta <= 0.0) continue;
                    y[i] -= delta;
                    y[j] += delta;
                    const double trial = evaluate(y, z);
                    if (trial < cur - 1e-15) {
                        cur = trial;
                        improved = true;
                    } else {
                        y[i] += delta;
                        y[j] -= delta;
                    }
                }
            }
            for (std::size_t i = 0; i < nu; ++i) {
                for (double sgn : {1.0, -1.0}) {
                    const double old = z[i];
                    z[i] = std::clamp(z[i] + sgn * step * 4.0, -kLogGCap, kLogGCap);
                    if (z[i] == old) continue;
                    const double trial = evaluate(y, z);
                    if (trial < cur - 1e-15) {
                        cur = trial;
                        improved = true;
                        break;
                    }
                    z[i] = old;
                }
            }
            if (!improved) step *= 0.6;
        }
        if (cur < best.min_value) {
            best.min_value = cur;
            best.G.assign(nu, 0.0);
            best.g.assign(nu, 0.0);
            bool cap = false;
            for (std::size_t i = 0; i < nu; ++i) {
                best.G[i] = std::exp(y[i]);
                best.g[i] = std::exp(z[i]);
                cap |= std::abs(z[i]) >= kLogGCap - 1e-9;
            }
            best.g_at_cap = cap;
        }
    }
    return best;
}

double two_block_bound(int n, int k, double a, double g) {
    if (n < 2 || k < 1 || k > n) throw std::invalid_argument("two_block_bound: need n >= 2, 1 <= k <= n");
    if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("two_block_bound: a outside (0, 1]");
    if (!(g > 0.0)) throw std::invalid_argument("two_block_bound: g must be positive");
    const double kd = k, nd = n;
    return kd * g / ((kd - 1.0) * g / a + nd - kd) + (nd - kd) / (kd * g / a + nd - kd - 1.0);
}

double deviation_value(const PiecewiseCDF& f, double v) {
    if (!(v >= 0.0)) throw std::invalid_argument("deviation_value: negative item value");
    double best = f.atom_at_zero() * v;  // x = 0 candidate
    for (std::size_t i = 0; i < f.grid().size(); ++i)
        best = std::max(best, f.values()[i] * v - f.grid()[i]);
    return std::max(best, 0.0);
}

WelfareFunctional welfare_functional(const PiecewiseCDF& f, double v, double lambda) {
    if (!(v > 0.0)) throw std::invalid_argument("welfare_functional: v must be positive");
    if (lambda < 0.0) throw std::invalid_argument("welfare_functional: lambda must be nonnegative");
    const double a = deviation_value(f, v);
    const double upper = std::max(v - a, 0.0);
    const double r = a + integrate(f, 0.0, upper, Integrand::complement) +
                     lambda * integrate(f, 0.0, upper, Integrand::sqrt_value);
    return {a, r};
}

PiecewiseCDF hat_family(double v, double deviation, double zero_run) {
    if (!(v > 0.0)) throw std::invalid_argument("hat_family: v must be positive");
    if (deviation < 0.0 || zero_run < 0.0 || deviation + zero_run > v + 1e-12)
        throw std::invalid_argument("hat_family: need A >= 0, x0 >= 0, A + x0 <= v");
    const double upper = v - deviation;
    if (upper <= 0.0) return PiecewiseCDF::point_mass_at_zero();
    if (zero_run <= upper * 1e-13) {
        // line (x + A)/v on (0, upper]; the jump at 0 is the atom
        return PiecewiseCDF({0.0, upper}, {deviation / v, 1.0}, deviation / v, "hat");
    }
    const double x0 = std::min(zero_run, upper);
    const double delta = std::max(upper, 1.0) * 1e-13;
    if (x0 + delta >= upper) {
        // nearly all mass at the right end
        return PiecewiseCDF({0.0, upper - delta, upper}, {0.0, 0.0, 1.0}, 0.0, "hat");
    }
    return PiecewiseCDF({0.0, x0, x0 + delta, upper},
                        {0.0, 0.0, (x0 + delta + deviation) / v, 1.0}, 0.0, "hat");
}

PiecewiseCDF worst_case_form(const PiecewiseCDF& f, double v) {
    if (!(v > 0.0)) throw std::invalid_argument("worst_case_form: v must be positive");
    const double a = deviation_value(f, v);
    const double upper = std::max(v - a, 0.0);
    if (upper <= 0.0) return PiecewiseCDF::point_mass_at_zero();
    const double area = integrate(f, 0.0, upper, Integrand::complement);
    // x0 + (v/2)(1 - t0)^2 = area with t0 = (x0 + A)/v reduces to
    // t0^2 = 2 (area + A) / v - 1
    const double t0_sq = std::clamp(2.0 * (area + a) / v - 1.0, 0.0, 1.0);
    const double t0 = std::sqrt(t0_sq);
    const double x0 = std::max(v * t0 - a, 0.0);
    return hat_family(v, a, x0);
}

double welfare_functional_floor(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("welfare_functional_floor: lambda outside [0, 1]");
    return (3.0 + 4.0 * lambda - std::pow(lambda, 4)) / 6.0;
}

}  // namespace allpay::bounds
