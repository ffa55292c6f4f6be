#include "allpay/piecewise_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace allpay {

namespace {

constexpr double kTopTolerance = 1e-12;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument("PiecewiseCDF: " + what); }

}  // namespace

std::vector<double> log_dense_grid(double lo, double hi, std::size_t points) {
    if (!(hi > lo)) fail("grid range must be nonempty");
    if (points < 3) points = 3;
    const double decades = 9.0;
    const double denom = std::expm1(decades * std::log(10.0));
    auto warp = [&](double u) {  // [0, 0.5] -> [0, 0.5], log-spaced offsets near 0
        return 0.5 * std::expm1(2.0 * u * decades * std::log(10.0)) / denom;
    };
    std::vector<double> g(points);
    const double span = hi - lo;
    for (std::size_t i = 0; i < points; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(points - 1);
        const double w = (u <= 0.5) ? warp(u) : 1.0 - warp(1.0 - u);
        g[i] = lo + span * w;
    }
    g.front() = lo;
    g.back() = hi;
    // warped points can collide in double precision very close to the ends
    for (std::size_t i = 1; i < points; ++i)
        if (g[i] <= g[i - 1]) g[i] = std::nextafter(g[i - 1], std::numeric_limits<double>::infinity());
    if (g[points - 1] < g[points - 2]) fail("grid collapsed; too many points for range");
    return g;
}

PiecewiseCDF::PiecewiseCDF(std::vector<double> grid, std::vector<double> values, double atom_at_zero,
                           std::string exact_tag)
    : grid_(std::move(grid)), values_(std::move(values)), atom_(atom_at_zero), tag_(std::move(exact_tag)) {
    if (grid_.empty()) fail("empty grid");
    if (grid_.size() != values_.size()) fail("grid/values size mismatch");
    if (!(atom_ >= 0.0 && atom_ <= 1.0)) fail("atom mass outside [0, 1]");
    double prev = -std::numeric_limits<double>::infinity();
    for (double x : grid_) {
        if (!std::isfinite(x)) fail("non-finite grid point");
        if (!(x > prev)) fail("grid not strictly increasing");
        prev = x;
    }
    if (grid_.front() < 0.0) fail("negative grid point");
    for (double& v : values_) {
        if (!std::isfinite(v)) fail("non-finite value");
        if (v < 0.0) {
            if (v < -kTopTolerance) fail("value below 0");
            v = 0.0;
        }
        if (v > 1.0) {
            if (v > 1.0 + kTopTolerance) fail("value above 1");
            v = 1.0;
        }
    }
    if (std::abs(values_.front() - atom_) > kTopTolerance) {
        if (grid_.front() > 0.0) fail("mass before the first grid point would be an interior atom");
        fail("first value must match the atom mass at zero");
    }
    values_.front() = atom_;
    for (std::size_t i = 1; i < values_.size(); ++i) {
        if (values_[i] < values_[i - 1]) {
            if (values_[i] < values_[i - 1] - kTopTolerance) fail("values not nondecreasing");
            values_[i] = values_[i - 1];
        }
    }
    if (std::abs(values_.back() - 1.0) > kTopTolerance) fail("terminal value must be 1");
    values_.back() = 1.0;
}

PiecewiseCDF PiecewiseCDF::uniform(double hi) {
    if (!(hi > 0.0)) fail("uniform needs positive support");
    return PiecewiseCDF({0.0, hi}, {0.0, 1.0}, 0.0, "uniform");
}

PiecewiseCDF PiecewiseCDF::point_mass_at_zero() {
    return PiecewiseCDF({0.0}, {1.0}, 1.0, "point-mass-at-zero");
}

PiecewiseCDF PiecewiseCDF::tabulate(const std::function<double(double)>& cdf, double lo, double hi,
                                    double atom_at_zero, std::size_t points, std::string exact_tag) {
    std::vector<double> g = log_dense_grid(lo, hi, points);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = cdf(g[i]);
    if (std::abs(v.back() - 1.0) > 1e-9) fail("tabulated CDF does not reach 1 at the support end");
    v.back() = 1.0;
    for (std::size_t i = 1; i < v.size(); ++i) v[i] = std::max(v[i], v[i - 1]);
    for (double& x : v) x = std::clamp(x, 0.0, 1.0);
    return PiecewiseCDF(std::move(g), std::move(v), atom_at_zero, std::move(exact_tag));
}

double PiecewiseCDF::eval(double x) const {
    if (x < 0.0) fail("eval at negative bid");
    if (x == 0.0) return atom_;
    if (x >= grid_.back()) return 1.0;
    if (x <= grid_.front()) return atom_;  // flat before the tabulated support
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - grid_.begin());
    const std::size_t lo = hi - 1;
    const double x0 = grid_[lo], x1 = grid_[hi];
    const double t = (x - x0) / (x1 - x0);
    return values_[lo] + t * (values_[hi] - values_[lo]);
}

double PiecewiseCDF::sample(double u) const {
    if (!(u >= 0.0 && u < 1.0)) fail("sample variate outside [0, 1)");
    if (u <= values_.front()) return 0.0;  // values.front() == atom mass
    // smallest index with values[idx] >= u
    const auto it = std::lower_bound(values_.begin(), values_.end(), u);
    const std::size_t hi = static_cast<std::size_t>(it - values_.begin());
    const std::size_t lo = hi - 1;
    const double y0 = values_[lo], y1 = values_[hi];
    if (y1 <= y0) return grid_[hi];
    const double t = (u - y0) / (y1 - y0);
    return grid_[lo] + t * (grid_[hi] - grid_[lo]);
}

namespace {

double segment_integral(double x0, double x1, double y0, double y1, Integrand kind) {
    const double dx = x1 - x0;
    if (dx <= 0.0) return 0.0;
    switch (kind) {
        case Integrand::complement:
            return (1.0 - 0.5 * (y0 + y1)) * dx;
        case Integrand::value:
            return 0.5 * (y0 + y1) * dx;
        case Integrand::sqrt_value: {
            const double slope = (y1 - y0) / dx;
            if (std::abs(slope) * dx < 1e-14 * (std::abs(y0) + 1.0))
                return std::sqrt(0.5 * (y0 + y1)) * dx;
            const double a = std::pow(std::max(y0, 0.0), 1.5);
            const double b = std::pow(std::max(y1, 0.0), 1.5);
            return (2.0 / (3.0 * slope)) * (b - a);
        }
    }
    return 0.0;
}

}  // namespace

double integrate(const PiecewiseCDF& f, double a, double b, Integrand kind) {
    if (a < 0.0 || b < a) throw std::invalid_argument("integrate: need 0 <= a <= b");
    if (a == b) return 0.0;
    const auto& grid = f.grid();
    double total = 0.0;
    // region before the table: F is constant at eval(a) there
    const double head_end = std::min(b, std::max(a, grid.front()));
    if (head_end > a) {
        const double y = f.eval(0.5 * (a + head_end));
        total += segment_integral(a, head_end, y, y, kind);
    }
    // tabulated region
    const double lo = std::max(a, grid.front());
    const double hi = std::min(b, grid.back());
    if (hi > lo) {
        auto it = std::upper_bound(grid.begin(), grid.end(), lo);
        std::size_t idx = static_cast<std::size_t>(it - grid.begin());
        double x0 = lo;
        double y0 = f.eval(lo);
        while (x0 < hi && idx < grid.size()) {
            const double x1 = std::min(grid[idx], hi);
            const double y1 = f.eval(x1);
            total += segment_integral(x0, x1, y0, y1, kind);
            x0 = x1;
            y0 = y1;
            ++idx;
        }
    }
    // region beyond the table: F == 1
    if (b > grid.back()) {
        const double x0 = std::max(a, grid.back());
        total += segment_integral(x0, b, 1.0, 1.0, kind);
    }
    return total;
}

namespace {

double product_eval(const std::vector<const PiecewiseCDF*>& fs, double x) {
    double p = 1.0;
    for (const auto* f : fs) p *= f->eval(x);
    return p;
}

}  // namespace

PiecewiseCDF cdf_product(const std::vector<const PiecewiseCDF*>& fs, double tol) {
    if (fs.empty()) throw std::invalid_argument("cdf_product: empty list");
    if (fs.size() == 1) return *fs.front();
    std::vector<double> merged;
    for (const auto* f : fs) merged.insert(merged.end(), f->grid().begin(), f->grid().end());
    merged.push_back(0.0);
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

    const double scale = std::max(merged.back(), 1e-300);
    std::vector<double> xs, ys;
    xs.reserve(merged.size() * 2);
    ys.reserve(merged.size() * 2);
    xs.push_back(merged.front());
    ys.push_back(product_eval(fs, merged.front()));
    // depth-first refinement against the exact product of the interpolants
    struct Seg {
        double x0, x1, y0, y1;
        int depth;
    };
    std::vector<Seg> stack;
    for (std::size_t i = merged.size() - 1; i >= 1; --i) {
        stack.push_back({merged[i - 1], merged[i], product_eval(fs, merged[i - 1]),
                         product_eval(fs, merged[i]), 0});
        if (i == 1) break;
    }
    // segments were pushed from the top down, so the lowest one pops first
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        const double xm = 0.5 * (s.x0 + s.x1);
        const double ym = product_eval(fs, xm);
        const double chord = 0.5 * (s.y0 + s.y1);
        if (std::abs(ym - chord) > tol && (s.x1 - s.x0) > 1e-14 * scale && s.depth < 40) {
            stack.push_back({xm, s.x1, ym, s.y1, s.depth + 1});
            stack.push_back({s.x0, xm, s.y0, ym, s.depth + 1});
        } else {
            xs.push_back(s.x1);
            ys.push_back(s.y1);
        }
    }
    double atom = 1.0;
    for (const auto* f : fs) atom *= f->atom_at_zero();
    return PiecewiseCDF(std::move(xs), std::move(ys), atom, "product");
}

PiecewiseCDF cdf_product(const std::vector<PiecewiseCDF>& fs, double tol) {
    std::vector<const PiecewiseCDF*> ptrs;
    ptrs.reserve(fs.size());
    for (const auto& f : fs) ptrs.push_back(&f);
    return cdf_product(ptrs, tol);
}

double ks_distance(std::vector<double> samples, const PiecewiseCDF& f) {
    if (samples.empty()) throw std::invalid_argument("ks_distance: empty sample list");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double fx = f.eval(samples[i]);
        // tables are continuous above zero; the only jump of F sits at 0,
        // where the left limit is 0
        const double fx_left = samples[i] == 0.0 ? 0.0 : fx;
        d = std::max(d, static_cast<double>(i + 1) / n - fx);
        d = std::max(d, fx_left - static_cast<double>(i) / n);
    }
    return d;
}

}  // namespace allpay
