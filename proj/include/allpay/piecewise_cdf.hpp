#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace allpay {

/// Grid on [lo, hi] whose points cluster logarithmically near both
/// endpoints. Endpoints are included exactly.
std::vector<double> log_dense_grid(double lo, double hi, std::size_t points);

/// Tabulated one-dimensional bid distribution.
///
/// The distribution is the linear interpolant of (grid, values) plus an
/// optional point mass at zero. Between zero and the first grid point the
/// function is flat at the atom mass, so the only discontinuity a table can
/// carry sits at zero: point masses at positive bids are not representable
/// and constructors that would need one must build an explicit steep ramp
/// (see bounds::hat_family) or be rejected.
///
/// Invariants enforced on construction:
///   - grid strictly increasing, finite, first point >= 0
///   - values nondecreasing, within [0, 1], last value == 1 (1e-12 slack,
///     then snapped exactly)
///   - values.front() matches atom_at_zero up to 1e-12 slack when the grid
///     starts at 0, and equals it when the grid starts later
class PiecewiseCDF {
  public:
    PiecewiseCDF(std::vector<double> grid, std::vector<double> values, double atom_at_zero = 0.0,
                 std::string exact_tag = {});

    /// Uniform distribution on [0, hi].
    static PiecewiseCDF uniform(double hi = 1.0);

    /// All mass at zero.
    static PiecewiseCDF point_mass_at_zero();

    /// Tabulates a closed-form CDF on a log-dense grid over [lo, hi].
    /// `cdf(hi)` must be 1 up to 1e-9; values are snapped monotone.
    static PiecewiseCDF tabulate(const std::function<double(double)>& cdf, double lo, double hi,
                                 double atom_at_zero, std::size_t points, std::string exact_tag = {});

    /// F(x). Returns the atom mass at x == 0 and 1 beyond the last grid
    /// point. Negative x is rejected.
    double eval(double x) const;

    /// Inverse-transform sample: smallest x with F(x) >= u. Variates below
    /// the atom mass map to 0. Requires u in [0, 1).
    double sample(double u) const;

    double atom_at_zero() const { return atom_; }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    const std::string& exact_tag() const { return tag_; }
    double support_max() const { return grid_.back(); }

  private:
    std::vector<double> grid_;
    std::vector<double> values_;
    double atom_ = 0.0;
    std::string tag_;
};

enum class Integrand {
    complement,   // 1 - F(x)
    value,        // F(x)
    sqrt_value,   // sqrt(F(x))
};

/// Integral of the chosen transform of F over [a, b], 0 <= a <= b. Exact
/// per linear segment: trapezoids for F and 1-F, the closed-form
/// antiderivative of sqrt(linear) for sqrt(F).
double integrate(const PiecewiseCDF& f, double a, double b, Integrand kind);

/// Pointwise product of CDFs (distribution of the max of independent
/// draws). The table is refined adaptively until the interpolant matches
/// the exact product within `tol` everywhere.
PiecewiseCDF cdf_product(const std::vector<const PiecewiseCDF*>& fs, double tol = 3e-11);
PiecewiseCDF cdf_product(const std::vector<PiecewiseCDF>& fs, double tol = 3e-11);

/// Kolmogorov-Smirnov sup distance between the empirical CDF of `samples`
/// and F. Samples need not be sorted; the list must be nonempty.
double ks_distance(std::vector<double> samples, const PiecewiseCDF& f);

}  // namespace allpay
