#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace extflow {

using cplx = std::complex<double>;

namespace radial {

/// Geometric grid on [1, r_max]: r_j = r_max^(j/M), uniform in t = log r.
class RadialGrid {
 public:
  RadialGrid(std::size_t intervals, double r_max);

  std::size_t size() const { return r_.size(); }
  std::size_t intervals() const { return r_.size() - 1; }
  double r(std::size_t j) const { return r_[j]; }
  double t(std::size_t j) const { return static_cast<double>(j) * h_; }
  double h() const { return h_; }
  double r_max() const { return r_.back(); }
  std::span<const double> nodes() const { return r_; }

  /// Panel j with t_j <= log r <= t_{j+1}; r must lie in [1, r_max].
  std::size_t panel_of(double r) const;

 private:
  double h_;
  std::vector<double> r_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_grid(std::size_t intervals = 2000, double r_max = 1e4);

inline constexpr double kNoTail = std::numeric_limits<double>::infinity();

/// Complex samples of a function on [1, inf) at the grid nodes, with a
/// declared decay exponent p asserting |value(r)| <= C r^-p past r_max.
/// Beyond the last node the profile is continued as a power law whose
/// (complex) exponent is fitted from the final nodes; identically zero
/// profiles carry p = +inf.
class RadialProfile {
 public:
  RadialProfile() = default;
  RadialProfile(GridPtr grid, std::vector<cplx> values, double tail_exponent);

  static RadialProfile zeros(GridPtr grid, double tail_exponent = kNoTail);

  template <class Fn>
  static RadialProfile sample(GridPtr grid, Fn&& fn, double tail_exponent) {
    std::vector<cplx> v(grid->size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = fn(grid->r(j));
    return RadialProfile(std::move(grid), std::move(v), tail_exponent);
  }

  bool empty() const { return !grid_; }
  const RadialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  cplx operator[](std::size_t j) const { return values_[j]; }
  cplx& operator[](std::size_t j) { return values_[j]; }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }

  double tail_exponent() const { return tail_; }
  void set_tail_exponent(double p) { tail_ = p; }

  /// Value at arbitrary r >= 1 (6-point interpolation in log r, tail model
  /// beyond r_max).
  cplx at(double r) const;

  /// Exponent beta of the power-law continuation value(r_max) (r/r_max)^beta.
  /// Falls back to -tail_exponent when no finite fit is available.
  cplx tail_power() const;

  /// Decay rate seen in the last decade of nodes is no slower than the
  /// declared exponent (allowing 0.2 of slack).
  bool tail_consistent() const;

  bool is_zero() const;
  RadialProfile conj() const;

  /// r^beta * p(r); the declared exponent drops by Re(beta).
  RadialProfile times_power(cplx beta) const;
  /// Pointwise product; declared exponents add.
  RadialProfile times(const RadialProfile& other) const;

  RadialProfile& operator+=(const RadialProfile& o);
  RadialProfile& operator-=(const RadialProfile& o);
  RadialProfile& operator*=(cplx s);

  friend RadialProfile operator+(RadialProfile a, const RadialProfile& b) { return a += b; }
  friend RadialProfile operator-(RadialProfile a, const RadialProfile& b) { return a -= b; }
  friend RadialProfile operator*(RadialProfile a, cplx s) { return a *= s; }
  friend RadialProfile operator*(cplx s, RadialProfile a) { return a *= s; }

 private:
  GridPtr grid_;
  std::vector<cplx> values_;
  double tail_ = kNoTail;
};

/// sup_{r >= 1} r^zeta |p(r)|. Throws DomainError if zeta exceeds the
/// declared tail exponent.
double weighted_sup_norm(const RadialProfile& p, double zeta);

/// \int_r^inf s^alpha p(s) ds. Requires Re(alpha) - tail_exponent < -1.
cplx integral_out(const RadialProfile& p, cplx alpha, double r);

/// \int_1^r s^alpha p(s) ds.
cplx integral_in(const RadialProfile& p, cplx alpha, double r);

struct CumulativeIntegrals {
  RadialProfile inner;  ///< \int_1^{r_j} s^alpha p
  RadialProfile outer;  ///< \int_{r_j}^inf s^alpha p
};

/// Both running integrals at every node from one set of panel sums.
CumulativeIntegrals cumulative_integrals(const RadialProfile& p, cplx alpha);

/// r_j^beta \int_1^{r_j} s^alpha p(s) ds at every node. The weight is folded
/// into the recursion so large |k| exponents never overflow.
RadialProfile scaled_integral_in(const RadialProfile& p, cplx alpha, cplx beta);

/// r_j^beta \int_{r_j}^inf s^alpha p(s) ds at every node.
RadialProfile scaled_integral_out(const RadialProfile& p, cplx alpha, cplx beta);

/// d p / d r by second-order central differences in log r (one-sided at
/// the ends).
RadialProfile differentiate(const RadialProfile& p);

/// First and second derivatives with respect to t = log r from 7-point
/// finite-difference stencils (sixth order in the interior). Used by the
/// residual checkers, which must not share code paths with the solver.
struct LogDerivatives {
  std::vector<cplx> d1;
  std::vector<cplx> d2;
};
LogDerivatives log_derivatives(std::span<const cplx> values, double h);

/// Least-squares slope of log|p| against log r over the last decade of
/// nodes. Returns -inf when |p| vanishes anywhere in that window.
double loglog_slope(const RadialProfile& p);

}  // namespace radial
}  // namespace extflow
