#include "extflow/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "extflow/errors.hpp"

namespace extflow::radial {

namespace {

constexpr int kInterp = 6;   // interpolation stencil width
constexpr int kGauss = 3;    // Gauss-Legendre points per panel
constexpr int kFdWidth = 7;  // finite-difference stencil width

constexpr std::array<double, kGauss> kGaussX = {
    0.5 * (1.0 - 0.7745966692414834), 0.5, 0.5 * (1.0 + 0.7745966692414834)};
constexpr std::array<double, kGauss> kGaussW = {5.0 / 18.0, 8.0 / 18.0,
                                                5.0 / 18.0};

// Finite-difference weights (Fornberg 1988) for derivatives 0..max_order at
// z on nodes x[0..n). c[j * (max_order + 1) + m] multiplies f(x_j) for the
// m-th derivative.
void fornberg(double z, const double* x, int n, int max_order, double* c) {
  const int stride = max_order + 1;
  std::fill(c, c + n * stride, 0.0);
  double c1 = 1.0, c4 = x[0] - z;
  c[0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i * stride + k] =
              c1 * (k * c[(i - 1) * stride + k - 1] - c5 * c[(i - 1) * stride + k]) / c2;
        }
        c[i * stride] = -c1 * c5 * c[(i - 1) * stride] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[j * stride + k] = (c4 * c[j * stride + k] - k * c[j * stride + k - 1]) / c3;
      }
      c[j * stride] = c4 * c[j * stride] / c3;
    }
    c1 = c2;
  }
}

std::array<double, kInterp> lagrange_weights(double u) {
  std::array<double, kInterp> nodes{};
  for (int i = 0; i < kInterp; ++i) nodes[i] = i;
  std::array<double, kInterp> w{};
  fornberg(u, nodes.data(), kInterp, 0, w.data());
  return w;
}

// Interpolation weights at the Gauss points of a panel, per stencil offset.
struct PanelWeights {
  std::array<std::array<std::array<double, kInterp>, kGauss>, kInterp - 1> w;
  PanelWeights() {
    for (int o = 0; o < kInterp - 1; ++o)
      for (int g = 0; g < kGauss; ++g) w[o][g] = lagrange_weights(o + kGaussX[g]);
  }
};

const PanelWeights& panel_weights() {
  static const PanelWeights pw;
  return pw;
}

std::size_t stencil_start(std::size_t j, std::size_t nodes, std::size_t width,
                          std::size_t back) {
  const std::size_t last = nodes - width;
  return j < back ? 0 : std::min(j - back, last);
}

void require_grid(const RadialProfile& p, const char* who) {
  if (p.empty()) throw DomainError(std::string(who) + ": empty profile");
  if (p.grid().size() < static_cast<std::size_t>(kFdWidth)) {
    throw DomainError(std::string(who) + ": grid needs at least 7 nodes");
  }
}

// P_j = \int_{t_j}^{t_{j+1}} e^{a1 (t - t_j)} p(e^t) dt for every panel.
std::vector<cplx> panel_sums(const RadialProfile& p, cplx a1) {
  const auto& grid = p.grid();
  const std::size_t m = grid.intervals();
  const double h = grid.h();
  std::array<cplx, kGauss> factor;
  for (int g = 0; g < kGauss; ++g) {
    factor[g] = std::exp(a1 * (h * kGaussX[g])) * (h * kGaussW[g]);
  }
  const auto& pw = panel_weights();
  std::vector<cplx> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t s = stencil_start(j, grid.size(), kInterp, 2);
    const std::size_t o = j - s;
    cplx acc = 0.0;
    for (int g = 0; g < kGauss; ++g) {
      cplx v = 0.0;
      for (int i = 0; i < kInterp; ++i) v += pw.w[o][g][i] * p[s + i];
      acc += factor[g] * v;
    }
    out[j] = acc;
  }
  return out;
}

// \int over [t_j + xa h, t_j + xb h] of e^{a1 (t - t_j)} p(e^t) dt.
cplx partial_panel(const RadialProfile& p, cplx a1, std::size_t j, double xa,
                   double xb) {
  const auto& grid = p.grid();
  const double h = grid.h();
  const std::size_t s = stencil_start(j, grid.size(), kInterp, 2);
  const double o = static_cast<double>(j - s);
  cplx acc = 0.0;
  for (int g = 0; g < kGauss; ++g) {
    const double x = xa + (xb - xa) * kGaussX[g];
    const auto w = lagrange_weights(o + x);
    cplx v = 0.0;
    for (int i = 0; i < kInterp; ++i) v += w[i] * p[s + i];
    acc += std::exp(a1 * (h * x)) * v * (h * (xb - xa) * kGaussW[g]);
  }
  return acc;
}

void check_out_convergence(const RadialProfile& p, cplx alpha) {
  if (!(alpha.real() - p.tail_exponent() < -1.0)) {
    throw DivergentIntegral("integral_out: Re(alpha) = " +
                            std::to_string(alpha.real()) +
                            " too large for declared decay r^-" +
                            std::to_string(p.tail_exponent()));
  }
}

// r_max^beta \int_{r_max}^inf s^alpha p(s) ds under the power-law tail model.
cplx scaled_tail(const RadialProfile& p, cplx alpha, cplx beta) {
  const auto& grid = p.grid();
  const cplx last = p[grid.size() - 1];
  if (last == cplx(0.0)) return 0.0;
  cplx b = p.tail_power();
  if (!((alpha + 1.0 + b).real() < 0.0)) b = -p.tail_exponent();
  const cplx denom = alpha + 1.0 + b;
  if (!(denom.real() < 0.0)) {
    throw DivergentIntegral("integral_out: power-law tail does not converge");
  }
  const double tm = grid.t(grid.size() - 1);
  return -last * std::exp((alpha + 1.0 + beta) * tm) / denom;
}

double inner_tail_exponent(const RadialProfile& p, cplx alpha, cplx beta) {
  const double growth = std::max(alpha.real() + 1.0 - p.tail_exponent(), 0.0);
  return -(beta.real() + growth);
}

double outer_tail_exponent(const RadialProfile& p, cplx alpha, cplx beta) {
  return p.tail_exponent() - alpha.real() - 1.0 - beta.real();
}

}  // namespace

RadialGrid::RadialGrid(std::size_t intervals, double r_max) {
  if (intervals < 6) throw DomainError("RadialGrid: need at least 6 intervals");
  if (!(r_max > 1.0) || !std::isfinite(r_max)) {
    throw DomainError("RadialGrid: r_max must be finite and > 1");
  }
  h_ = std::log(r_max) / static_cast<double>(intervals);
  r_.resize(intervals + 1);
  r_[0] = 1.0;
  for (std::size_t j = 1; j < intervals; ++j) r_[j] = std::exp(static_cast<double>(j) * h_);
  r_[intervals] = r_max;
}

std::size_t RadialGrid::panel_of(double r) const {
  if (!(r >= 1.0) || r > r_max() * (1.0 + 1e-14)) {
    throw DomainError("radius " + std::to_string(r) + " outside [1, r_max]");
  }
  const double x = std::log(r) / h_;
  auto j = static_cast<std::size_t>(std::max(0.0, std::floor(x)));
  return std::min(j, intervals() - 1);
}

GridPtr make_grid(std::size_t intervals, double r_max) {
  return std::make_shared<const RadialGrid>(intervals, r_max);
}

RadialProfile::RadialProfile(GridPtr grid, std::vector<cplx> values,
                             double tail_exponent)
    : grid_(std::move(grid)), values_(std::move(values)), tail_(tail_exponent) {
  if (!grid_) throw DomainError("RadialProfile: null grid");
  if (values_.size() != grid_->size()) {
    throw DomainError("RadialProfile: value count does not match grid");
  }
}

RadialProfile RadialProfile::zeros(GridPtr grid, double tail_exponent) {
  const std::size_t n = grid->size();
  return RadialProfile(std::move(grid), std::vector<cplx>(n), tail_exponent);
}

cplx RadialProfile::at(double r) const {
  if (!(r >= 1.0)) throw DomainError("RadialProfile::at: r < 1");
  const auto& g = *grid_;
  if (r > g.r_max()) {
    const cplx last = values_.back();
    if (last == cplx(0.0)) return 0.0;
    return last * std::exp(tail_power() * std::log(r / g.r_max()));
  }
  const std::size_t j = g.panel_of(r);
  const double x = (std::log(r) - g.t(j)) / g.h();
  const std::size_t s = stencil_start(j, g.size(), kInterp, 2);
  const auto w = lagrange_weights(static_cast<double>(j - s) + x);
  cplx v = 0.0;
  for (int i = 0; i < kInterp; ++i) v += w[i] * values_[s + i];
  return v;
}

cplx RadialProfile::tail_power() const {
  const auto& g = *grid_;
  const std::size_t m = g.intervals();
  const auto n = static_cast<std::size_t>(
      std::clamp<long>(std::lround(0.05 / g.h()), 1L, static_cast<long>(m)));
  const cplx a = values_[m];
  const cplx b = values_[m - n];
  if (a != cplx(0.0) && b != cplx(0.0)) {
    const cplx beta = std::log(a / b) / (static_cast<double>(n) * g.h());
    if (std::isfinite(beta.real()) && std::isfinite(beta.imag())) return beta;
  }
  return std::isfinite(tail_) ? cplx(-tail_) : cplx(-1e3);
}

bool RadialProfile::tail_consistent() const {
  if (is_zero()) return true;
  if (!std::isfinite(tail_)) return false;
  const double slope = loglog_slope(*this);
  if (!std::isfinite(slope)) return true;
  return tail_ <= -slope + 0.2;
}

bool RadialProfile::is_zero() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](cplx v) { return v == cplx(0.0); });
}

RadialProfile RadialProfile::conj() const {
  RadialProfile out = *this;
  for (auto& v : out.values_) v = std::conj(v);
  return out;
}

RadialProfile RadialProfile::times_power(cplx beta) const {
  RadialProfile out = *this;
  for (std::size_t j = 0; j < values_.size(); ++j) {
    out.values_[j] *= std::exp(beta * grid_->t(j));
  }
  out.tail_ = tail_ - beta.real();
  return out;
}

RadialProfile RadialProfile::times(const RadialProfile& other) const {
  if (other.size() != size()) throw DomainError("RadialProfile: grid mismatch");
  RadialProfile out = *this;
  for (std::size_t j = 0; j < values_.size(); ++j) out.values_[j] *= other.values_[j];
  out.tail_ = tail_ + other.tail_;
  return out;
}

RadialProfile& RadialProfile::operator+=(const RadialProfile& o) {
  if (o.size() != size()) throw DomainError("RadialProfile: grid mismatch");
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += o.values_[j];
  tail_ = std::min(tail_, o.tail_);
  return *this;
}

RadialProfile& RadialProfile::operator-=(const RadialProfile& o) {
  if (o.size() != size()) throw DomainError("RadialProfile: grid mismatch");
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= o.values_[j];
  tail_ = std::min(tail_, o.tail_);
  return *this;
}

RadialProfile& RadialProfile::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  if (s == cplx(0.0)) tail_ = kNoTail;
  return *this;
}

double weighted_sup_norm(const RadialProfile& p, double zeta) {
  if (zeta > p.tail_exponent() + 1e-12) {
    throw DomainError("weighted_sup_norm: weight r^" + std::to_string(zeta) +
                      " exceeds declared decay r^-" +
                      std::to_string(p.tail_exponent()));
  }
  const auto& g = p.grid();
  double best = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    best = std::max(best, std::pow(g.r(j), zeta) * std::abs(p[j]));
  }
  return best;
}

RadialProfile scaled_integral_in(const RadialProfile& p, cplx alpha, cplx beta) {
  require_grid(p, "scaled_integral_in");
  const auto& g = p.grid();
  const auto panels = panel_sums(p, alpha + 1.0);
  const cplx step = std::exp(beta * g.h());
  std::vector<cplx> s(g.size());
  s[0] = 0.0;
  for (std::size_t j = 0; j + 1 < g.size(); ++j) {
    s[j + 1] = step * s[j] + std::exp((alpha + 1.0 + beta) * g.t(j) + beta * g.h()) * panels[j];
  }
  return RadialProfile(p.grid_ptr(), std::move(s), inner_tail_exponent(p, alpha, beta));
}

RadialProfile scaled_integral_out(const RadialProfile& p, cplx alpha, cplx beta) {
  require_grid(p, "scaled_integral_out");
  check_out_convergence(p, alpha);
  const auto& g = p.grid();
  const auto panels = panel_sums(p, alpha + 1.0);
  const cplx step = std::exp(-beta * g.h());
  std::vector<cplx> s(g.size());
  const std::size_t m = g.intervals();
  s[m] = scaled_tail(p, alpha, beta);
  for (std::size_t j = m; j-- > 0;) {
    s[j] = step * s[j + 1] + std::exp((alpha + 1.0 + beta) * g.t(j)) * panels[j];
  }
  return RadialProfile(p.grid_ptr(), std::move(s), outer_tail_exponent(p, alpha, beta));
}

CumulativeIntegrals cumulative_integrals(const RadialProfile& p, cplx alpha) {
  require_grid(p, "cumulative_integrals");
  check_out_convergence(p, alpha);
  const auto& g = p.grid();
  const auto panels = panel_sums(p, alpha + 1.0);
  const std::size_t m = g.intervals();
  std::vector<cplx> in(g.size()), out(g.size());
  for (std::size_t j = 0; j < m; ++j) {
    in[j + 1] = in[j] + std::exp((alpha + 1.0) * g.t(j)) * panels[j];
  }
  out[m] = scaled_tail(p, alpha, 0.0);
  for (std::size_t j = m; j-- > 0;) {
    out[j] = out[j + 1] + std::exp((alpha + 1.0) * g.t(j)) * panels[j];
  }
  return {RadialProfile(p.grid_ptr(), std::move(in), inner_tail_exponent(p, alpha, 0.0)),
          RadialProfile(p.grid_ptr(), std::move(out), outer_tail_exponent(p, alpha, 0.0))};
}

cplx integral_in(const RadialProfile& p, cplx alpha, double r) {
  require_grid(p, "integral_in");
  const auto& g = p.grid();
  const std::size_t j = g.panel_of(r);
  const auto panels = panel_sums(p, alpha + 1.0);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < j; ++i) acc += std::exp((alpha + 1.0) * g.t(i)) * panels[i];
  const double x = std::clamp((std::log(r) - g.t(j)) / g.h(), 0.0, 1.0);
  if (x > 0.0) acc += std::exp((alpha + 1.0) * g.t(j)) * partial_panel(p, alpha + 1.0, j, 0.0, x);
  return acc;
}

cplx integral_out(const RadialProfile& p, cplx alpha, double r) {
  require_grid(p, "integral_out");
  check_out_convergence(p, alpha);
  const auto& g = p.grid();
  const std::size_t j = g.panel_of(r);
  const auto panels = panel_sums(p, alpha + 1.0);
  cplx acc = scaled_tail(p, alpha, 0.0);
  for (std::size_t i = g.intervals(); i-- > j + 1;) {
    acc += std::exp((alpha + 1.0) * g.t(i)) * panels[i];
  }
  const double x = std::clamp((std::log(r) - g.t(j)) / g.h(), 0.0, 1.0);
  if (x < 1.0) acc += std::exp((alpha + 1.0) * g.t(j)) * partial_panel(p, alpha + 1.0, j, x, 1.0);
  return acc;
}

RadialProfile differentiate(const RadialProfile& p) {
  if (p.empty() || p.size() < 3) throw DomainError("differentiate: need M >= 3");
  const auto& g = p.grid();
  const std::size_t n = g.size();
  const double h = g.h();
  std::vector<cplx> d(n);
  d[0] = (-3.0 * p[0] + 4.0 * p[1] - p[2]) / (2.0 * h);
  for (std::size_t j = 1; j + 1 < n; ++j) d[j] = (p[j + 1] - p[j - 1]) / (2.0 * h);
  d[n - 1] = (3.0 * p[n - 1] - 4.0 * p[n - 2] + p[n - 3]) / (2.0 * h);
  for (std::size_t j = 0; j < n; ++j) d[j] /= g.r(j);
  return RadialProfile(p.grid_ptr(), std::move(d), p.tail_exponent() + 1.0);
}

LogDerivatives log_derivatives(std::span<const cplx> values, double h) {
  const std::size_t n = values.size();
  if (n < static_cast<std::size_t>(kFdWidth)) {
    throw DomainError("log_derivatives: need at least 7 samples");
  }
  // Weights per position of the evaluation node inside the stencil.
  std::array<std::array<double, kFdWidth * 3>, kFdWidth> weights{};
  std::array<double, kFdWidth> nodes{};
  for (int i = 0; i < kFdWidth; ++i) nodes[i] = i;
  for (int o = 0; o < kFdWidth; ++o) fornberg(o, nodes.data(), kFdWidth, 2, weights[o].data());

  LogDerivatives out{std::vector<cplx>(n), std::vector<cplx>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t s = stencil_start(j, n, kFdWidth, 3);
    const std::size_t o = j - s;
    cplx d1 = 0.0, d2 = 0.0;
    for (int i = 0; i < kFdWidth; ++i) {
      d1 += weights[o][i * 3 + 1] * values[s + i];
      d2 += weights[o][i * 3 + 2] * values[s + i];
    }
    out.d1[j] = d1 / h;
    out.d2[j] = d2 / (h * h);
  }
  return out;
}

double loglog_slope(const RadialProfile& p) {
  const auto& g = p.grid();
  const double t_last = g.t(g.size() - 1);
  const double t_from = t_last - std::log(10.0) - 1e-12;
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  std::size_t count = 0;
  for (std::size_t j = g.size(); j-- > 0;) {
    const double t = g.t(j);
    if (t < t_from) break;
    const double a = std::abs(p[j]);
    if (a == 0.0) return -std::numeric_limits<double>::infinity();
    const double y = std::log(a);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++count;
  }
  if (count < 3) throw DomainError("loglog_slope: fewer than 3 nodes in the last decade");
  const double nn = static_cast<double>(count);
  return (nn * sty - st * sy) / (nn * stt - st * st);
}

}  // namespace extflow::radial
