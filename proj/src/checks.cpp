#include "extflow/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "extflow/errors.hpp"

namespace extflow::checks {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double max_abs(const RadialProfile& p) {
  double m = 0.0;
  for (const cplx& c : p.values()) m = std::max(m, std::abs(c));
  return m;
}

double field_scale(const ModeField& v) {
  double s = std::abs(v.sigma);
  for (int k = -v.kmax(); k <= v.kmax(); ++k) {
    s = std::max({s, max_abs(v.mode(k).vr), max_abs(v.mode(k).vt)});
  }
  return s;
}

double slope(const RadialProfile& p) {
  if (p.empty() || p.is_zero()) return kNegInf;
  return radial::loglog_slope(p);
}

double sup(const RadialProfile& p, double zeta) {
  return p.empty() || p.is_zero() ? 0.0 : radial::weighted_sup_norm(p, zeta);
}

}  // namespace

double divergence_error(const ModeField& v) {
  const auto& grid = *v.grid();
  const std::size_t n = grid.size();
  const double zeta = v.lambda() - 2.0;
  double worst = 0.0, scale = 0.0;
  std::vector<cplx> rvr(n);
  for (int k = -v.kmax(); k <= v.kmax(); ++k) {
    const auto& m = v.mode(k);
    for (std::size_t j = 0; j < n; ++j) rvr[j] = grid.r(j) * m.vr[j];
    const auto d = radial::log_derivatives(rvr, grid.h());
    for (std::size_t j = 0; j < n; ++j) {
      const double r = grid.r(j);
      const double wt = std::pow(r, zeta);
      const cplx div = d.d1[j] / r + cplx(0.0, k) * m.vt[j];
      worst = std::max(worst, wt * std::abs(div));
      scale = std::max(scale, wt * (std::abs(m.vr[j]) + std::abs(double(k) * m.vt[j])));
    }
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

double boundary_error(const ModeField& v, const spectral::BoundaryData& g) {
  if (g.g_r.kmax() != v.kmax()) throw DomainError("boundary_error: truncation mismatch");
  double worst = 0.0, gmax = 0.0;
  for (int k = -v.kmax(); k <= v.kmax(); ++k) {
    const cplx vt = v.mode(k).vt[0] + (k == 0 ? cplx(v.sigma) : cplx(0.0));
    worst = std::max({worst, std::abs(v.mode(k).vr[0] - g.g_r[k]),
                      std::abs(vt - g.g_theta[k])});
    gmax = std::max({gmax, std::abs(g.g_r[k]), std::abs(g.g_theta[k])});
  }
  const double scale = std::max(gmax, field_scale(v));
  return scale > 0.0 ? worst / scale : worst;
}

double physical_boundary_error(const ModeField& v, const spectral::BoundaryData& g,
                               const FlowParameters& p, int n_theta) {
  double worst = 0.0;
  for (int l = 0; l < n_theta; ++l) {
    const double theta = 2.0 * std::numbers::pi * l / n_theta;
    double gr = 0.0, gt = 0.0;
    for (int k = -g.g_r.kmax(); k <= g.g_r.kmax(); ++k) {
      const cplx e = std::polar(1.0, k * theta);
      gr += (g.g_r[k] * e).real();
      gt += (g.g_theta[k] * e).real();
    }
    const auto [ur, ut] = spectral::synthesize(v, p, 1.0, theta);
    worst = std::max({worst, std::abs(ur - p.nu - gr), std::abs(ut - p.mu - gt)});
  }
  return worst / std::max({1.0, std::abs(p.nu), std::abs(p.mu)});
}

double conjugate_asymmetry(const ModeField& v) {
  double worst = 0.0;
  auto cmp = [&](const RadialProfile& a, const RadialProfile& b) {
    if (a.empty() || b.empty()) return;
    for (std::size_t j = 0; j < a.size(); ++j) {
      worst = std::max(worst, std::abs(a[j] - std::conj(b[j])));
    }
  };
  for (int k = 0; k <= v.kmax(); ++k) {
    const auto& a = v.mode(-k);
    const auto& b = v.mode(k);
    cmp(a.vr, b.vr);
    cmp(a.vt, b.vt);
    cmp(a.w, b.w);
  }
  const double scale = field_scale(v);
  return scale > 0.0 ? worst / scale : worst;
}

std::vector<ModeBound> mode_bounds(const ModeField& v, const Forcing& f,
                                   const spectral::BoundaryData& g, const FlowParameters& p) {
  const double lam = v.lambda();
  std::vector<ModeBound> out;
  for (int k = -v.kmax(); k <= v.kmax(); ++k) {
    const auto& m = v.mode(k);
    const double kk = k;
    ModeBound b;
    b.k = k;
    b.solution_norm = (1.0 + kk * kk) * (sup(m.vr, lam - 2.0) + sup(m.vt, lam - 2.0)) +
                      (1.0 + std::abs(kk)) * (sup(m.dvr, lam - 1.0) + sup(m.dvt, lam - 1.0)) +
                      sup(m.d2vr, lam) + sup(m.d2vt, lam);
    b.data_norm = kk * kk * (std::abs(g.g_r[k]) + std::abs(g.g_theta[k])) +
                  sup(f.mode(k).fr, lam) + sup(f.mode(k).ft, lam);
    if (k == 0) b.data_norm += std::abs(g.g_theta[0]);
    b.ratio = b.data_norm > 0.0 ? b.solution_norm / b.data_norm : 0.0;
    if (k != 0) {
      b.a_k = std::abs(2.0 - std::abs(kk) + params::mode_exponents(p, k).xi_minus);
    }
    out.push_back(b);
  }
  return out;
}

std::vector<DecaySlope> decay_slopes(const ModeField& v) {
  std::vector<DecaySlope> out;
  for (int k = -v.kmax(); k <= v.kmax(); ++k) {
    const auto& m = v.mode(k);
    out.push_back({k, std::max(slope(m.vr), slope(m.vt)), slope(m.w)});
  }
  return out;
}

}  // namespace extflow::checks
