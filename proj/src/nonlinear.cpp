#include "extflow/nonlinear.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "extflow/errors.hpp"
#include "extflow/linear_solver.hpp"
#include "extflow/parallel.hpp"

namespace extflow::nonlinear {

namespace {

constexpr cplx I1{0.0, 1.0};

double sup(const RadialProfile& p, double zeta) {
  return p.is_zero() ? 0.0 : radial::weighted_sup_norm(p, zeta);
}

// Raw per-mode arrays for the convolution loops.
struct ModeView {
  const cplx* vr;
  const cplx* vt;
  const cplx* dvr;
  const cplx* dvt;
  double t_vr, t_vt, t_dvr, t_dvt;
  bool zero;
};

}  // namespace

double btilde_norm(const ModeField& v) {
  if (v.derivatives == DerivativeData::none) {
    throw DomainError("btilde_norm: field carries no derivative data");
  }
  const double lam = v.lambda();
  double total = std::abs(v.sigma);
  for (int k = -v.kmax(); k <= v.kmax(); ++k) {
    const auto& m = v.mode(k);
    const double kk = k;
    total += (1.0 + kk * kk) * (sup(m.vr, lam - 2.0) + sup(m.vt, lam - 2.0));
    total += (1.0 + std::abs(kk)) * (sup(m.dvr, lam - 1.0) + sup(m.dvt, lam - 1.0));
    total += sup(m.d2vr, lam) + sup(m.d2vt, lam);
  }
  return total;
}

namespace {

RhsResult rhs_impl(const ModeField& v, const Forcing& f, bool add_forcing) {
  if (v.derivatives == DerivativeData::none) {
    throw DomainError("nonlinear_rhs: field carries no derivative data");
  }
  const int K = v.kmax();
  if (f.kmax() != K) throw DomainError("nonlinear_rhs: truncation mismatch");
  const auto& grid = f.grid();
  const std::size_t n_nodes = grid->size();
  const double lam = v.lambda();
  const double sigma = v.sigma;

  std::vector<double> inv_r(n_nodes), r_lam(n_nodes);
  for (std::size_t j = 0; j < n_nodes; ++j) {
    inv_r[j] = 1.0 / grid->r(j);
    r_lam[j] = std::pow(grid->r(j), lam);
  }
  std::vector<ModeView> view(static_cast<std::size_t>(2 * K + 1));
  for (int k = -K; k <= K; ++k) {
    const auto& m = v.mode(k);
    view[k + K] = {m.vr.values().data(), m.vt.values().data(), m.dvr.values().data(),
                   m.dvt.values().data(), m.vr.tail_exponent(), m.vt.tail_exponent(),
                   m.dvr.tail_exponent(), m.dvt.tail_exponent(),
                   m.vr.is_zero() && m.vt.is_zero()};
  }

  RhsResult out{Forcing(grid, K), 0.0, {}};
  std::vector<double> lost(static_cast<std::size_t>(4 * K + 1), 0.0);
  parallel_for(static_cast<std::size_t>(4 * K + 1), [&](std::size_t idx) {
    const int n = static_cast<int>(idx) - 2 * K;
    std::vector<cplx> ar(n_nodes), at(n_nodes);
    double tail_r = radial::kNoTail, tail_t = radial::kNoTail;
    for (int k = std::max(-K, n - K); k <= std::min(K, n + K); ++k) {
      const int m = n - k;
      const ModeView& a = view[k + K];
      const ModeView& b = view[m + K];
      if (a.zero || b.zero) continue;
      const cplx im(0.0, m);
      for (std::size_t j = 0; j < n_nodes; ++j) {
        const cplx vt_r = a.vt[j] * inv_r[j];
        ar[j] += a.vr[j] * b.dvr[j] + vt_r * (im * b.vr[j] - b.vt[j]);
        at[j] += a.vr[j] * b.dvt[j] + vt_r * im * b.vt[j] + a.vr[j] * b.vt[j] * inv_r[j];
      }
      tail_r = std::min({tail_r, a.t_vr + b.t_dvr, a.t_vt + b.t_vr + 1.0, a.t_vt + b.t_vt + 1.0});
      tail_t = std::min({tail_t, a.t_vr + b.t_dvt, a.t_vt + b.t_vt + 1.0, a.t_vr + b.t_vt + 1.0});
    }
    if (std::abs(n) > K) {
      double sr = 0.0, st = 0.0;
      for (std::size_t j = 0; j < n_nodes; ++j) {
        sr = std::max(sr, r_lam[j] * std::abs(ar[j]));
        st = std::max(st, r_lam[j] * std::abs(at[j]));
      }
      lost[idx] = sr + st;
      return;
    }
    const ModeView& own = view[n + K];
    if (sigma != 0.0 && !own.zero) {
      const cplx isn = I1 * (sigma * n);
      for (std::size_t j = 0; j < n_nodes; ++j) {
        const double r2 = inv_r[j] * inv_r[j];
        ar[j] += (isn * own.vr[j] - 2.0 * sigma * own.vt[j]) * r2;
        at[j] += isn * own.vt[j] * r2;
      }
      tail_r = std::min({tail_r, own.t_vr + 2.0, own.t_vt + 2.0});
      tail_t = std::min(tail_t, own.t_vt + 2.0);
    }
    ModeForcing& dst = out.rhs.mode(n);
    dst.fr = RadialProfile(grid, std::move(ar), tail_r) * -1.0;
    dst.ft = RadialProfile(grid, std::move(at), tail_t) * -1.0;
    if (add_forcing) {
      dst.fr += f.mode(n).fr;
      dst.ft += f.mode(n).ft;
    }
  });
  for (double x : lost) out.discarded += x;
  const double scale = e_norm(out.rhs, lam);
  if (out.discarded > 1e-3 * scale && out.discarded > 0.0) {
    out.warning = "convolution truncation discards " + std::to_string(out.discarded) +
                  " of E-norm (rhs norm " + std::to_string(scale) + "); raise the mode count";
  }
  return out;
}

}  // namespace

RhsResult nonlinear_rhs(const ModeField& v, const Forcing& f) { return rhs_impl(v, f, true); }

RhsResult quadratic_rhs(const ModeField& v) { return rhs_impl(v, Forcing(v.grid(), v.kmax()), false); }

namespace {

// L(f + Q(v), g) evaluated as L(f, g) + L(Q(v), 0). The tail model of each
// piece is then fitted on that piece alone, which keeps the discrete map
// exactly affine in the data.
ModeField apply_map(const ModeField& base, const ModeField& v, const FlowParameters& p,
                    double* discarded) {
  const RhsResult q = quadratic_rhs(v);
  if (discarded) *discarded = q.discarded;
  ModeField out = linear::solve_linear(q.rhs, spectral::BoundaryData(v.kmax()), p, v.lambda());
  return sum(base, out);
}

}  // namespace

ModeField picard_step(const ModeField& v, const Forcing& f, const spectral::BoundaryData& g,
                      const FlowParameters& p) {
  const ModeField base = linear::solve_linear(f, g, p, v.lambda());
  return apply_map(base, v, p, nullptr);
}

PicardResult picard_solve(const Forcing& f, const spectral::BoundaryData& g,
                          const FlowParameters& p, const PicardConfig& cfg) {
  const double lambda = params::select_lambda(p, cfg.lambda_delta);
  PicardResult res{ModeField(f.grid(), f.kmax(), lambda), {}};
  IterationReport& rep = res.report;
  int increases = 0;
  const ModeField base = linear::solve_linear(f, g, p, lambda);
  for (int it = 1; it <= cfg.max_iter; ++it) {
    double lost = 0.0;
    ModeField next = it == 1 ? base : apply_map(base, res.field, p, &lost);
    rep.discarded = std::max(rep.discarded, lost);
    const double diff = btilde_norm(difference(next, res.field));
    rep.norms.push_back(btilde_norm(next));
    rep.diff_norms.push_back(diff);
    if (it == 1) rep.tolerance = cfg.tol * std::max(1.0, rep.norms.front());
    if (rep.diff_norms.size() >= 2) {
      const double prev = rep.diff_norms[rep.diff_norms.size() - 2];
      rep.ratios.push_back(prev > 0.0 ? diff / prev : 0.0);
      increases = diff > prev ? increases + 1 : 0;
    }
    res.field = std::move(next);
    rep.iterations = it;
    if (diff < rep.tolerance) {
      rep.converged = true;
      rep.status = "converged";
      break;
    }
    if (increases >= cfg.divergence_window) {
      rep.status = "diverging: step norm grew " + std::to_string(increases) +
                   " times in a row, last ratio " + std::to_string(rep.ratios.back());
      break;
    }
  }
  if (rep.status.empty()) rep.status = "max_iter reached";
  rep.residual = residual_curl(res.field, p, f).relative;
  return res;
}

CurlResidual residual_curl(const ModeField& v, const FlowParameters& p, const Forcing& f,
                           bool include_transport) {
  const int K = v.kmax();
  if (f.kmax() != K) throw DomainError("residual_curl: truncation mismatch");
  const auto& grid = v.grid();
  const std::size_t nn = grid->size();
  const double h = grid->h();
  const double mu = p.mu + (include_transport ? v.sigma : 0.0);
  const std::size_t modes = static_cast<std::size_t>(2 * K + 1);

  std::vector<double> r(nn), weight(nn);
  for (std::size_t j = 0; j < nn; ++j) {
    r[j] = grid->r(j);
    weight[j] = std::pow(r[j], v.lambda() - 1.0);
  }

  // omega_k and its t-derivatives; r v_r, r v_theta kept for transport.
  std::vector<std::vector<cplx>> om(modes), om_t(modes), om_tt(modes), rvr(modes), rvt(modes);
  std::vector<bool> zero(modes);
  parallel_for(modes, [&](std::size_t idx) {
    const int k = static_cast<int>(idx) - K;
    const auto& m = v.mode(k);
    zero[idx] = m.vr.is_zero() && m.vt.is_zero();
    rvr[idx].resize(nn);
    rvt[idx].resize(nn);
    for (std::size_t j = 0; j < nn; ++j) {
      rvr[idx][j] = r[j] * m.vr[j];
      rvt[idx][j] = r[j] * m.vt[j];
    }
    const auto d = radial::log_derivatives(rvt[idx], h);
    om[idx].resize(nn);
    for (std::size_t j = 0; j < nn; ++j) {
      om[idx][j] = (d.d1[j] - I1 * double(k) * rvr[idx][j]) / (r[j] * r[j]);
    }
    const auto w = radial::log_derivatives(om[idx], h);
    om_t[idx] = w.d1;
    om_tt[idx] = w.d2;
  });

  // Mode-wise terms in r^2-scaled form: diffusion, core advection,
  // perturbation transport, forcing curl.
  std::vector<std::array<std::vector<cplx>, 4>> term(modes);
  parallel_for(modes, [&](std::size_t idx) {
    const int n = static_cast<int>(idx) - K;
    auto& T = term[idx];
    for (auto& t : T) t.assign(nn, 0.0);
    for (std::size_t j = 0; j < nn; ++j) {
      T[0][j] = -(om_tt[idx][j] - double(n) * n * om[idx][j]);
      T[1][j] = p.nu * om_t[idx][j] + I1 * (mu * n) * om[idx][j];
    }
    if (include_transport) {
      for (int k = std::max(-K, n - K); k <= std::min(K, n + K); ++k) {
        const std::size_t a = static_cast<std::size_t>(k + K);
        const std::size_t b = static_cast<std::size_t>(n - k + K);
        if (zero[a] || zero[b]) continue;
        const cplx im(0.0, n - k);
        for (std::size_t j = 0; j < nn; ++j) {
          T[2][j] += rvr[a][j] * om_t[b][j] + rvt[a][j] * im * om[b][j];
        }
      }
    }
    const auto& fm = f.mode(n);
    std::vector<cplx> rft(nn);
    for (std::size_t j = 0; j < nn; ++j) rft[j] = r[j] * fm.ft[j];
    const auto d = radial::log_derivatives(rft, h);
    for (std::size_t j = 0; j < nn; ++j) {
      T[3][j] = -(d.d1[j] - I1 * double(n) * r[j] * fm.fr[j]);
    }
  });

  const int n_theta = 4 * K + 2;
  std::vector<double> res_max(nn, 0.0), scale_max(nn, 0.0);
  parallel_for(nn, [&](std::size_t j) {
    for (int l = 0; l < n_theta; ++l) {
      const double theta = 2.0 * std::numbers::pi * l / n_theta;
      std::array<double, 4> phys{};
      for (int n = -K; n <= K; ++n) {
        const cplx e = std::polar(1.0, n * theta);
        const auto& T = term[static_cast<std::size_t>(n + K)];
        for (int q = 0; q < 4; ++q) phys[q] += (T[q][j] * e).real();
      }
      const double total = phys[0] + phys[1] + phys[2] + phys[3];
      res_max[j] = std::max(res_max[j], weight[j] * std::abs(total));
      for (double x : phys) scale_max[j] = std::max(scale_max[j], weight[j] * std::abs(x));
    }
  });
  CurlResidual out;
  out.absolute = *std::max_element(res_max.begin(), res_max.end());
  out.scale = *std::max_element(scale_max.begin(), scale_max.end());
  out.relative = out.scale > 0.0 ? out.absolute / out.scale : 0.0;
  return out;
}

double flux(const ModeField& v, const FlowParameters& p, double r) {
  if (!(r >= 1.0)) throw DomainError("flux: r < 1");
  return 2.0 * std::numbers::pi * (p.nu + r * v.mode(0).vr.at(r).real());
}

double flux_quadrature(const ModeField& v, const FlowParameters& p, double r, int n_theta) {
  if (n_theta < 1) throw DomainError("flux_quadrature: need at least one node");
  double acc = 0.0;
  for (int l = 0; l < n_theta; ++l) {
    const double theta = 2.0 * std::numbers::pi * l / n_theta;
    acc += spectral::synthesize(v, p, r, theta).first;
  }
  return 2.0 * std::numbers::pi * r * acc / n_theta;
}

double decay_fit(const RadialProfile& p) { return radial::loglog_slope(p); }

}  // namespace extflow::nonlinear
