#include "extflow/linear_solver.hpp"

#include <cmath>
#include <cstdlib>

#include "extflow/errors.hpp"
#include "extflow/parallel.hpp"

namespace extflow::linear {

namespace {

using radial::scaled_integral_in;
using radial::scaled_integral_out;

constexpr cplx I1{0.0, 1.0};

RadialProfile power_law(const GridPtr& grid, cplx coeff, cplx beta) {
  if (coeff == cplx(0.0)) return RadialProfile::zeros(grid);
  return RadialProfile::sample(
      grid, [&](double r) { return coeff * std::exp(beta * std::log(r)); }, -beta.real());
}

// c r^{-|k|-1} (r^{e1} - 1) / e1, stable as e1 -> 0.
RadialProfile inner_homogeneous(const GridPtr& grid, cplx c, cplx e1, int a, cplx xi_m) {
  if (c == cplx(0.0)) return RadialProfile::zeros(grid);
  std::vector<cplx> v(grid->size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double t = grid->t(j);
    const cplx z = e1 * t;
    const cplx ratio = std::abs(z) < 1e-5 ? t * (1.0 + z / 2.0 + z * z / 6.0)
                                          : (std::exp(z) - 1.0) / e1;
    v[j] = c * std::exp(-(a + 1.0) * t) * ratio;
  }
  return RadialProfile(grid, std::move(v), std::min(-xi_m.real() - 1.0, a + 1.0));
}

void require_admissible(const FlowParameters& p) {
  if (!params::admissibility(p).admissible) {
    throw InadmissibleParameters("Re xi_1^- >= -2 for nu = " + std::to_string(p.nu) +
                                 ", mu = " + std::to_string(p.mu));
  }
}

double sgn(int k) { return k > 0 ? 1.0 : -1.0; }

}  // namespace

bool near_branch_point(const FlowParameters& p) { return p.nu > -2.1 && p.nu < -2.0; }

ZeroModeSolution solve_zero_mode(const RadialProfile& f, cplx g, const FlowParameters& p,
                                 double lambda) {
  require_admissible(p);
  const double nu = p.nu;
  const auto& grid = f.grid_ptr();
  ZeroModeSolution out;
  if (nu >= -2.0) {
    const RadialProfile inner = scaled_integral_out(f, -nu, 0.0);
    out.v_theta0 = scaled_integral_out(inner, nu + 1.0, -1.0) * -1.0;
    out.sigma = (g - out.v_theta0[0]).real();
    out.w = inner.times_power(nu);
    out.dv = out.w - out.v_theta0.times_power(-1.0);
    out.dw = out.w.times_power(-1.0) * nu - f;
  } else {
    if (!(lambda < 1.0 - nu)) {
      throw InadmissibleParameters("lambda must stay below 1 - nu when nu < -2");
    }
    if (near_branch_point(p)) {
      out.warning = "nu within 0.1 below -2: zero-mode constants scale like 1/(nu+2)";
    }
    const RadialProfile a = scaled_integral_in(f, -nu, nu + 1.0);
    const RadialProfile b = scaled_integral_out(f, 2.0, -1.0);
    const cplx c = g + b[0] / (nu + 2.0);
    const double s = -1.0 / (nu + 2.0);
    out.v_theta0 = (a + b) * s + power_law(grid, c, nu + 1.0);
    out.dv = (a * (nu + 1.0) - b).times_power(-1.0) * s + power_law(grid, (nu + 1.0) * c, nu);
    out.sigma = 0.0;
  }
  out.d2v = out.v_theta0.times_power(-2.0) * (1.0 + nu) -
            out.dv.times_power(-1.0) * (1.0 - nu) - f;
  if (nu < -2.0) {
    out.w = out.dv + out.v_theta0.times_power(-1.0);
    out.dw = out.d2v + out.dv.times_power(-1.0) - out.v_theta0.times_power(-2.0);
  }
  return out;
}

ForcingParts forcing_parts(const RadialProfile& f_r, const RadialProfile& f_theta,
                           const params::Exponents& e) {
  if (e.k == 0) throw DomainError("forcing_parts: k must be nonzero");
  const cplx ik = I1 * static_cast<double>(e.k);
  ForcingParts out;
  out.s_out = scaled_integral_out(f_theta * e.xi_plus - f_r * ik, -e.xi_plus, e.xi_plus);
  out.s_in = scaled_integral_in(f_theta * e.xi_minus - f_r * ik, -e.xi_minus, e.xi_minus);
  out.f_theta_at_1 = f_theta[0];
  return out;
}

RadialProfile forcing_transform(const RadialProfile& f_r, const RadialProfile& f_theta,
                                const params::Exponents& e) {
  const ForcingParts parts = forcing_parts(f_r, f_theta, e);
  return parts.s_out + parts.s_in -
         power_law(f_theta.grid_ptr(), parts.f_theta_at_1, e.xi_minus);
}

cplx forcing_constant(const RadialProfile& h, const params::Exponents& e) {
  const double a = std::abs(e.k);
  return scaled_integral_out(h, 1.0 - a, 0.0)[0] / e.root_discriminant();
}

BoundaryConstants boundary_constants(cplx g_r, cplx g_theta, cplx G,
                                     const params::Exponents& e) {
  if (e.k == 0) throw DomainError("boundary_constants: k must be nonzero");
  const double k = e.k;
  const double a = std::abs(k);
  const cplx e2 = 2.0 - a + e.xi_minus;
  return BoundaryConstants{(g_theta + I1 * sgn(e.k) * g_r + G) * e2,
                           -I1 * g_r / (2.0 * k) + g_theta / (2.0 * a)};
}

RadialProfile solve_vorticity_mode(const RadialProfile& h, cplx w_bar,
                                   const params::Exponents& e) {
  return h * (1.0 / e.root_discriminant()) + power_law(h.grid_ptr(), w_bar, e.xi_minus);
}

RadialProfile solve_stream_mode(const RadialProfile& w, cplx phi_bar, int k) {
  if (k == 0) throw DomainError("solve_stream_mode: k must be nonzero");
  const double a = std::abs(k);
  const RadialProfile outer = scaled_integral_out(w, 1.0 - a, a);
  const RadialProfile inner = scaled_integral_in(w, 1.0 + a, -a);
  return power_law(w.grid_ptr(), phi_bar, -a) + (outer + inner) * (1.0 / (2.0 * a));
}

std::pair<RadialProfile, RadialProfile> velocity_from_stream(const RadialProfile& w,
                                                             cplx g_r, cplx g_theta, int k) {
  if (k == 0) throw DomainError("velocity_from_stream: k must be nonzero");
  const double a = std::abs(k);
  const double s = sgn(k);
  const RadialProfile P = scaled_integral_in(w, a + 1.0, -a - 1.0);
  const RadialProfile Q = scaled_integral_out(w, 1.0 - a, a - 1.0);
  const auto& grid = w.grid_ptr();
  RadialProfile vr = power_law(grid, 0.5 * (g_r + I1 * s * g_theta), -a - 1.0) +
                     (P + Q) * (0.5 * I1 * s);
  RadialProfile vt = power_law(grid, 0.5 * (g_theta - I1 * s * g_r), -a - 1.0) +
                     (P - Q) * 0.5;
  return {std::move(vr), std::move(vt)};
}

NonzeroModeSolution solve_nonzero_mode(const RadialProfile& f_r, const RadialProfile& f_theta,
                                       cplx g_r, cplx g_theta, int k,
                                       const FlowParameters& p) {
  const params::Exponents e = params::mode_exponents(p, k);
  const auto& grid = f_theta.grid_ptr();
  const double a = std::abs(k);
  const double s = sgn(k);
  const cplx ik = I1 * static_cast<double>(k);
  const cplx sd = e.root_discriminant();
  const cplx xm = e.xi_minus;
  const cplx e1 = a + 2.0 + xm;
  const cplx e2 = 2.0 - a + xm;

  const ForcingParts parts = forcing_parts(f_r, f_theta, e);
  const RadialProfile wp = (parts.s_out + parts.s_in) * (1.0 / sd);
  const RadialProfile Qp = scaled_integral_out(wp, 1.0 - a, a - 1.0);
  const RadialProfile Pp = scaled_integral_in(wp, a + 1.0, -a - 1.0);

  NonzeroModeSolution out;
  out.k = k;
  out.G = Qp[0] + parts.f_theta_at_1 / (sd * e2);
  const BoundaryConstants bc = boundary_constants(g_r, g_theta, out.G, e);
  out.w_bar = bc.w_bar;
  out.phi_bar = bc.phi_bar;

  // homogeneous coefficient of r^xi- once the f_theta(1) term is folded in
  const cplx c = bc.w_bar - parts.f_theta_at_1 / sd;
  out.w = wp + power_law(grid, c, xm);
  out.dw = (parts.s_out * e.xi_plus + parts.s_in * xm).times_power(-1.0) * (1.0 / sd) -
           f_theta + power_law(grid, c * xm, xm - 1.0);

  const RadialProfile P = Pp + inner_homogeneous(grid, c, e1, static_cast<int>(a), xm);
  const RadialProfile Q = Qp + power_law(grid, -c / e2, xm + 1.0);
  out.v_r = power_law(grid, 0.5 * (g_r + I1 * s * g_theta), -a - 1.0) +
            (P + Q) * (0.5 * I1 * s);
  out.v_theta = power_law(grid, 0.5 * (g_theta - I1 * s * g_r), -a - 1.0) + (P - Q) * 0.5;

  const RadialProfile vr_r = out.v_r.times_power(-1.0);
  const RadialProfile vt_r = out.v_theta.times_power(-1.0);
  out.dv_theta = vr_r * ik - vt_r + out.w;
  out.dv_r = (vr_r + vt_r * ik) * -1.0;
  out.d2v_r = (out.v_r + out.v_theta * ik).times_power(-2.0) -
              (out.dv_r + out.dv_theta * ik).times_power(-1.0);
  out.d2v_theta = (out.v_theta - out.v_r * ik).times_power(-2.0) -
                  (out.dv_theta - out.dv_r * ik).times_power(-1.0) + out.dw;
  return out;
}

ModeField solve_linear(const Forcing& f, const spectral::BoundaryData& g,
                       const FlowParameters& p, double lambda) {
  require_admissible(p);
  const int K = f.kmax();
  if (g.g_r.kmax() != K || g.g_theta.kmax() != K) {
    throw DomainError("solve_linear: forcing and boundary truncations differ");
  }
  if (std::abs(g.g_r[0]) > 1e-14) {
    throw DomainError("solve_linear: boundary data must have zero mean radial part");
  }
  if (!(lambda > 3.0) || lambda > params::lambda_cap(p) + 1e-12) {
    throw DomainError("solve_linear: lambda outside the admissible window");
  }
  for (int k = -K; k <= K; ++k) {
    const auto& m = f.mode(k);
    if (m.fr.tail_exponent() < lambda - 1e-12 || m.ft.tail_exponent() < lambda - 1e-12) {
      throw ModeError(k, "forcing decays slower than r^-lambda");
    }
  }

  ModeField out(f.grid(), K, lambda);
  parallel_for(static_cast<std::size_t>(2 * K + 1), [&](std::size_t idx) {
    const int k = static_cast<int>(idx) - K;
    try {
      ModeProfiles& m = out.mode(k);
      const ModeForcing& fk = f.mode(k);
      if (k == 0) {
        ZeroModeSolution z = solve_zero_mode(fk.ft, g.g_theta[0], p, lambda);
        out.sigma = z.sigma;
        m.vt = std::move(z.v_theta0);
        m.dvt = std::move(z.dv);
        m.d2vt = std::move(z.d2v);
        m.w = std::move(z.w);
        m.dw = std::move(z.dw);
        return;
      }
      NonzeroModeSolution s = solve_nonzero_mode(fk.fr, fk.ft, g.g_r[k], g.g_theta[k], k, p);
      m.vr = std::move(s.v_r);
      m.vt = std::move(s.v_theta);
      m.dvr = std::move(s.dv_r);
      m.dvt = std::move(s.dv_theta);
      m.d2vr = std::move(s.d2v_r);
      m.d2vt = std::move(s.d2v_theta);
      m.w = std::move(s.w);
      m.dw = std::move(s.dw);
    } catch (const ModeError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ModeError(k, ex.what());
    }
  });
  out.derivatives = DerivativeData::analytic;
  return out;
}

}  // namespace extflow::linear
