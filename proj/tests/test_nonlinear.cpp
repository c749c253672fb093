#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "extflow/checks.hpp"
#include "extflow/errors.hpp"
#include "extflow/linear_solver.hpp"
#include "extflow/nonlinear.hpp"
#include "oracles.hpp"

using namespace extflow;
using namespace extflow::nonlinear;
using extflow::radial::make_grid;

namespace {

RadialProfile power(const GridPtr& g, double p, cplx c = 1.0) {
  return RadialProfile::sample(g, [&](double r) { return c * std::pow(r, -p); }, p);
}

cplx rand_c(double amp) {
  return {oracle::uniform(-amp, amp), oracle::uniform(-amp, amp)};
}

// Real-valued random data in modes |k| <= kdata.
struct Data {
  Forcing f;
  spectral::BoundaryData g;
};

Data make_data(const GridPtr& grid, int K, int kdata, double amp) {
  Data d{Forcing(grid, K), spectral::BoundaryData(K)};
  for (int k = 0; k <= kdata; ++k) {
    const double pr = oracle::uniform(3.6, 5.0), pt = oracle::uniform(3.6, 5.0);
    const cplx ar = k == 0 ? cplx(oracle::uniform(-amp, amp)) : rand_c(amp);
    const cplx at = k == 0 ? cplx(oracle::uniform(-amp, amp)) : rand_c(amp);
    d.f.mode(k).fr = power(grid, pr, ar);
    d.f.mode(k).ft = power(grid, pt, at);
    d.f.mode(-k).fr = power(grid, pr, std::conj(ar));
    d.f.mode(-k).ft = power(grid, pt, std::conj(at));
    const cplx gr = k == 0 ? cplx(0.0) : rand_c(amp);
    const cplx gt = k == 0 ? cplx(oracle::uniform(-amp, amp)) : rand_c(amp);
    d.g.g_r[k] = gr;
    d.g.g_r[-k] = std::conj(gr);
    d.g.g_theta[k] = gt;
    d.g.g_theta[-k] = std::conj(gt);
  }
  return d;
}

Data scaled(const Data& d, double s) {
  Data out = d;
  for (int k = -d.f.kmax(); k <= d.f.kmax(); ++k) {
    out.f.mode(k).fr *= s;
    out.f.mode(k).ft *= s;
    out.g.g_r[k] *= s;
    out.g.g_theta[k] *= s;
  }
  return out;
}

}  // namespace

TEST_SUITE("nonlinear") {

TEST_CASE("btilde norm examples") {
  const auto g = make_grid(1000, 1e4);
  ModeField v(g, 3, 3.005);
  CHECK(btilde_norm(v) == 0.0);
  v.sigma = 0.3;
  CHECK(btilde_norm(v) == doctest::Approx(0.3).epsilon(1e-15));
  v.sigma = 0.0;
  // v_r = c r^-2 in mode 2: (1+4)|c| + 3 * 2|c| + 6|c|, all peaking at r = 1
  const cplx c(0.3, 0.4);
  v.mode(2).vr = power(g, 2.0, c);
  v.mode(2).dvr = power(g, 3.0, -2.0 * c);
  v.mode(2).d2vr = power(g, 4.0, 6.0 * c);
  CHECK(btilde_norm(v) == doctest::Approx(17.0 * 0.5).epsilon(1e-12));
  v.derivatives = DerivativeData::none;
  CHECK_THROWS_AS(btilde_norm(v), DomainError);
}

TEST_CASE("nonlinear rhs: trivial fields pass the forcing through") {
  const auto g = make_grid(500, 1e3);
  const int K = 3;
  auto d = make_data(g, K, 2, 1e-2);
  ModeField v(g, K, 3.005);
  const auto r0 = nonlinear_rhs(v, d.f);
  v.sigma = 0.7;
  const auto r1 = nonlinear_rhs(v, d.f);
  for (int k = -K; k <= K; ++k) {
    for (std::size_t j = 0; j < g->size(); j += 11) {
      CHECK(r0.rhs.mode(k).fr[j] == d.f.mode(k).fr[j]);
      CHECK(r0.rhs.mode(k).ft[j] == d.f.mode(k).ft[j]);
      CHECK(std::abs(r1.rhs.mode(k).fr[j] - d.f.mode(k).fr[j]) < 1e-16);
      CHECK(std::abs(r1.rhs.mode(k).ft[j] - d.f.mode(k).ft[j]) < 1e-16);
    }
  }
  CHECK(r0.discarded == 0.0);
  CHECK(quadratic_rhs(v).rhs.mode(1).fr.is_zero());
}

TEST_CASE("nonlinear rhs matches a physical-space evaluation") {
  const auto g = make_grid(400, 1e3);
  const int K = 2;
  ModeField v(g, K, 3.005);
  v.sigma = 0.2;
  struct Term {
    int k;
    cplx a, b;  // v_r = a r^-2, v_theta = b r^-3 (not divergence-free; the product only)
  };
  const Term terms[] = {{0, 0.0, 0.3}, {1, cplx(0.1, 0.2), cplx(-0.3, 0.1)}};
  for (const auto& t : terms) {
    for (int s : {1, -1}) {
      if (t.k == 0 && s < 0) continue;
      const int k = s * t.k;
      const cplx a = s > 0 ? t.a : std::conj(t.a), b = s > 0 ? t.b : std::conj(t.b);
      auto& m = v.mode(k);
      m.vr = power(g, 2.0, a);
      m.dvr = power(g, 3.0, -2.0 * a);
      m.vt = power(g, 3.0, b);
      m.dvt = power(g, 4.0, -3.0 * b);
    }
  }
  Forcing f0(g, K);
  const auto rhs = nonlinear_rhs(v, f0);
  CHECK(rhs.discarded == 0.0);
  for (std::size_t j : {0ul, 50ul, 200ul}) {
    const double r = g->r(j);
    for (double th : {0.0, 0.7, 2.9, 5.1}) {
      double ur = 0, ut = v.sigma / r, urr = 0, utr = -v.sigma / (r * r), urt = 0, utt = 0;
      for (int k = -K; k <= K; ++k) {
        const cplx e = std::exp(cplx(0.0, k * th)), ik(0.0, k);
        const auto& m = v.mode(k);
        ur += std::real(m.vr[j] * e);
        ut += std::real(m.vt[j] * e);
        urr += std::real(m.dvr[j] * e);
        utr += std::real(m.dvt[j] * e);
        urt += std::real(ik * m.vr[j] * e);
        utt += std::real(ik * m.vt[j] * e);
      }
      // -(v.grad)v in polar form, without the sigma^2/r^3 term
      const double nr = -(ur * urr + ut / r * urt - ut * ut / r) - v.sigma * v.sigma / (r * r * r);
      const double nt = -(ur * utr + ut / r * utt + ur * ut / r);
      double sr = 0, st = 0;
      for (int n = -K; n <= K; ++n) {
        const cplx e = std::exp(cplx(0.0, n * th));
        sr += std::real(rhs.rhs.mode(n).fr[j] * e);
        st += std::real(rhs.rhs.mode(n).ft[j] * e);
      }
      CHECK(std::abs(sr - nr) < 1e-12);
      CHECK(std::abs(st - nt) < 1e-12);
    }
  }
}

TEST_CASE("nonlinear rhs reports modes pushed past kmax") {
  const auto g = make_grid(400, 1e3);
  ModeField v(g, 2, 3.005);
  v.mode(2).vr = power(g, 2.0, 0.1);
  v.mode(2).dvr = power(g, 3.0, -0.2);
  v.mode(-2).vr = power(g, 2.0, 0.1);
  v.mode(-2).dvr = power(g, 3.0, -0.2);
  const auto res = quadratic_rhs(v);
  CHECK(res.discarded > 0.0);
}

TEST_CASE("norm inequality holds with a stable constant") {
  oracle::rng().seed(7);
  const auto g = make_grid(1000, 1e4);
  const FlowParameters p{0.0, 7.0};
  const double lam = params::select_lambda(p);
  const int K = 8;
  auto scale_field = [&](ModeField v, double eps) {
    for (int k = -K; k <= K; ++k) {
      auto& m = v.mode(k);
      for (auto* q : {&m.vr, &m.vt, &m.dvr, &m.dvt, &m.d2vr, &m.d2vt, &m.w, &m.dw}) *q *= eps;
    }
    v.sigma *= eps;
    return v;
  };
  // ratio |N(v)|_E / |v|^2 for a field of unit data amplitude, at two sizes
  auto ratio = [&](const Data& d, double eps) {
    const auto v = scale_field(linear::solve_linear(d.f, d.g, p, lam), eps);
    const double b = btilde_norm(v);
    return e_norm(quadratic_rhs(v).rhs, lam) / (b * b);
  };
  double c_fit = 0.0;
  for (int trial = 0; trial < 12; ++trial) {
    const auto d = make_data(g, K, 3, 1.0);
    const double q1 = ratio(d, 1e-3), q2 = ratio(d, 1e-2);
    CHECK(q2 == doctest::Approx(q1).epsilon(1e-10));
    c_fit = std::max(c_fit, q1);
  }
  MESSAGE("C_fit = " << c_fit);
  double worst = 0.0;
  for (int trial = 0; trial < 24; ++trial) {
    const auto d = make_data(g, K, 3, 1.0);
    const double eps = oracle::uniform(1e-3, 1e-2);
    const auto v = scale_field(linear::solve_linear(d.f, d.g, p, lam), eps);
    const auto f = scaled(d, eps).f;
    const double b = btilde_norm(v);
    const double lhs = e_norm(nonlinear_rhs(v, f).rhs, lam);
    CHECK(lhs <= 1.2 * c_fit * b * b + e_norm(f, lam));
    worst = std::max(worst, ratio(d, 1.0) / c_fit);
  }
  MESSAGE("largest validation ratio / C_fit = " << worst);
}

TEST_CASE("picard: zero data is a fixed point at once") {
  const auto g = make_grid(500, 1e3);
  Forcing f(g, 4);
  spectral::BoundaryData b(4);
  const auto res = picard_solve(f, b, {0.0, 7.0});
  CHECK(res.report.converged);
  CHECK(res.report.iterations == 1);
  CHECK(btilde_norm(res.field) == 0.0);
}

TEST_CASE("picard: axisymmetric swirl forcing is solved by the linear map") {
  const auto g = make_grid(2000, 1e4);
  const double eps = 1e-3;
  Forcing f(g, 4);
  f.mode(0).ft = power(g, 4.0, eps);
  spectral::BoundaryData b(4);
  const auto res = picard_solve(f, b, {0.0, 7.0});
  REQUIRE(res.report.converged);
  CHECK(res.report.iterations <= 2);
  CHECK(res.field.sigma == doctest::Approx(eps / 3.0).epsilon(1e-10));
  for (std::size_t j = 0; j < g->size() && g->r(j) <= 100.0; j += 13) {
    const double r = g->r(j);
    CHECK(std::abs(res.field.mode(0).vt[j] + eps * std::pow(r, -2.0) / 3.0) <
          1e-10 * eps * std::pow(r, -2.0));
    CHECK(res.field.mode(1).vr.is_zero());
  }
}

TEST_CASE("picard: convergence, fixed point and boundary exactness") {
  const auto g = make_grid(1000, 1e4);
  const FlowParameters p{0.0, 7.0};
  const int K = 8;
  const auto d = make_data(g, K, 2, 1e-3);
  PicardConfig cfg;
  const auto res = picard_solve(d.f, d.g, p, cfg);
  REQUIRE(res.report.converged);
  CHECK(res.report.iterations <= 20);
  for (std::size_t i = 1; i < res.report.diff_norms.size(); ++i) {
    CHECK(res.report.diff_norms[i] < res.report.diff_norms[i - 1]);
  }
  const auto again = picard_step(res.field, d.f, d.g, p);
  CHECK(btilde_norm(difference(again, res.field)) < 10.0 * res.report.tolerance);
  CHECK(checks::boundary_error(res.field, d.g) < 1e-12);
  CHECK(checks::physical_boundary_error(res.field, d.g, p, 64) < 1e-8);
  CHECK(checks::conjugate_asymmetry(res.field) < 1e-14);
  CHECK(checks::divergence_error(res.field) < 1e-8);
  CHECK(res.report.residual < 1e-5);
}

TEST_CASE("picard: halving the data at least halves the contraction ratio") {
  const auto g = make_grid(1000, 1e4);
  const FlowParameters p{0.0, 7.0};
  const auto d = make_data(g, 8, 2, 1.0);
  double prev = 0.0;
  for (double amp : {4e-3, 2e-3, 1e-3, 5e-4}) {
    const auto res = picard_solve(scaled(d, amp).f, scaled(d, amp).g, p);
    REQUIRE(res.report.converged);
    const double c = res.report.contraction();
    CHECK(c > 0.0);
    if (prev > 0.0) CHECK(c <= 0.5 * prev * (1.0 + 1e-6));
    prev = c;
  }
}

TEST_CASE("picard: strong sink keeps sigma at zero") {
  const auto g = make_grid(1000, 1e4);
  const FlowParameters p{-3.0, 1.0};
  const auto d = make_data(g, 6, 2, 1e-3);
  const auto res = picard_solve(d.f, d.g, p);
  REQUIRE(res.report.converged);
  CHECK(res.field.sigma == 0.0);
  CHECK(std::abs(res.field.mode(0).vt[0] - d.g.g_theta[0]) < 1e-14);
}

TEST_CASE("picard: large data is reported, not thrown") {
  const auto g = make_grid(500, 1e4);
  const auto d = make_data(g, 6, 2, 1.0);
  PicardConfig cfg;
  cfg.max_iter = 8;
  const auto res = picard_solve(scaled(d, 50.0).f, scaled(d, 50.0).g, {0.0, 7.0}, cfg);
  CHECK_FALSE(res.report.converged);
  CHECK_FALSE(res.report.status.empty());
}

TEST_CASE("curl residual") {
  const auto g = make_grid(1000, 1e4);
  const FlowParameters p{0.0, 7.0};
  const int K = 8;
  ModeField zero(g, K, params::select_lambda(p));
  Forcing f0(g, K);
  CHECK(residual_curl(zero, p, f0).absolute == 0.0);

  const auto d = make_data(g, K, 2, 5e-2);
  const auto lin = linear::solve_linear(d.f, d.g, p, params::select_lambda(p));
  const auto lin_only = residual_curl(lin, p, d.f, false);
  CHECK(lin_only.relative < 1e-6);
  const auto full = picard_solve(d.f, d.g, p);
  REQUIRE(full.report.converged);
  const auto r_lin = residual_curl(lin, p, d.f);
  const auto r_full = residual_curl(full.field, p, d.f);
  CHECK(r_full.relative < 1e-5);
  CHECK(r_lin.relative > 10.0 * r_full.relative);
}

TEST_CASE("flux through circles") {
  const auto g = make_grid(1000, 1e4);
  for (double nu : {-3.0, 0.0, 1.5}) {
    const FlowParameters p{nu, 20.0};
    const auto d = make_data(g, 6, 3, 1e-3);
    const auto v = linear::solve_linear(d.f, d.g, p, params::select_lambda(p));
    for (double r : {1.0, 2.0, 5.0, 10.0}) {
      CHECK(flux(v, p, r) == doctest::Approx(2.0 * std::numbers::pi * nu).epsilon(1e-12));
      CHECK(std::abs(flux_quadrature(v, p, r, 64) - 2.0 * std::numbers::pi * nu) <=
            1e-8 * std::max(1.0, std::abs(2.0 * std::numbers::pi * nu)));
    }
  }
}

TEST_CASE("mode bounds and decay slopes") {
  const auto g = make_grid(2000, 1e4);
  const FlowParameters p{0.0, 7.0};
  const double lam = params::select_lambda(p);
  Forcing f(g, 6);
  for (int k = -6; k <= 6; ++k) {
    f.mode(k).fr = power(g, 4.0, 1e-3 / (1.0 + k * k));
    f.mode(k).ft = power(g, 4.0, cplx(0.0, 1e-3 * k) / (1.0 + k * k));
  }
  spectral::BoundaryData b(6);
  const auto v = linear::solve_linear(f, b, p, lam);
  for (const auto& mb : checks::mode_bounds(v, f, b, p)) {
    CHECK(mb.ratio >= 0.0);
    if (mb.k != 0) CHECK(mb.ratio > 0.0);
    CHECK(std::isfinite(mb.ratio));
    if (mb.k != 0) CHECK(mb.a_k > 0.0);
  }
  for (const auto& s : checks::decay_slopes(v)) {
    CHECK(s.v <= -(lam - 2.0) + 0.1);
    CHECK(s.w <= -(lam - 1.0) + 0.1);
  }
}

}  // TEST_SUITE
