#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "extflow/errors.hpp"
#include "extflow/linear_solver.hpp"
#include "oracles.hpp"

using namespace extflow;
using namespace extflow::linear;
using extflow::radial::make_grid;

namespace {

RadialProfile power(const GridPtr& g, double p, cplx c = 1.0) {
  return RadialProfile::sample(g, [&](double r) { return c * std::pow(r, -p); }, p);
}

double max_rel_error(const RadialProfile& got, const std::function<cplx(double)>& want,
                     double r_hi) {
  double err = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < got.size() && got.grid().r(j) <= r_hi * (1 + 1e-14); ++j) {
    const cplx w = want(got.grid().r(j));
    err = std::max(err, std::abs(got[j] - w));
    scale = std::max(scale, std::abs(w));
  }
  return err / scale;
}

// w_tt - nu w_t - (k^2 + i mu k) w + r^2 F on grid nodes away from the ends,
// relative to the largest individual term.
double vorticity_plug_back(const RadialProfile& w, const FlowParameters& p, int k, cplx A,
                           double pa, cplx B, double pb, double r_hi) {
  const auto& g = w.grid();
  const auto d = radial::log_derivatives(w.values(), g.h());
  const cplx kk(double(k) * k, p.mu * k);
  double res = 0.0, scale = 0.0;
  for (std::size_t j = 3; j + 3 < g.size() && g.r(j) <= r_hi; ++j) {
    const cplx f = oracle::curl_forcing_r2(g.r(j), k, A, pa, B, pb);
    const cplx terms[] = {d.d2[j], -p.nu * d.d1[j], -kk * w[j], f};
    cplx s = 0.0;
    for (auto t : terms) {
      s += t;
      scale = std::max(scale, std::abs(t));
    }
    res = std::max(res, std::abs(s));
  }
  return res / scale;
}

}  // namespace

TEST_SUITE("linear") {

TEST_CASE("zero mode: nu = 0 splits off the critical swirl") {
  const auto g = make_grid(2000, 1e4);
  const FlowParameters p{0.0, 7.0};
  const double lam = params::select_lambda(p);
  const auto z = solve_zero_mode(power(g, 4.0), 0.0, p, lam);
  CHECK(z.sigma == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(max_rel_error(z.v_theta0, [](double r) { return -std::pow(r, -2.0) / 3.0; }, 100.0) <
        1e-8);
  CHECK(max_rel_error(z.dv, [](double r) { return 2.0 * std::pow(r, -3.0) / 3.0; }, 100.0) <
        1e-8);
  CHECK(max_rel_error(z.d2v, [](double r) { return -2.0 * std::pow(r, -4.0); }, 100.0) < 1e-8);
  // w = v' + v/r = r^-3 / 3
  CHECK(max_rel_error(z.w, [](double r) { return std::pow(r, -3.0) / 3.0; }, 100.0) < 1e-8);
  CHECK(max_rel_error(z.dw, [](double r) { return -std::pow(r, -4.0); }, 100.0) < 1e-8);
  CHECK(z.warning.empty());
}

TEST_CASE("zero mode: nu = -4 has no swirl and an r^{1+nu} homogeneous part") {
  const auto g = make_grid(2000, 1e4);
  const FlowParameters p{-4.0, 0.0};
  const double lam = params::select_lambda(p);
  const auto z = solve_zero_mode(power(g, 4.0), 0.0, p, lam);
  CHECK(z.sigma == 0.0);
  CHECK(max_rel_error(z.v_theta0, [](double r) { return std::pow(r, -2.0) - std::pow(r, -3.0); },
                      100.0) < 1e-8);
  CHECK(max_rel_error(z.dv,
                      [](double r) { return -2.0 * std::pow(r, -3.0) + 3.0 * std::pow(r, -4.0); },
                      100.0) < 1e-8);
  CHECK(std::abs(z.v_theta0[0]) < 1e-12);
}

TEST_CASE("zero mode: general power law against the ODE roots") {
  const auto g = make_grid(2000, 1e4);
  for (double nu : {-3.5, -1.0, 0.5, 1.7}) {
    const FlowParameters p{nu, nu > -2.0 ? 30.0 : 0.0};
    const double lam = params::select_lambda(p);
    const double pf = 4.2, gv = 0.25;
    const double beta = 2.0 - pf;
    const double A = 1.0 / (-beta * beta + nu * beta + 1.0 + nu);
    const auto z = solve_zero_mode(power(g, pf), gv, p, lam);
    if (nu >= -2.0) {
      CHECK(z.sigma == doctest::Approx(gv - A).epsilon(1e-10));
      CHECK(max_rel_error(z.v_theta0, [&](double r) { return A * std::pow(r, beta); }, 100.0) <
            1e-8);
    } else {
      CHECK(z.sigma == 0.0);
      CHECK(max_rel_error(z.v_theta0,
                          [&](double r) {
                            return A * std::pow(r, beta) + (gv - A) * std::pow(r, 1.0 + nu);
                          },
                          100.0) < 1e-8);
    }
  }
}

TEST_CASE("zero mode: zero data and guard rails") {
  const auto g = make_grid(400, 1e3);
  const FlowParameters p{0.0, 7.0};
  const auto z = solve_zero_mode(RadialProfile::zeros(g), 0.0, p, 3.005);
  CHECK(z.v_theta0.is_zero());
  CHECK(z.sigma == 0.0);
  CHECK_THROWS_AS(solve_zero_mode(power(g, 4.0), 0.0, {-2.5, 0.0}, 3.6), InadmissibleParameters);
  CHECK_FALSE(solve_zero_mode(power(g, 4.0), 0.0, {-2.05, 0.0}, 3.005).warning.empty());
  CHECK(near_branch_point({-2.05, 0.0}));
  CHECK_FALSE(near_branch_point({-2.5, 0.0}));
}

TEST_CASE("forcing transform matches its defining integrals") {
  const auto g = make_grid(2000, 1e4);
  const FlowParameters p{0.3, 9.0};
  const cplx A(0.7, -0.2), B(-0.4, 0.9);
  const double pa = 4.0, pb = 4.6;
  for (int k : {1, -2, 5}) {
    const auto e = params::mode_exponents(p, k);
    const cplx xp = e.xi_plus, xm = e.xi_minus, ik(0.0, k);
    auto expect = [&](double r) {
      const cplx s_out = xp * A * std::pow(r, 1.0 - pa) / (xp + pa - 1.0) -
                         ik * B * std::pow(r, 1.0 - pb) / (xp + pb - 1.0);
      const cplx rxm = std::exp(xm * std::log(r));
      const cplx s_in = xm * A * (std::pow(r, 1.0 - pa) - rxm) / (1.0 - xm - pa) -
                        ik * B * (std::pow(r, 1.0 - pb) - rxm) / (1.0 - xm - pb);
      return s_out + s_in - A * rxm;
    };
    const auto h = forcing_transform(power(g, pb, B), power(g, pa, A), e);
    CHECK(max_rel_error(h, expect, 1e4) < 1e-8);
  }
}

TEST_CASE("property: forcing transform commutes with conjugation") {
  const auto g = make_grid(1000, 1e3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = oracle::random_admissible();
    const int k = 1 + static_cast<int>(oracle::uniform(0.0, 6.0));
    const cplx A(oracle::uniform(-1, 1), oracle::uniform(-1, 1));
    const cplx B(oracle::uniform(-1, 1), oracle::uniform(-1, 1));
    const auto hp = forcing_transform(power(g, 4.2, B), power(g, 3.8, A),
                                      params::mode_exponents(p, k));
    const auto hm = forcing_transform(power(g, 4.2, std::conj(B)), power(g, 3.8, std::conj(A)),
                                      params::mode_exponents(p, -k));
    for (std::size_t j = 0; j < g->size(); j += 97) {
      CHECK(std::abs(hm[j] - std::conj(hp[j])) <= 1e-13 * (1.0 + std::abs(hp[j])));
    }
  }
}

TEST_CASE("boundary constants agree with the re-derived 2x2 system") {
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = oracle::random_admissible();
    int k = static_cast<int>(oracle::uniform(-32.0, 32.0));
    if (k == 0) k = 1;
    const auto e = params::mode_exponents(p, k);
    const cplx gr(oracle::uniform(-1, 1), oracle::uniform(-1, 1));
    const cplx gt(oracle::uniform(-1, 1), oracle::uniform(-1, 1));
    const cplx G(oracle::uniform(-1, 1), oracle::uniform(-1, 1));
    const auto got = boundary_constants(gr, gt, G, e);
    const auto want = oracle::rederive_constants(gr, gt, G, k, e.xi_minus);
    CHECK(std::abs(got.w_bar - want.w_bar) <= 1e-12 * std::max(1.0, std::abs(want.w_bar)));
    CHECK(std::abs(got.phi_bar - want.phi_bar) <= 1e-12 * std::max(1.0, std::abs(want.phi_bar)));
  }
  // pure radial datum at k = 1 with no forcing
  const auto e = params::mode_exponents({0.0, 7.0}, 1);
  const auto c = boundary_constants(1.0, 0.0, 0.0, e);
  CHECK(std::abs(c.phi_bar - cplx(0.0, -0.5)) < 1e-15);
}

TEST_CASE("vorticity and stream solves reduce to homogeneous solutions") {
  const auto g = make_grid(1000, 1e3);
  const auto e = params::mode_exponents({0.0, 7.0}, 2);
  const auto w = solve_vorticity_mode(RadialProfile::zeros(g), cplx(0.5, 1.0), e);
  for (std::size_t j = 0; j < g->size(); j += 50) {
    const cplx expect = cplx(0.5, 1.0) * std::exp(e.xi_minus * std::log(g->r(j)));
    CHECK(std::abs(w[j] - expect) < 1e-14);
  }
  const auto phi = solve_stream_mode(RadialProfile::zeros(g), cplx(2.0, 0.0), 3);
  for (std::size_t j = 0; j < g->size(); j += 50) {
    CHECK(std::abs(phi[j] - 2.0 * std::pow(g->r(j), -3.0)) < 1e-14);
  }
}

TEST_CASE("stream function inverts the Laplacian and generates the velocity") {
  const auto g = make_grid(2000, 1e4);
  const FlowParameters p{0.0, 7.0};
  for (int k : {1, 2, 4}) {
    const auto e = params::mode_exponents(p, k);
    const auto w = solve_vorticity_mode(RadialProfile::zeros(g), 1.0, e);
    const cplx phi_bar(0.2, -0.1);
    const auto phi = solve_stream_mode(w, phi_bar, k);
    const auto d = radial::log_derivatives(phi.values(), g->h());
    double res = 0.0;
    for (std::size_t j = 3; j + 3 < g->size() && g->r(j) < 100.0; ++j) {
      const double r = g->r(j);
      // phi_tt - k^2 phi = -r^2 w
      res = std::max(res, std::abs(d.d2[j] - double(k * k) * phi[j] + r * r * w[j]) /
                              std::abs(r * r * w[j]));
    }
    CHECK(res < 1e-6);
    const cplx gr = cplx(0.0, k) * phi[0];
    const cplx gt = -d.d1[0];
    const auto [vr, vt] = velocity_from_stream(w, gr, gt, k);
    double er = 0.0, et = 0.0;
    for (std::size_t j = 3; j + 3 < g->size() && g->r(j) < 100.0; ++j) {
      const double r = g->r(j);
      er = std::max(er, std::abs(vr[j] - cplx(0.0, k) * phi[j] / r) / std::abs(phi[j] / r));
      et = std::max(et, std::abs(vt[j] + d.d1[j] / r) / std::abs(phi[j] / r));
    }
    CHECK(er < 1e-6);
    CHECK(et < 1e-6);
  }
}

TEST_CASE("nonzero mode matches a finite-difference BVP oracle") {
  const auto g = make_grid(2000, 1e4);
  const double r_hi = 50.0, t_end = std::log(r_hi);
  for (int trial = 0; trial < 8; ++trial) {
    const auto p = oracle::random_admissible();
    for (int k : {1, 2, 5}) {
      const cplx A(oracle::uniform(-1, 1), oracle::uniform(-1, 1));
      const cplx B(oracle::uniform(-1, 1), oracle::uniform(-1, 1));
      const double pa = oracle::uniform(3.5, 5.0), pb = oracle::uniform(3.5, 5.0);
      const cplx gr(oracle::uniform(-0.1, 0.1), oracle::uniform(-0.1, 0.1));
      const cplx gt(oracle::uniform(-0.1, 0.1), oracle::uniform(-0.1, 0.1));
      const auto s = solve_nonzero_mode(power(g, pb, B), power(g, pa, A), gr, gt, k, p);
      CHECK(std::abs(s.v_r[0] - gr) < 1e-12);
      CHECK(std::abs(s.v_theta[0] - gt) < 1e-12);

      const cplx q = -cplx(double(k) * k, p.mu * k);
      const std::size_t n = 20000;
      const auto fd = oracle::fd_bvp(
          -p.nu, q, [&](double t) { return -oracle::curl_forcing_r2(std::exp(t), k, A, pa, B, pb); },
          t_end, n, s.w[0], s.w.at(r_hi));
      double err = 0.0, scale = 0.0;
      for (std::size_t i = 0; i <= n; i += 10) {
        const double r = std::exp(t_end * i / n);
        err = std::max(err, std::abs(s.w.at(r) - fd[i]));
        scale = std::max(scale, std::abs(fd[i]));
      }
      CHECK(err / scale < 1e-4);
      if (k <= 2) CHECK(vorticity_plug_back(s.w, p, k, A, pa, B, pb, r_hi) < 1e-6);
    }
  }
}

TEST_CASE("nonzero mode: divergence-free and consistent vorticity") {
  const auto g = make_grid(2000, 1e4);
  const FlowParameters p{0.0, 7.0};
  for (int k : {1, 3, -4}) {
    const auto s = solve_nonzero_mode(power(g, 4.0, 0.3), power(g, 4.5, cplx(0, 1)),
                                      cplx(0.01, 0.02), 0.05, k, p);
    const cplx ik(0.0, k);
    double div = 0.0, curl = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < g->size(); ++j) {
      const double r = g->r(j);
      div = std::max(div, std::abs(s.dv_r[j] + s.v_r[j] / r + ik * s.v_theta[j] / r));
      curl = std::max(curl, std::abs(s.dv_theta[j] + s.v_theta[j] / r - ik * s.v_r[j] / r - s.w[j]));
      scale = std::max(scale, std::abs(s.dv_r[j]) + std::abs(s.w[j]));
    }
    CHECK(div / scale < 1e-12);
    CHECK(curl / scale < 1e-12);
  }
}

TEST_CASE("solve_linear: decoupling, linearity, symmetry and decay") {
  const auto g = make_grid(2000, 1e4);
  const FlowParameters p{0.0, 7.0};
  const double lam = params::select_lambda(p);
  const int K = 6;

  Forcing f1(g, K), f2(g, K);
  f1.mode(2).fr = power(g, 4.0, cplx(0.2, 0.1));
  f1.mode(-2).fr = power(g, 4.0, cplx(0.2, -0.1));
  f2.mode(0).ft = power(g, 4.0, 0.5);
  f2.mode(3).ft = power(g, 4.2, cplx(0.0, 0.3));
  f2.mode(-3).ft = power(g, 4.2, cplx(0.0, -0.3));
  spectral::BoundaryData b0(K), b1(K);
  b1.g_theta[1] = cplx(0.01, 0.02);
  b1.g_theta[-1] = cplx(0.01, -0.02);
  b1.g_theta[0] = 0.03;

  const auto v1 = solve_linear(f1, b0, p, lam);
  for (int k = -K; k <= K; ++k) {
    if (std::abs(k) == 2) continue;
    CHECK(v1.mode(k).vr.is_zero());
    CHECK(v1.mode(k).vt.is_zero());
  }
  CHECK(v1.sigma == 0.0);

  const auto v2 = solve_linear(f2, b1, p, lam);
  Forcing fs(g, K);
  for (int k = -K; k <= K; ++k) {
    fs.mode(k).fr = 2.0 * f1.mode(k).fr + (-3.0) * f2.mode(k).fr;
    fs.mode(k).ft = 2.0 * f1.mode(k).ft + (-3.0) * f2.mode(k).ft;
  }
  spectral::BoundaryData bs(K);
  for (int k = -K; k <= K; ++k) bs.g_theta[k] = -3.0 * b1.g_theta[k];
  const auto vs = solve_linear(fs, bs, p, lam);
  CHECK(vs.sigma == doctest::Approx(-3.0 * v2.sigma).epsilon(1e-12));
  for (int k = -K; k <= K; ++k) {
    for (std::size_t j = 0; j < g->size(); j += 37) {
      const cplx want = 2.0 * v1.mode(k).vt[j] - 3.0 * v2.mode(k).vt[j];
      CHECK(std::abs(vs.mode(k).vt[j] - want) <= 1e-12 * (1e-3 + std::abs(want)));
    }
  }

  for (int k = 1; k <= K; ++k) {
    for (std::size_t j = 0; j < g->size(); j += 37) {
      CHECK(std::abs(v2.mode(-k).vr[j] - std::conj(v2.mode(k).vr[j])) < 1e-15);
      CHECK(std::abs(v2.mode(-k).vt[j] - std::conj(v2.mode(k).vt[j])) < 1e-15);
    }
  }

  for (int k = -K; k <= K; ++k) {
    const auto& m = v2.mode(k);
    if (m.vt.is_zero()) continue;
    CHECK(radial::loglog_slope(m.vt) <= -(lam - 2.0) + 0.1);
    CHECK(radial::loglog_slope(m.w) <= -(lam - 1.0) + 0.1);
  }
}

TEST_CASE("solve_linear rejects bad input") {
  const auto g = make_grid(200, 1e3);
  const int K = 2;
  Forcing f(g, K);
  spectral::BoundaryData b(K);
  CHECK_THROWS_AS(solve_linear(f, b, {0.0, 6.0}, 3.005), InadmissibleParameters);
  spectral::BoundaryData wrong(3);
  CHECK_THROWS_AS(solve_linear(f, wrong, {0.0, 7.0}, 3.005), DomainError);
  b.g_r[0] = 0.1;
  CHECK_THROWS_AS(solve_linear(f, b, {0.0, 7.0}, 3.005), DomainError);
  b.g_r[0] = 0.0;
  CHECK_THROWS_AS(solve_linear(f, b, {0.0, 7.0}, 2.5), DomainError);
  f.mode(1).fr = power(g, 3.002);
  CHECK_THROWS_AS(solve_linear(f, b, {0.0, 7.0}, 3.005), ModeError);
}

}  // TEST_SUITE
