#include "extflow/params.hpp"

#include <algorithm>
#include <cmath>

#include "extflow/errors.hpp"

namespace extflow::params {

Exponents mode_exponents(const FlowParameters& p, int k) {
  if (k == 0) throw DomainError("mode_exponents: k must be nonzero");
  const double kk = static_cast<double>(k);
  const cplx disc(p.nu * p.nu + 4.0 * kk * kk, 4.0 * p.mu * kk);
  const cplx root = std::sqrt(disc);  // principal branch, Re >= 0
  return Exponents{0.5 * (p.nu + root), 0.5 * (p.nu - root), k};
}

std::optional<double> critical_mu(double nu) {
  if (nu <= -1.5) return std::nullopt;
  const double radicand = ((2.0 * nu + 19.0) * nu + 56.0) * nu + 48.0;
  if (radicand < 0.0) return std::nullopt;
  return std::sqrt(radicand);
}

double lambda_cap(const FlowParameters& p) {
  const double re = mode_exponents(p, 1).xi_minus.real();
  const double lambda0 = p.nu < -2.0 ? 1.0 - p.nu : 3.01;
  return std::min(1.0 - re, lambda0);
}

double select_lambda(const FlowParameters& p, double lambda_delta) {
  const double cap = lambda_cap(p);
  if (!(cap > 3.0)) {
    throw InadmissibleParameters("select_lambda: empty decay window (3, " +
                                 std::to_string(cap) + ")");
  }
  const double delta = std::min(lambda_delta, 0.5 * (cap - 3.0));
  return 3.0 + delta;
}

AdmissibilityReport admissibility(const FlowParameters& p,
                                  double lambda_delta) {
  AdmissibilityReport rep;
  rep.re_xi1_minus = mode_exponents(p, 1).xi_minus.real();
  rep.margin = -2.0 - rep.re_xi1_minus;
  rep.admissible = rep.re_xi1_minus < -2.0;
  rep.critical_mu = critical_mu(p.nu);
  if (rep.admissible) rep.lambda = select_lambda(p, lambda_delta);

  // The closed-form condition reads "nu <= -3/2, any mu"; at nu = -3/2 and
  // mu = 0 the exponent sits exactly on -2, which is critical.
  const bool closed_form = p.nu <= -1.5 ||
                           (rep.critical_mu && std::abs(p.mu) > *rep.critical_mu);
  if (closed_form != rep.admissible) {
    rep.note =
        "closed-form threshold and strict criterion Re(xi_1^-) < -2 disagree; "
        "the strict criterion is used";
  }
  return rep;
}

std::optional<double> bisect_threshold(double nu, double mu_hi, double tol) {
  auto g = [nu](double mu) {
    return mode_exponents(FlowParameters{nu, mu}, 1).xi_minus.real() + 2.0;
  };
  double lo = 0.0, hi = mu_hi;
  double glo = g(lo), ghi = g(hi);
  if (glo == 0.0) return lo;
  if ((glo > 0.0) == (ghi > 0.0)) return std::nullopt;
  while (hi - lo > tol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace extflow::params
