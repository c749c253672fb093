#pragma once

#include <complex>
#include <optional>
#include <string>

namespace extflow {

using cplx = std::complex<double>;

/// Strengths of the critical core flow (nu/r) e_r + (mu/r) e_theta.
/// nu is the source (> 0) or sink (< 0) strength, the boundary flux being
/// 2*pi*nu; mu is the rotation strength.
struct FlowParameters {
  double nu = 0.0;
  double mu = 0.0;
};

namespace params {

/// Roots xi_plus, xi_minus of xi^2 - nu*xi - (k^2 + i*mu*k) = 0, i.e. the
/// exponents of the homogeneous solutions r^xi of the mode-k vorticity
/// equation. The square root is taken on the principal branch so
/// Re(xi_plus) >= Re(xi_minus).
struct Exponents {
  cplx xi_plus;
  cplx xi_minus;
  int k = 0;

  /// xi_plus - xi_minus = sqrt(nu^2 + 4(k^2 + i mu k)).
  cplx root_discriminant() const { return xi_plus - xi_minus; }
};

struct AdmissibilityReport {
  bool admissible = false;
  double re_xi1_minus = 0.0;
  double margin = 0.0;  ///< -2 - Re(xi_1^-); positive iff admissible
  std::optional<double> critical_mu;
  std::optional<double> lambda;
  std::string note;  ///< set when the closed-form threshold and the strict criterion disagree
};

/// Default offset of the decay weight above 3.
inline constexpr double kDefaultLambdaDelta = 0.005;

/// Throws DomainError for k == 0.
Exponents mode_exponents(const FlowParameters& p, int k);

/// sqrt(2nu^3 + 19nu^2 + 56nu + 48) for nu > -3/2, none otherwise.
std::optional<double> critical_mu(double nu);

AdmissibilityReport admissibility(const FlowParameters& p,
                                  double lambda_delta = kDefaultLambdaDelta);

/// Working decay weight lambda in (3, lambda_cap) with
/// lambda_cap = min(1 - Re xi_1^-, nu < -2 ? 1 - nu : 3.01).
/// Throws InadmissibleParameters when the window is empty.
double select_lambda(const FlowParameters& p,
                     double lambda_delta = kDefaultLambdaDelta);

/// Upper end of the admissible decay window.
double lambda_cap(const FlowParameters& p);

/// Bisection for the |mu| at which Re xi_1^-(nu, mu) = -2, searched on
/// [0, mu_hi]. Returns none if there is no sign change on that bracket.
std::optional<double> bisect_threshold(double nu, double mu_hi = 1e4,
                                       double tol = 1e-12);

}  // namespace params
}  // namespace extflow
