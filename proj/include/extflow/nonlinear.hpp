#pragma once

#include <string>
#include <vector>

#include "extflow/mode_field.hpp"
#include "extflow/params.hpp"
#include "extflow/spectral.hpp"

namespace extflow::nonlinear {

/// sum_k sum_j (1+k^2)|v_{j,k}|_{lambda-2} + (1+|k|)|v'_{j,k}|_{lambda-1}
///            + |v''_{j,k}|_lambda, plus |sigma|.
/// Throws DomainError when the field carries no derivative data.
double btilde_norm(const ModeField& v);

struct RhsResult {
  Forcing rhs;
  /// E_lambda norm of the product modes kmax < |n| <= 2 kmax that were dropped.
  double discarded = 0.0;
  std::string warning;
};

/// Quadratic right-hand side of the Picard step,
///   fbar_r = -(v.grad) v_r + v_theta^2 / r + f_r,
///   fbar_theta = -(v.grad) v_theta - v_r v_theta / r + f_theta,
/// built mode by mode. The critical swirl sigma/r enters v_theta of mode 0;
/// the pure sigma^2/r^3 centrifugal term is left out (it is a gradient).
RhsResult nonlinear_rhs(const ModeField& vbar, const Forcing& f);

/// The quadratic part alone (nonlinear_rhs with f = 0).
RhsResult quadratic_rhs(const ModeField& vbar);

struct PicardConfig {
  double tol = 1e-10;  ///< relative to max(1, |v^1|)
  int max_iter = 50;
  double lambda_delta = params::kDefaultLambdaDelta;
  int divergence_window = 3;  ///< consecutive increases that abort the loop
};

struct IterationReport {
  std::vector<double> norms;       ///< |v^n| for n = 1, 2, ...
  std::vector<double> diff_norms;  ///< |v^n - v^{n-1}|
  std::vector<double> ratios;      ///< diff_norms[n] / diff_norms[n-1]
  bool converged = false;
  int iterations = 0;
  double tolerance = 0.0;  ///< absolute stopping threshold actually used
  double residual = 0.0;   ///< relative curl residual of the final iterate
  double discarded = 0.0;  ///< largest convolution truncation loss seen
  std::string status;

  /// Leading ratio |v^2 - v^1| / |v^1|, the measured contraction factor.
  double contraction() const { return ratios.empty() ? 0.0 : ratios.front(); }
};

struct PicardResult {
  ModeField field;
  IterationReport report;
};

/// v^0 = 0, v^{n+1} = L(N(v^n) + f, g) until the step falls below tolerance.
/// Non-convergence is reported, not thrown.
PicardResult picard_solve(const Forcing& f, const spectral::BoundaryData& g,
                          const FlowParameters& p, const PicardConfig& cfg = {});

/// One application of the solution map, evaluated as
/// L(f, g) + L(quadratic_rhs(v), 0).
ModeField picard_step(const ModeField& v, const Forcing& f, const spectral::BoundaryData& g,
                      const FlowParameters& p);

struct CurlResidual {
  double relative = 0.0;
  double absolute = 0.0;  ///< weighted sup of the residual
  double scale = 0.0;     ///< weighted sup of the largest individual term
};

/// Pressure-free residual -lap(omega) + u.grad(omega) - curl f of the full
/// flow (core plus perturbation) on an (r, theta) collocation grid, with
/// r-derivatives taken by finite differences of the velocity modes.
/// Weighted by r^(lambda+1). Without transport only the linearized operator
/// about the core is checked (the sigma swirl is left out as well).
CurlResidual residual_curl(const ModeField& v, const FlowParameters& p, const Forcing& f,
                           bool include_transport = true);

/// 2 pi r <u_r>(r) from the k = 0 radial mode plus the core.
double flux(const ModeField& v, const FlowParameters& p, double r);

/// Same flux by trapezoidal quadrature of the synthesized u_r over theta.
double flux_quadrature(const ModeField& v, const FlowParameters& p, double r, int n_theta);

/// Least-squares log-log slope over the last decade of nodes.
double decay_fit(const RadialProfile& p);

}  // namespace extflow::nonlinear
