#pragma once

#include <string>
#include <utility>

#include "extflow/mode_field.hpp"
#include "extflow/params.hpp"
#include "extflow/spectral.hpp"

namespace extflow::linear {

/// Angular-average part of the linearized problem:
///   -v'' - (1 - nu) v'/r + (1 + nu) v/r^2 = f_theta0,  v(1) = g_theta0.
/// For nu >= -2 the boundary value is matched by the critical swirl sigma/r
/// and v_theta0 decays subcritically; for nu < -2 sigma is zero.
struct ZeroModeSolution {
  RadialProfile v_theta0;
  RadialProfile dv, d2v;  ///< r-derivatives of v_theta0
  RadialProfile w, dw;    ///< vorticity (1/r)(r v)' and its derivative
  double sigma = 0.0;
  std::string warning;  ///< set when nu sits just below -2
};

ZeroModeSolution solve_zero_mode(const RadialProfile& f_theta0, cplx g_theta0,
                                 const FlowParameters& p, double lambda);

/// The two outer/inner pieces of the integrated-by-parts forcing transform
///   S_out = r^xi+ \int_r^inf s^-xi+ (xi+ f_theta - ik f_r),
///   S_in  = r^xi- \int_1^r  s^-xi- (xi- f_theta - ik f_r),
/// so that h = S_out + S_in - f_theta(1) r^xi-.
struct ForcingParts {
  RadialProfile s_out, s_in;
  cplx f_theta_at_1 = 0.0;
};

ForcingParts forcing_parts(const RadialProfile& f_r, const RadialProfile& f_theta,
                           const params::Exponents& e);

/// h_{k,F}(r); never differentiates the forcing.
RadialProfile forcing_transform(const RadialProfile& f_r, const RadialProfile& f_theta,
                                const params::Exponents& e);

/// G = (xi+ - xi-)^-1 \int_1^inf r^{1-|k|} h(r) dr.
cplx forcing_constant(const RadialProfile& h, const params::Exponents& e);

struct BoundaryConstants {
  cplx w_bar;
  cplx phi_bar;
};

BoundaryConstants boundary_constants(cplx g_r, cplx g_theta, cplx G,
                                     const params::Exponents& e);

/// w = w_bar r^xi- + h / (xi+ - xi-).
RadialProfile solve_vorticity_mode(const RadialProfile& h, cplx w_bar,
                                   const params::Exponents& e);

/// phi = phi_bar r^-|k| + r^|k|/(2|k|) \int_r^inf s^{1-|k|} w
///                      + r^-|k|/(2|k|) \int_1^r s^{1+|k|} w.
RadialProfile solve_stream_mode(const RadialProfile& w, cplx phi_bar, int k);

/// (v_r, v_theta) from the vorticity mode and the boundary data.
std::pair<RadialProfile, RadialProfile> velocity_from_stream(const RadialProfile& w,
                                                             cplx g_r, cplx g_theta, int k);

struct NonzeroModeSolution {
  int k = 0;
  RadialProfile w, dw;
  RadialProfile v_r, v_theta;
  RadialProfile dv_r, dv_theta, d2v_r, d2v_theta;
  cplx w_bar, phi_bar;
  cplx G;
};

/// Full chain for one k != 0. The r^xi- part of w is integrated in closed
/// form; only the particular part goes through quadrature.
NonzeroModeSolution solve_nonzero_mode(const RadialProfile& f_r, const RadialProfile& f_theta,
                                       cplx g_r, cplx g_theta, int k,
                                       const FlowParameters& p);

/// Solves every mode |k| <= f.kmax() concurrently. Requires g_r[0] == 0 and
/// admissible parameters. Mode failures are rethrown as ModeError.
ModeField solve_linear(const Forcing& f, const spectral::BoundaryData& g,
                       const FlowParameters& p, double lambda);

/// True when nu lies in (-2.1, -2), where the zero-mode constants scale
/// like 1/(nu + 2).
bool near_branch_point(const FlowParameters& p);

}  // namespace extflow::linear
