#pragma once

#include <vector>

#include "extflow/mode_field.hpp"
#include "extflow/params.hpp"
#include "extflow/spectral.hpp"

namespace extflow::checks {

/// max_k,r r^(lambda-2) |(r v_r)' + ik v_theta| with (r v_r)' from finite
/// differences in log r, relative to max r^(lambda-2)(|v_r| + |k v_theta|).
double divergence_error(const ModeField& v);

/// Largest mismatch of the r = 1 mode values (v_theta of mode 0 includes
/// sigma) against g, relative to max(max|g_k|, max|v|).
double boundary_error(const ModeField& v, const spectral::BoundaryData& g);

/// max |u(1, theta) - (nu + g_r, mu + g_theta)| at n_theta uniform angles,
/// relative to max(1, |nu|, |mu|).
double physical_boundary_error(const ModeField& v, const spectral::BoundaryData& g,
                               const FlowParameters& p, int n_theta);

/// max_k |v_{-k} - conj(v_k)| over every profile, relative to max|v|.
double conjugate_asymmetry(const ModeField& v);

struct ModeBound {
  int k = 0;
  double solution_norm = 0.0;  ///< (1+k^2)|v_k| + (1+|k|)|v_k'| + |v_k''|
  double data_norm = 0.0;      ///< k^2 |g_k| + |f_k|_lambda
  double ratio = 0.0;          ///< solution / data, 0 when there is no data
  double a_k = 0.0;            ///< |2 - |k| + xi_k^-|, 0 for k = 0
};

std::vector<ModeBound> mode_bounds(const ModeField& v, const Forcing& f,
                                   const spectral::BoundaryData& g, const FlowParameters& p);

struct DecaySlope {
  int k = 0;
  double v = 0.0;
  double w = 0.0;
};

/// Fitted log-log slopes per mode: the larger (slower) of v_r and v_theta,
/// and of w. -inf for identically zero profiles.
std::vector<DecaySlope> decay_slopes(const ModeField& v);

}  // namespace extflow::checks
