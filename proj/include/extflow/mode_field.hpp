#pragma once

#include <cstddef>
#include <vector>

#include "extflow/radial.hpp"

namespace extflow {

using radial::GridPtr;
using radial::RadialProfile;

/// Radial profiles of one Fourier mode of the perturbation velocity.
/// For k = 0, vt holds the subcritical part only; the critical swirl
/// sigma / r is kept in ModeField::sigma.
struct ModeProfiles {
  RadialProfile vr, vt;
  RadialProfile dvr, dvt;
  RadialProfile d2vr, d2vt;
  RadialProfile w, dw;  ///< vorticity mode and its r-derivative
};

enum class DerivativeData { analytic, approximate, none };

/// Perturbation field v = sum_k (v_{r,k} e_r + v_{theta,k} e_theta) e^{ik theta}
/// + (sigma / r) e_theta, truncated at |k| <= kmax.
class ModeField {
 public:
  ModeField() = default;
  ModeField(GridPtr grid, int kmax, double lambda);

  const GridPtr& grid() const { return grid_; }
  int kmax() const { return kmax_; }
  double lambda() const { return lambda_; }

  ModeProfiles& mode(int k) { return modes_[index(k)]; }
  const ModeProfiles& mode(int k) const { return modes_[index(k)]; }

  double sigma = 0.0;
  DerivativeData derivatives = DerivativeData::analytic;

 private:
  std::size_t index(int k) const;
  GridPtr grid_;
  int kmax_ = 0;
  double lambda_ = 0.0;
  std::vector<ModeProfiles> modes_;
};

/// a - b and a + b, profile by profile (including sigma).
ModeField difference(const ModeField& a, const ModeField& b);
ModeField sum(const ModeField& a, const ModeField& b);

struct ModeForcing {
  RadialProfile fr, ft;
};

/// External (or effective) force in Fourier modes, |k| <= kmax.
class Forcing {
 public:
  Forcing() = default;
  Forcing(GridPtr grid, int kmax);

  const GridPtr& grid() const { return grid_; }
  int kmax() const { return kmax_; }
  ModeForcing& mode(int k) { return modes_[index(k)]; }
  const ModeForcing& mode(int k) const { return modes_[index(k)]; }

 private:
  std::size_t index(int k) const;
  GridPtr grid_;
  int kmax_ = 0;
  std::vector<ModeForcing> modes_;
};

/// sum over k and both components of ||f_{j,k}||_{L^inf_lambda}.
double e_norm(const Forcing& f, double lambda);

}  // namespace extflow
