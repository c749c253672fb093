#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

namespace extflow {

using cplx = std::complex<double>;

class ModeField;
struct FlowParameters;

namespace spectral {

/// Fourier coefficients h_k for |k| <= kmax.
class ModeSequence {
 public:
  ModeSequence() = default;
  explicit ModeSequence(int kmax);

  int kmax() const { return kmax_; }
  cplx operator[](int k) const { return data_[index(k)]; }
  cplx& operator[](int k) { return data_[index(k)]; }
  std::span<const cplx> data() const { return data_; }

  double l1_norm() const;
  /// max_k |h_{-k} - conj(h_k)|
  double conjugate_asymmetry() const;

 private:
  std::size_t index(int k) const;
  int kmax_ = 0;
  std::vector<cplx> data_;
};

/// Boundary perturbation g_r e_r + g_theta e_theta in Fourier form.
struct BoundaryData {
  ModeSequence g_r;
  ModeSequence g_theta;

  explicit BoundaryData(int kmax = 0) : g_r(kmax), g_theta(kmax) {}
};

struct Analysis {
  ModeSequence modes;
  /// Sum of |h_k| over resolvable modes kmax < |k| <= N/2 that were dropped.
  double truncation_loss = 0.0;
};

/// Discrete Fourier coefficients of N real samples at theta_j = 2 pi j / N.
/// Requires N >= 2 kmax + 1.
Analysis analyze(std::span<const double> samples, int kmax);

/// Moves the mean of g_r into nu: returns (g with g_r[0] = 0, nu + g_r[0]).
std::pair<BoundaryData, double> normalize_boundary(const BoundaryData& g, double nu);

/// sum over k and both components of (1 + k^2) |g_{j,k}|.
double v_norm(const BoundaryData& g);

struct Convolution {
  ModeSequence result;
  /// l1 mass of the product in kmax < |n| <= 2 kmax, discarded by truncation.
  double discarded = 0.0;
};

/// (a*b)_n = sum_k a_k b_{n-k}, truncated back to |n| <= kmax.
Convolution convolve(const ModeSequence& a, const ModeSequence& b);

/// Physical velocity (u_r, u_theta) at (r, theta): core nu/r, mu/r, the
/// critical swirl sigma/r and all perturbation modes.
std::pair<double, double> synthesize(const ModeField& field, const FlowParameters& p,
                                     double r, double theta);

}  // namespace spectral
}  // namespace extflow
