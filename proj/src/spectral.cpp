#include "extflow/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "extflow/errors.hpp"
#include "extflow/mode_field.hpp"
#include "extflow/params.hpp"

namespace extflow::spectral {

ModeSequence::ModeSequence(int kmax) : kmax_(kmax) {
  if (kmax < 0) throw DomainError("ModeSequence: negative kmax");
  data_.assign(static_cast<std::size_t>(2 * kmax + 1), cplx(0.0));
}

std::size_t ModeSequence::index(int k) const {
  if (std::abs(k) > kmax_) {
    throw DomainError("ModeSequence: index " + std::to_string(k) + " outside |k| <= " +
                      std::to_string(kmax_));
  }
  return static_cast<std::size_t>(k + kmax_);
}

double ModeSequence::l1_norm() const {
  double s = 0.0;
  for (const cplx& c : data_) s += std::abs(c);
  return s;
}

double ModeSequence::conjugate_asymmetry() const {
  double worst = 0.0;
  for (int k = 0; k <= kmax_; ++k) {
    worst = std::max(worst, std::abs((*this)[-k] - std::conj((*this)[k])));
  }
  return worst;
}

Analysis analyze(std::span<const double> samples, int kmax) {
  const auto n = static_cast<long>(samples.size());
  if (kmax < 0 || n < 2L * kmax + 1) {
    throw DomainError("analyze: " + std::to_string(n) + " samples cannot resolve kmax = " +
                      std::to_string(kmax));
  }
  auto coefficient = [&](long k) {
    cplx acc = 0.0;
    for (long j = 0; j < n; ++j) {
      // reduce k*j mod n first so the phase stays exact for large indices
      const double phase = -2.0 * std::numbers::pi * static_cast<double>((k * j) % n) /
                           static_cast<double>(n);
      acc += samples[static_cast<std::size_t>(j)] * std::polar(1.0, phase);
    }
    return acc / static_cast<double>(n);
  };
  Analysis out{ModeSequence(kmax), 0.0};
  for (int k = -kmax; k <= kmax; ++k) out.modes[k] = coefficient((k + n) % n);
  for (long k = kmax + 1; 2 * k <= n; ++k) {
    const double a = std::abs(coefficient(k));
    // the Nyquist coefficient is shared by +-n/2
    out.truncation_loss += (2 * k == n) ? a : 2.0 * a;
  }
  return out;
}

std::pair<BoundaryData, double> normalize_boundary(const BoundaryData& g, double nu) {
  BoundaryData out = g;
  const double mean = g.g_r[0].real();
  out.g_r[0] = 0.0;
  return {out, nu + mean};
}

double v_norm(const BoundaryData& g) {
  double s = 0.0;
  for (int k = -g.g_r.kmax(); k <= g.g_r.kmax(); ++k) {
    s += (1.0 + double(k) * k) * std::abs(g.g_r[k]);
  }
  for (int k = -g.g_theta.kmax(); k <= g.g_theta.kmax(); ++k) {
    s += (1.0 + double(k) * k) * std::abs(g.g_theta[k]);
  }
  return s;
}

Convolution convolve(const ModeSequence& a, const ModeSequence& b) {
  if (a.kmax() != b.kmax()) throw DomainError("convolve: kmax mismatch");
  const int K = a.kmax();
  Convolution out{ModeSequence(K), 0.0};
  for (int n = -2 * K; n <= 2 * K; ++n) {
    cplx acc = 0.0;
    for (int k = std::max(-K, n - K); k <= std::min(K, n + K); ++k) acc += a[k] * b[n - k];
    if (std::abs(n) <= K) {
      out.result[n] = acc;
    } else {
      out.discarded += std::abs(acc);
    }
  }
  return out;
}

std::pair<double, double> synthesize(const ModeField& field, const FlowParameters& p,
                                     double r, double theta) {
  if (!(r >= 1.0)) throw DomainError("synthesize: r < 1");
  double ur = p.nu / r;
  double ut = (p.mu + field.sigma) / r;
  for (int k = -field.kmax(); k <= field.kmax(); ++k) {
    const cplx e = std::polar(1.0, k * theta);
    const auto& m = field.mode(k);
    ur += (m.vr.at(r) * e).real();
    ut += (m.vt.at(r) * e).real();
  }
  return {ur, ut};
}

}  // namespace extflow::spectral
