#include "extflow/mode_field.hpp"

#include <cstdlib>
#include <string>

#include "extflow/errors.hpp"

namespace extflow {

namespace {

ModeProfiles zero_mode(const GridPtr& grid) {
  const auto z = RadialProfile::zeros(grid);
  return ModeProfiles{z, z, z, z, z, z, z, z};
}

void check_index(int k, int kmax) {
  if (std::abs(k) > kmax) {
    throw DomainError("mode index " + std::to_string(k) + " outside |k| <= " +
                      std::to_string(kmax));
  }
}

}  // namespace

ModeField::ModeField(GridPtr grid, int kmax, double lambda)
    : grid_(std::move(grid)), kmax_(kmax), lambda_(lambda) {
  if (kmax < 0) throw DomainError("ModeField: negative kmax");
  modes_.assign(static_cast<std::size_t>(2 * kmax + 1), zero_mode(grid_));
}

std::size_t ModeField::index(int k) const {
  check_index(k, kmax_);
  return static_cast<std::size_t>(k + kmax_);
}

namespace {

template <class Op>
ModeField combine(const ModeField& a, const ModeField& b, Op op) {
  if (a.kmax() != b.kmax()) throw DomainError("mode fields differ in kmax");
  ModeField out = a;
  for (int k = -a.kmax(); k <= a.kmax(); ++k) {
    auto& o = out.mode(k);
    const auto& m = b.mode(k);
    op(o.vr, m.vr);
    op(o.vt, m.vt);
    op(o.dvr, m.dvr);
    op(o.dvt, m.dvt);
    op(o.d2vr, m.d2vr);
    op(o.d2vt, m.d2vt);
    op(o.w, m.w);
    op(o.dw, m.dw);
  }
  if (a.derivatives != b.derivatives) out.derivatives = DerivativeData::approximate;
  return out;
}

}  // namespace

ModeField difference(const ModeField& a, const ModeField& b) {
  ModeField out = combine(a, b, [](RadialProfile& x, const RadialProfile& y) { x -= y; });
  out.sigma = a.sigma - b.sigma;
  return out;
}

ModeField sum(const ModeField& a, const ModeField& b) {
  ModeField out = combine(a, b, [](RadialProfile& x, const RadialProfile& y) { x += y; });
  out.sigma = a.sigma + b.sigma;
  return out;
}

Forcing::Forcing(GridPtr grid, int kmax) : grid_(std::move(grid)), kmax_(kmax) {
  if (kmax < 0) throw DomainError("Forcing: negative kmax");
  const auto z = RadialProfile::zeros(grid_);
  modes_.assign(static_cast<std::size_t>(2 * kmax + 1), ModeForcing{z, z});
}

std::size_t Forcing::index(int k) const {
  check_index(k, kmax_);
  return static_cast<std::size_t>(k + kmax_);
}

double e_norm(const Forcing& f, double lambda) {
  double total = 0.0;
  for (int k = -f.kmax(); k <= f.kmax(); ++k) {
    total += radial::weighted_sup_norm(f.mode(k).fr, lambda);
    total += radial::weighted_sup_norm(f.mode(k).ft, lambda);
  }
  return total;
}

}  // namespace extflow
