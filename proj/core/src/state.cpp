#include "kinscat/state.hpp"

#include <algorithm>
#include <cmath>

#include "kinscat/history.hpp"

namespace kinscat {

EtaGrid EtaGrid::covering(double hmax, double deta) {
  if (!(deta > 0.0) || !(hmax > 0.0)) throw std::invalid_argument("EtaGrid: hmax and deta must be positive");
  return {deta, static_cast<int>(std::ceil(hmax / deta - 1e-9))};
}

SpectralState::SpectralState(Lattice lattice, EtaGrid eta_grid, double t)
    : t_(t),
      lattice_(lattice),
      eta_(eta_grid),
      values_(static_cast<std::size_t>(lattice.size()) * static_cast<std::size_t>(eta_grid.size())) {}

double SpectralState::reality_defect() const {
  const int n = eta_.size();
  double worst = 0.0;
  for (int k = -lattice_.kmax; k <= lattice_.kmax; ++k) {
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs((*this)(-k, n - 1 - i) - std::conj((*this)(k, i))));
    }
  }
  return worst;
}

void SpectralState::symmetrize() {
  const int n = eta_.size();
  for (int k = 0; k <= lattice_.kmax; ++k) {
    for (int i = 0; i < n; ++i) {
      if (k == 0 && i > eta_.center()) break;
      const Complex avg = 0.5 * ((*this)(k, i) + std::conj((*this)(-k, n - 1 - i)));
      (*this)(k, i) = avg;
      (*this)(-k, n - 1 - i) = std::conj(avg);
    }
  }
}

double SpectralState::sup_norm() const {
  double worst = 0.0;
  for (const auto& v : values_) worst = std::max(worst, std::abs(v));
  return worst;
}

double SpectralState::boundary_magnitude() const {
  double worst = 0.0;
  for (int k = -lattice_.kmax; k <= lattice_.kmax; ++k) {
    worst = std::max({worst, std::abs((*this)(k, 0)), std::abs((*this)(k, eta_.size() - 1))});
  }
  return worst;
}

SpectralState& SpectralState::operator+=(const SpectralState& o) {
  if (!same_shape(o)) throw std::invalid_argument("SpectralState: shape mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

SpectralState& SpectralState::operator-=(const SpectralState& o) {
  if (!same_shape(o)) throw std::invalid_argument("SpectralState: shape mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

SpectralState& SpectralState::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

void SpectralState::axpy(double s, const SpectralState& o) {
  if (!same_shape(o)) throw std::invalid_argument("SpectralState: shape mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * o.values_[i];
}

SpectralState operator-(SpectralState a, const SpectralState& b) { return a -= b; }

ModeHistory::ModeHistory(Lattice lattice, TimeGrid grid)
    : lattice_(lattice), grid_(grid), slices_(static_cast<std::size_t>(grid.points()), ModeField(lattice)) {}

CVector ModeHistory::mode_series(int k) const {
  CVector out(slices_.size());
  for (std::size_t j = 0; j < slices_.size(); ++j) out[j] = slices_[j][k];
  return out;
}

void ModeHistory::set_mode_series(int k, const CVector& values) {
  if (values.size() != slices_.size()) throw std::invalid_argument("ModeHistory: series length mismatch");
  for (std::size_t j = 0; j < slices_.size(); ++j) slices_[j][k] = values[j];
}

double ModeHistory::reality_defect() const {
  double worst = 0.0;
  for (const auto& s : slices_) worst = std::max(worst, s.reality_defect());
  return worst;
}

void ModeHistory::symmetrize() {
  for (auto& s : slices_) s.symmetrize();
}

double ModeHistory::l2_norm() const {
  double acc = 0.0;
  for (const auto& s : slices_) {
    for (const auto& v : s.values()) acc += std::norm(v);
  }
  return std::sqrt(acc);
}

ModeHistory& ModeHistory::operator+=(const ModeHistory& o) {
  if (!compatible(o)) throw std::invalid_argument("ModeHistory: grid mismatch");
  for (std::size_t j = 0; j < slices_.size(); ++j) slices_[j] += o.slices_[j];
  return *this;
}

ModeHistory& ModeHistory::operator-=(const ModeHistory& o) {
  if (!compatible(o)) throw std::invalid_argument("ModeHistory: grid mismatch");
  for (std::size_t j = 0; j < slices_.size(); ++j) slices_[j] -= o.slices_[j];
  return *this;
}

ModeHistory& ModeHistory::operator*=(double s) {
  for (auto& sl : slices_) sl *= s;
  return *this;
}

double relative_l2_distance(const ModeHistory& a, const ModeHistory& b) {
  ModeHistory d = a;
  d -= b;
  const double nb = b.l2_norm();
  return nb > 0.0 ? d.l2_norm() / nb : d.l2_norm();
}

}  // namespace kinscat
