#pragma once

#include <span>
#include <vector>

#include "kinscat/types.hpp"

namespace kinscat {

/// Uniform symmetric grid eta_i = (i - half) * deta, i = 0..2*half.
struct EtaGrid {
  double deta = 0.125;
  int half = 560;

  [[nodiscard]] int size() const { return 2 * half + 1; }
  [[nodiscard]] double eta(int i) const { return (i - half) * deta; }
  [[nodiscard]] double hmax() const { return half * deta; }
  [[nodiscard]] int center() const { return half; }

  /// Grid reaching at least hmax.
  static EtaGrid covering(double hmax, double deta);

  friend bool operator==(const EtaGrid&, const EtaGrid&) = default;
};

/// g_hat(k, eta_i) on a mode lattice times a uniform eta grid, with its time stamp.
class SpectralState {
 public:
  SpectralState() = default;
  SpectralState(Lattice lattice, EtaGrid eta_grid, double t = 0.0);

  [[nodiscard]] double t() const { return t_; }
  void set_time(double t) { t_ = t; }
  [[nodiscard]] const Lattice& lattice() const { return lattice_; }
  [[nodiscard]] const EtaGrid& eta_grid() const { return eta_; }

  Complex& operator()(int k, int i) { return values_[offset(k) + static_cast<std::size_t>(i)]; }
  [[nodiscard]] const Complex& operator()(int k, int i) const {
    return values_[offset(k) + static_cast<std::size_t>(i)];
  }

  std::span<Complex> row(int k) { return {values_.data() + offset(k), static_cast<std::size_t>(eta_.size())}; }
  [[nodiscard]] std::span<const Complex> row(int k) const {
    return {values_.data() + offset(k), static_cast<std::size_t>(eta_.size())};
  }
  std::span<Complex> values() { return values_; }
  [[nodiscard]] std::span<const Complex> values() const { return values_; }

  /// g_hat(0, 0).
  [[nodiscard]] Complex mass() const { return (*this)(0, eta_.center()); }
  /// max |g(-k,-eta) - conj g(k,eta)|.
  [[nodiscard]] double reality_defect() const;
  void symmetrize();
  [[nodiscard]] double sup_norm() const;
  /// Largest |g| on the two outermost eta nodes.
  [[nodiscard]] double boundary_magnitude() const;
  [[nodiscard]] bool same_shape(const SpectralState& o) const {
    return lattice_ == o.lattice_ && eta_ == o.eta_;
  }

  SpectralState& operator+=(const SpectralState& o);
  SpectralState& operator-=(const SpectralState& o);
  SpectralState& operator*=(double s);
  /// this += s * o
  void axpy(double s, const SpectralState& o);

 private:
  [[nodiscard]] std::size_t offset(int k) const {
    return lattice_.index(k) * static_cast<std::size_t>(eta_.size());
  }

  double t_ = 0.0;
  Lattice lattice_{};
  EtaGrid eta_{};
  CVector values_;
};

SpectralState operator-(SpectralState a, const SpectralState& b);

}  // namespace kinscat
