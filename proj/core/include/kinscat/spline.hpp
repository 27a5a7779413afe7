#pragma once

#include <atomic>
#include <cstddef>
#include <memory>

#include "kinscat/state.hpp"

namespace kinscat {

/// Not-a-knot cubic splines through every eta row of a SpectralState.
class EtaSpline {
 public:
  EtaSpline() = default;
  explicit EtaSpline(const SpectralState& state);

  [[nodiscard]] const SpectralState& state() const { return state_; }

  /// g(k, eta); zero outside [-hmax, hmax], counted as a truncation.
  [[nodiscard]] Complex eval(int k, double eta) const;

  /// out[i] = g(k, eta_i + shift) for every grid node, zero off the grid.
  void eval_shifted(int k, double shift, Complex* out) const;

  [[nodiscard]] std::size_t truncations() const { return truncated_ ? truncated_->load() : 0; }

 private:
  [[nodiscard]] Complex segment(int k, int i, double f) const;

  SpectralState state_;
  CVector second_;  // second derivatives, same layout as the state
  std::shared_ptr<std::atomic<std::size_t>> truncated_;
};

}  // namespace kinscat
