#pragma once

#include <vector>

#include "kinscat/types.hpp"

namespace kinscat {

/// Mode coefficients on a uniform time grid: slice j holds the field at t_j.
class ModeHistory {
 public:
  ModeHistory() = default;
  ModeHistory(Lattice lattice, TimeGrid grid);

  [[nodiscard]] const Lattice& lattice() const { return lattice_; }
  [[nodiscard]] const TimeGrid& grid() const { return grid_; }

  ModeField& slice(int j) { return slices_[static_cast<std::size_t>(j)]; }
  [[nodiscard]] const ModeField& slice(int j) const { return slices_[static_cast<std::size_t>(j)]; }

  Complex& at(int j, int k) { return slice(j)[k]; }
  [[nodiscard]] Complex at(int j, int k) const { return slice(j)[k]; }

  /// Time series of one mode.
  [[nodiscard]] CVector mode_series(int k) const;
  void set_mode_series(int k, const CVector& values);

  [[nodiscard]] double reality_defect() const;
  void symmetrize();
  [[nodiscard]] double l2_norm() const;
  [[nodiscard]] bool compatible(const ModeHistory& o) const {
    return lattice_ == o.lattice_ && grid_ == o.grid_;
  }

  ModeHistory& operator+=(const ModeHistory& o);
  ModeHistory& operator-=(const ModeHistory& o);
  ModeHistory& operator*=(double s);

 private:
  Lattice lattice_{};
  TimeGrid grid_{};
  std::vector<ModeField> slices_;
};

using DensityHistory = ModeHistory;
using SourceHistory = ModeHistory;

/// ||a - b||_2 / ||b||_2 over all slices and modes (absolute when b = 0).
double relative_l2_distance(const ModeHistory& a, const ModeHistory& b);

}  // namespace kinscat
