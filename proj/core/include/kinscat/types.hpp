#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace kinscat {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

inline constexpr double kPi = 3.14159265358979323846;

// Japanese brackets <x> = sqrt(1 + |x|^2).
inline double bracket(double x) { return std::sqrt(1.0 + x * x); }
inline double bracket(double k, double eta) { return std::sqrt(1.0 + k * k + eta * eta); }

/// Symmetric integer mode lattice {-kmax, ..., kmax} on the one-dimensional torus.
struct Lattice {
  int kmax = 0;

  [[nodiscard]] int size() const { return 2 * kmax + 1; }
  [[nodiscard]] std::size_t index(int k) const { return static_cast<std::size_t>(k + kmax); }
  [[nodiscard]] int mode(std::size_t i) const { return static_cast<int>(i) - kmax; }
  [[nodiscard]] bool contains(int k) const { return k >= -kmax && k <= kmax; }

  friend bool operator==(const Lattice&, const Lattice&) = default;
};

/// Fourier coefficients c_k, |k| <= kmax, with u(x) = sum_k c_k e^{ikx}.
class ModeField {
 public:
  ModeField() = default;
  explicit ModeField(Lattice lattice) : lattice_(lattice), values_(lattice.size()) {}
  ModeField(Lattice lattice, CVector values) : lattice_(lattice), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != lattice_.size()) {
      throw std::invalid_argument("ModeField: value count does not match lattice");
    }
  }

  [[nodiscard]] const Lattice& lattice() const { return lattice_; }
  [[nodiscard]] int kmax() const { return lattice_.kmax; }

  Complex& operator[](int k) { return values_[lattice_.index(k)]; }
  const Complex& operator[](int k) const { return values_[lattice_.index(k)]; }

  /// Value at k, zero outside the lattice.
  [[nodiscard]] Complex at_or_zero(int k) const {
    return lattice_.contains(k) ? values_[lattice_.index(k)] : Complex{};
  }

  [[nodiscard]] std::span<Complex> values() { return values_; }
  [[nodiscard]] std::span<const Complex> values() const { return values_; }

  ModeField& operator+=(const ModeField& o);
  ModeField& operator-=(const ModeField& o);
  ModeField& operator*=(double s);

  /// Largest deviation from c_{-k} = conj(c_k).
  [[nodiscard]] double reality_defect() const;
  void symmetrize();

 private:
  Lattice lattice_{};
  CVector values_;
};

ModeField operator+(ModeField a, const ModeField& b);
ModeField operator-(ModeField a, const ModeField& b);
ModeField operator*(double s, ModeField a);

/// Uniform time grid t_j = j * dt, j = 0..steps.
struct TimeGrid {
  double dt = 0.05;
  int steps = 0;

  [[nodiscard]] double t(int j) const { return dt * j; }
  [[nodiscard]] double horizon() const { return dt * steps; }
  [[nodiscard]] int points() const { return steps + 1; }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

}  // namespace kinscat
