#include "kinscat/spline.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "kinscat/errors.hpp"

namespace kinscat {

EtaSpline::EtaSpline(const SpectralState& state)
    : state_(state),
      second_(state.values().size()),
      truncated_(std::make_shared<std::atomic<std::size_t>>(0)) {
  const int n = state.eta_grid().size();
  if (n < 7) throw ConfigError("EtaSpline: need at least 7 eta nodes");
  const double h = state.eta_grid().deta;
  const double scale = 6.0 / (h * h);
  // Interior unknowns M_2..M_{n-3} solve M_{i-1} + 4 M_i + M_{i+1} = r_i with
  // M_1 = r_1 / 6 and M_{n-2} = r_{n-2} / 6 from the not-a-knot conditions.
  const int lo = 2;
  const int hi = n - 3;
  const int len = hi - lo + 1;
  std::vector<double> cprime(static_cast<std::size_t>(len));
  {
    double denom = 4.0;
    cprime[0] = 1.0 / denom;
    for (int i = 1; i < len; ++i) {
      denom = 4.0 - cprime[static_cast<std::size_t>(i - 1)];
      cprime[static_cast<std::size_t>(i)] = 1.0 / denom;
    }
  }
  CVector d(static_cast<std::size_t>(len));
  for (int k = -state.lattice().kmax; k <= state.lattice().kmax; ++k) {
    const auto y = state.row(k);
    Complex* M = second_.data() + (y.data() - state.values().data());
    auto r = [&](int i) {
      return scale * (y[static_cast<std::size_t>(i - 1)] - 2.0 * y[static_cast<std::size_t>(i)] +
                      y[static_cast<std::size_t>(i + 1)]);
    };
    M[1] = r(1) / 6.0;
    M[n - 2] = r(n - 2) / 6.0;
    // Forward sweep (Thomas algorithm with constant 1, 4, 1 stencil).
    for (int i = 0; i < len; ++i) {
      const int row = lo + i;
      Complex rhs = r(row);
      if (row == lo) rhs -= M[1];
      if (row == hi) rhs -= M[n - 2];
      if (i == 0) {
        d[0] = rhs * cprime[0];
      } else {
        d[static_cast<std::size_t>(i)] = (rhs - d[static_cast<std::size_t>(i - 1)]) * cprime[static_cast<std::size_t>(i)];
      }
    }
    M[hi] = d[static_cast<std::size_t>(len - 1)];
    for (int i = len - 2; i >= 0; --i) {
      M[lo + i] = d[static_cast<std::size_t>(i)] - cprime[static_cast<std::size_t>(i)] * M[lo + i + 1];
    }
    M[0] = 2.0 * M[1] - M[2];
    M[n - 1] = 2.0 * M[n - 2] - M[n - 3];
  }
}

Complex EtaSpline::segment(int k, int i, double f) const {
  const auto y = state_.row(k);
  const Complex* M = second_.data() + (y.data() - state_.values().data());
  const double h = state_.eta_grid().deta;
  const double a = 1.0 - f;
  const double b = f;
  return a * y[static_cast<std::size_t>(i)] + b * y[static_cast<std::size_t>(i + 1)] +
         ((a * a * a - a) * M[i] + (b * b * b - b) * M[i + 1]) * (h * h / 6.0);
}

Complex EtaSpline::eval(int k, double eta) const {
  const auto& g = state_.eta_grid();
  if (!state_.lattice().contains(k)) return {};
  const double x = (eta + g.hmax()) / g.deta;
  const int n = g.size();
  if (!(x >= -1e-9 && x <= n - 1 + 1e-9)) {
    if (truncated_) truncated_->fetch_add(1, std::memory_order_relaxed);
    return {};
  }
  int i = static_cast<int>(std::floor(x));
  i = std::clamp(i, 0, n - 2);
  return segment(k, i, x - i);
}

void EtaSpline::eval_shifted(int k, double shift, Complex* out) const {
  const auto& g = state_.eta_grid();
  const int n = g.size();
  const double s = shift / g.deta;
  const int base = static_cast<int>(std::floor(s));
  const double f = s - base;
  if (!state_.lattice().contains(k)) {
    for (int i = 0; i < n; ++i) out[i] = {};
    return;
  }
  const auto y = state_.row(k);
  for (int i = 0; i < n; ++i) {
    const int j = i + base;
    if (j >= 0 && j <= n - 2) {
      out[i] = segment(k, j, f);
    } else if (j == n - 1 && f == 0.0) {
      out[i] = y[static_cast<std::size_t>(j)];
    } else {
      out[i] = {};
    }
  }
}

}  // namespace kinscat
