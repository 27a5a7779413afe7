#include "kinscat/gevrey.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "kinscat/errors.hpp"
#include "kinscat/parallel.hpp"

namespace kinscat {

void GevreyWeight::validate(int dimension) const {
  if (!(gamma > 1.0 / 3.0 && gamma < 1.0)) {
    throw ConfigError("gevrey.gamma = " + std::to_string(gamma) + " violates gamma in (1/3, 1)");
  }
  if (!(sigma > 10.0 + dimension)) {
    throw ConfigError("gevrey.sigma = " + std::to_string(sigma) + " violates sigma > 10 + d");
  }
  if (!(b > 10.0)) throw ConfigError("gevrey.b = " + std::to_string(b) + " violates b > 10");
  if (!(2 * M > dimension)) throw ConfigError("gevrey.M = " + std::to_string(M) + " violates M > d/2");
  if (M > 4) throw ConfigError("gevrey.M > 4 is not supported by the eta-difference stencils");
  if (!(c_decay > 0.0)) throw ConfigError("gevrey.C must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("gevrey.delta must lie in (0, 1)");
  if (!(lambda_inf - c_decay > 0.0)) {
    throw ConfigError("gevrey: lambda(0) = lambda_inf - C must be positive");
  }
}

GevreyWeight GevreyWeight::with_lambda_inf(double value) const {
  GevreyWeight w = *this;
  w.lambda_inf = value;
  return w;
}

double lambda_of_t(const GevreyWeight& w, double t) {
  return w.lambda_inf - w.c_decay * std::pow(bracket(t), -w.delta);
}

double log_weight_A(const GevreyWeight& w, double t, double k, double eta) {
  const double br = bracket(k, eta);
  return lambda_of_t(w, t) * std::pow(br, w.gamma) + w.sigma * std::log(br);
}

double log_weight_B(const GevreyWeight& w, double t, double k, double eta) {
  return log_weight_A(w, t, k, eta) + std::log(bracket(k, eta));
}

namespace {

/// Running log(sum exp(x_i)) with a max shift.
class LogSum {
 public:
  void add(double x) {
    if (x == -std::numeric_limits<double>::infinity()) return;
    if (x <= peak_) {
      sum_ += std::exp(x - peak_);
    } else {
      sum_ = sum_ * std::exp(peak_ - x) + 1.0;
      peak_ = x;
    }
  }
  [[nodiscard]] double value() const {
    return sum_ > 0.0 ? peak_ + std::log(sum_) : -std::numeric_limits<double>::infinity();
  }

 private:
  double peak_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

double exp_checked(double log_value, const char* what) {
  if (std::isnan(log_value) || log_value > 700.0) {
    throw OverflowError(std::string(what) +
                        ": weighted norm overflows double precision; reduce lambda_inf or sigma");
  }
  return std::exp(log_value);
}

// Per-node cached <k,eta>^gamma and log <k,eta>.
struct BracketTable {
  std::vector<double> pow_gamma;
  std::vector<double> log_br;
};

BracketTable make_table(const Lattice& lat, const EtaGrid& grid, double gamma) {
  BracketTable tb;
  const auto n = static_cast<std::size_t>(lat.size()) * static_cast<std::size_t>(grid.size());
  tb.pow_gamma.resize(n);
  tb.log_br.resize(n);
  std::size_t idx = 0;
  for (int k = -lat.kmax; k <= lat.kmax; ++k) {
    for (int i = 0; i < grid.size(); ++i, ++idx) {
      const double br = bracket(static_cast<double>(k), grid.eta(i));
      tb.pow_gamma[idx] = std::pow(br, gamma);
      tb.log_br[idx] = std::log(br);
    }
  }
  return tb;
}

double log_state_norm_sq(const SpectralState& s, const GevreyWeight& w, const BracketTable& tb) {
  const auto& grid = s.eta_grid();
  const double lam = lambda_of_t(w, s.t());
  const double log_deta = std::log(grid.deta);
  LogSum acc;
  std::size_t idx = 0;
  for (int k = -s.lattice().kmax; k <= s.lattice().kmax; ++k) {
    const auto row = s.row(k);
    for (int i = 0; i < grid.size(); ++i, ++idx) {
      const double log_b2 = 2.0 * (lam * tb.pow_gamma[idx] + (w.sigma + 1.0) * tb.log_br[idx]);
      for (int j = 0; j <= w.M; ++j) {
        const Complex d = j == 0 ? row[static_cast<std::size_t>(i)] : eta_derivative(row, i, j, grid.deta);
        const double mag = std::abs(d);
        if (!std::isfinite(mag)) throw OverflowError("norm_N1: non-finite state value");
        if (mag > 0.0) acc.add(log_deta + log_b2 + 2.0 * std::log(mag));
      }
    }
  }
  return acc.value();
}

}  // namespace

Complex eta_derivative(std::span<const Complex> row, int i, int order, double deta) {
  const int n = static_cast<int>(row.size());
  auto f = [&](int off) {
    const int m = i + off;
    return (m >= 0 && m < n) ? row[static_cast<std::size_t>(m)] : Complex{};
  };
  switch (order) {
    case 0:
      return f(0);
    case 1:
      return (f(-2) - 8.0 * f(-1) + 8.0 * f(1) - f(2)) / (12.0 * deta);
    case 2:
      return (-f(-2) + 16.0 * f(-1) - 30.0 * f(0) + 16.0 * f(1) - f(2)) / (12.0 * deta * deta);
    case 3:
      return (f(-3) - 8.0 * f(-2) + 13.0 * f(-1) - 13.0 * f(1) + 8.0 * f(2) - f(3)) /
             (8.0 * deta * deta * deta);
    case 4:
      return (-f(-3) + 12.0 * f(-2) - 39.0 * f(-1) + 56.0 * f(0) - 39.0 * f(1) + 12.0 * f(2) - f(3)) /
             (6.0 * deta * deta * deta * deta);
    default:
      throw ConfigError("eta_derivative: order must lie in [0, 4]");
  }
}

double state_norm(const SpectralState& state, const GevreyWeight& w) {
  const BracketTable tb = make_table(state.lattice(), state.eta_grid(), w.gamma);
  return exp_checked(0.5 * log_state_norm_sq(state, w, tb), "norm_N1");
}

double norm_N1(const std::vector<SpectralState>& history, const GevreyWeight& w,
               std::vector<std::pair<double, double>>* per_time) {
  if (history.empty()) return 0.0;
  const BracketTable tb = make_table(history.front().lattice(), history.front().eta_grid(), w.gamma);
  std::vector<double> logs(history.size());
  parallel_for(history.size(), [&](std::size_t j) {
    if (!history[j].same_shape(history.front())) throw ConfigError("norm_N1: states on different grids");
    logs[j] = log_state_norm_sq(history[j], w, tb);
  });
  double best = 0.0;
  if (per_time) per_time->clear();
  for (std::size_t j = 0; j < history.size(); ++j) {
    const double v = std::isinf(logs[j]) ? 0.0 : exp_checked(0.5 * logs[j], "norm_N1");
    if (per_time) per_time->emplace_back(history[j].t(), v);
    best = std::max(best, v);
  }
  return best;
}

double norm_N2(const DensityHistory& density, const GevreyWeight& w) {
  const auto& grid = density.grid();
  const int kmax = density.lattice().kmax;
  LogSum acc;
  const double log_dt = std::log(grid.dt);
  for (int j = 0; j < grid.points(); ++j) {
    const double t = grid.t(j);
    const double log_time = w.b * std::log(bracket(t));
    for (int k = -kmax; k <= kmax; ++k) {
      const double mag = std::abs(density.at(j, k));
      if (!std::isfinite(mag)) throw OverflowError("norm_N2: non-finite density value");
      if (mag == 0.0) continue;
      const double log_a = log_weight_A(w, t, k, k * t);
      acc.add(log_dt + 2.0 * (log_time + log_a + std::log(mag)));
    }
  }
  const double v = acc.value();
  return std::isinf(v) ? 0.0 : exp_checked(0.5 * v, "norm_N2");
}

WeightedNormReport weighted_norms(const std::vector<SpectralState>& history,
                                  const DensityHistory& density, const GevreyWeight& w) {
  WeightedNormReport r;
  r.n1 = norm_N1(history, w, &r.per_time);
  r.n2 = norm_N2(density, w);
  r.n_total = r.n1 + r.n2;
  return r;
}

GevreyInequalityReport gevrey_inequality_suite(double gamma, int samples, std::uint64_t seed) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError("gevrey_inequality_suite: gamma must lie in (0, 1); gamma = 1 gives no c < 1");
  }
  if (samples < 1) throw ConfigError("gevrey_inequality_suite: samples must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  auto draw = [&] { return std::pow(1e6 + 1.0, unit(rng)) - 1.0; };
  auto p = [gamma](double x) { return std::pow(bracket(x), gamma); };
  constexpr double kClose = 2.0;
  constexpr double kRoundoff = 1e-12;

  GevreyInequalityReport r;
  r.gamma = gamma;
  r.samples = samples;
  r.margin_subadditive = r.margin_difference = r.margin_close = std::numeric_limits<double>::infinity();
  r.constant_lower = std::numeric_limits<double>::infinity();

  for (int s = 0; s < samples; ++s) {
    const double x = draw();
    const double y = draw();

    {  // (i) and the lower companion
      const double lhs = p(x + y);
      const double rhs = p(x) + p(y);
      const double m = (rhs - lhs) / rhs;
      r.margin_subadditive = std::min(r.margin_subadditive, m);
      if (m < -kRoundoff) ++r.violations_subadditive;
      r.constant_lower = std::min(r.constant_lower, lhs / rhs);
    }
    {  // (ii)
      const double lhs = std::abs(p(x) - p(y));
      const double scale = bracket(x - y) / (std::pow(bracket(x), 1.0 - gamma) + std::pow(bracket(y), 1.0 - gamma));
      r.constant_difference = std::max(r.constant_difference, lhs / scale);
      const double rhs = 2.0 * scale;
      const double m = (rhs - lhs) / rhs;
      r.margin_difference = std::min(r.margin_difference, m);
      if (m < -kRoundoff) ++r.violations_difference;
    }
    {  // (iii) y2 within x / K of x
      const double y2 = x * (1.0 + sym(rng) / kClose);
      const double lhs = std::abs(p(x) - p(y2));
      const double rhs = gamma / std::pow(kClose - 1.0, 1.0 - gamma) * std::pow(bracket(x - y2), gamma);
      const double m = (rhs - lhs) / rhs;
      r.margin_close = std::min(r.margin_close, m);
      if (m < -kRoundoff) ++r.violations_close;
    }
    {  // (iv) comparable pair: y3 = x * 2^u, u in [-1, 1]
      const double y3 = x * std::pow(2.0, sym(rng));
      const double c = p(x + y3) / (p(x) + p(y3));
      r.constant_comparable = std::max(r.constant_comparable, c);
    }
  }
  r.margin_comparable = 1.0 - r.constant_comparable;
  return r;
}

}  // namespace kinscat
