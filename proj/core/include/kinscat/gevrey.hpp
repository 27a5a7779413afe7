#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "kinscat/history.hpp"
#include "kinscat/state.hpp"

namespace kinscat {

/// Gevrey weight parameters. lambda(t) = lambda_inf - C <t>^{-delta}.
struct GevreyWeight {
  double gamma = 0.5;
  double sigma = 12.0;
  double lambda_inf = 0.2;
  double c_decay = 0.05;
  double delta = 0.05;
  double b = 11.0;
  int M = 2;

  /// Throws ConfigError naming the violated bound.
  void validate(int dimension = 1) const;
  /// Same weight with a different asymptotic radius.
  [[nodiscard]] GevreyWeight with_lambda_inf(double value) const;
};

double lambda_of_t(const GevreyWeight& w, double t);

/// log A_t(k, eta) = lambda(t) <k,eta>^gamma + sigma log <k,eta>.
double log_weight_A(const GevreyWeight& w, double t, double k, double eta);
/// log B_t(k, eta) = log A_t(k, eta) + log <k,eta>.
double log_weight_B(const GevreyWeight& w, double t, double k, double eta);

struct WeightedNormReport {
  double n1 = 0.0;
  double n2 = 0.0;
  double n_total = 0.0;
  std::vector<std::pair<double, double>> per_time;  // (t, N1 integrand at t)
};

/// sup_t ( sum_{j<=M} sum_k int B_t^2 |d^j_eta g|^2 deta )^{1/2}.
double norm_N1(const std::vector<SpectralState>& history, const GevreyWeight& w,
               std::vector<std::pair<double, double>>* per_time = nullptr);
/// Single-time N1 integrand (no sup).
double state_norm(const SpectralState& state, const GevreyWeight& w);

/// ( sum_j dt sum_k <t_j>^{2b} A_{t_j}(k, k t_j)^2 |rho_j(k)|^2 )^{1/2}.
double norm_N2(const DensityHistory& density, const GevreyWeight& w);

WeightedNormReport weighted_norms(const std::vector<SpectralState>& history,
                                  const DensityHistory& density, const GevreyWeight& w);

/// 4th-order centered difference of order j (1..4) of row at index i; zero
/// extension beyond the grid.
Complex eta_derivative(std::span<const Complex> row, int i, int order, double deta);

struct GevreyInequalityReport {
  double gamma = 0.0;
  int samples = 0;
  // (i) <x+y>^g <= <x>^g + <y>^g
  double margin_subadditive = 0.0;
  int violations_subadditive = 0;
  // (ii) |<x>^g - <y>^g| <= C <x-y> / (<x>^{1-g} + <y>^{1-g})
  double constant_difference = 0.0;     // empirical smallest C
  double margin_difference = 0.0;       // margin against C = 2
  int violations_difference = 0;
  // (iii) |x - y| <= x / K: |<x>^g - <y>^g| <= g / (K-1)^{1-g} <x-y>^g
  double margin_close = 0.0;
  int violations_close = 0;
  // (iv) 1/2 <= x/y <= 2: <x+y>^g <= c (<x>^g + <y>^g)
  double constant_comparable = 0.0;     // empirical smallest c
  double margin_comparable = 0.0;       // 1 - c
  // lower companion: C (<x>^g + <y>^g) <= <x+y>^g
  double constant_lower = 0.0;
};

/// Random-sample check of the fractional-power inequalities; x, y are drawn
/// log-uniformly over [0, 1e6]. Margins are min over samples of (rhs - lhs) / rhs.
GevreyInequalityReport gevrey_inequality_suite(double gamma, int samples, std::uint64_t seed = 1);

}  // namespace kinscat
