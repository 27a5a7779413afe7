#pragma once

#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "kinscat/types.hpp"

namespace kinscat {

/// Real power series h(x) = sum_{n>=2} a_n x^n, stored up to a fixed maximal
/// order and evaluated with a configurable truncation order.
class PowerSeries {
 public:
  static constexpr int kStoredOrder = 64;

  PowerSeries() = default;
  /// coeffs[n] = a_n; entries 0 and 1 must vanish.
  PowerSeries(std::vector<double> coeffs, double radius);

  static PowerSeries zero();
  /// e^x - 1 - x.
  static PowerSeries exp_remainder();

  [[nodiscard]] bool is_zero() const;
  [[nodiscard]] double coefficient(int n) const;
  [[nodiscard]] int max_order() const { return static_cast<int>(coeffs_.size()) - 1; }
  [[nodiscard]] double radius() const { return radius_; }

  /// Partial sum up to order n_max.
  [[nodiscard]] double operator()(double x, int n_max) const;
  /// Bound on sum_{n > n_max} |a_n| |x|^n from the stored coefficients.
  [[nodiscard]] double tail_bound(double x, int n_max) const;

 private:
  std::vector<double> coeffs_{0.0, 0.0};
  double radius_ = std::numeric_limits<double>::infinity();
};

/// Plasma model: -Delta U + beta U + h(U) = density.
struct ModelConfig {
  double beta = 0.0;
  PowerSeries h = PowerSeries::zero();
  int h_order = 12;
  int dimension = 1;
  std::string name = "vp";

  /// |k|^2 / (beta + |k|^2); zero at k = 0.
  [[nodiscard]] double coupling(int k) const;
  void validate() const;
};

/// Presets: vp (beta=0,h=0), screened (beta=1,h=0), vpme (beta=1,h=e^U-1-U).
ModelConfig make_preset(std::string_view name);

/// One Gaussian component of an equilibrium: weight * N(center, width^2).
struct GaussianComponent {
  double weight = 1.0;
  double center = 0.0;
  double width = 1.0;
};

/// Spatially homogeneous equilibrium described through its velocity Fourier
/// transform mu_hat(eta) = int mu(v) e^{-i eta v} dv.
class Equilibrium {
 public:
  using Evaluator = std::function<Complex(double)>;
  using DerivativeEvaluator = std::function<Complex(double, int)>;

  Equilibrium(Evaluator mu_hat, double lambda_analytic, int m_check, std::string label,
              DerivativeEvaluator derivative = {}, bool even = false);

  /// Finite mixture of Gaussians with closed-form transforms and derivatives.
  static Equilibrium gaussian_mixture(std::vector<GaussianComponent> parts, std::string label,
                                      double lambda_analytic = 4.0, int m_check = 2);
  static Equilibrium maxwellian(double lambda_analytic = 4.0);
  /// (G_w(v - v0) + G_w(v + v0)) / 2 with beam width w.
  static Equilibrium two_stream(double v0, double width = 1.0, double lambda_analytic = 4.0);
  /// (1 - nb) G(v) + nb G_{sigma_b}(v - vb).
  static Equilibrium bump_on_tail(double nb, double vb, double sigma_b, double lambda_analytic = 4.0);

  [[nodiscard]] Complex mu_hat(double eta) const { return mu_hat_(eta); }
  /// j-th derivative; closed form when available, else centered differences
  /// with step 1e-4 <eta>.
  [[nodiscard]] Complex derivative(double eta, int order) const;
  [[nodiscard]] bool has_closed_form_derivatives() const { return static_cast<bool>(derivative_); }
  /// True when mu_hat is real and even (mu even in v).
  [[nodiscard]] bool is_even() const { return even_; }

  [[nodiscard]] double lambda_analytic() const { return lambda_analytic_; }
  /// Largest admissible |Re tau| / |k| for left-shifted Laplace variables.
  [[nodiscard]] double lambda_safe() const { return 0.45 * lambda_analytic_; }
  [[nodiscard]] int m_check() const { return m_check_; }
  [[nodiscard]] const std::string& label() const { return label_; }

  /// Same equilibrium with mu_hat multiplied by s (test fixtures).
  [[nodiscard]] Equilibrium scaled(double s) const;

 private:
  Evaluator mu_hat_;
  DerivativeEvaluator derivative_;
  double lambda_analytic_;
  int m_check_;
  std::string label_;
  bool even_;
};

/// max over |eta| <= eta_max and j <= M of e^{lambda <eta>} |d^j mu_hat(eta)|.
double check_H1(const Equilibrium& eq, double lambda, int M, double eta_max);

/// |mu_hat(0) - 1| <= 1e-12.
bool check_H3(const Equilibrium& eq);

}  // namespace kinscat
