#include "kinscat/model.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "kinscat/errors.hpp"

namespace kinscat {

PowerSeries::PowerSeries(std::vector<double> coeffs, double radius)
    : coeffs_(std::move(coeffs)), radius_(radius) {
  if (coeffs_.size() < 2) coeffs_.resize(2, 0.0);
  if (coeffs_[0] != 0.0 || coeffs_[1] != 0.0) {
    throw ConfigError("h must satisfy h(x) = O(x^2): constant and linear coefficients must vanish");
  }
  if (!(radius_ > 0.0)) throw ConfigError("h series radius must be positive");
}

PowerSeries PowerSeries::zero() { return {}; }

PowerSeries PowerSeries::exp_remainder() {
  std::vector<double> a(kStoredOrder + 1, 0.0);
  double fact = 1.0;
  for (int n = 1; n <= kStoredOrder; ++n) {
    fact *= n;
    if (n >= 2) a[n] = 1.0 / fact;
  }
  return {std::move(a), std::numeric_limits<double>::infinity()};
}

bool PowerSeries::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0.0; });
}

double PowerSeries::coefficient(int n) const {
  return (n >= 0 && n < static_cast<int>(coeffs_.size())) ? coeffs_[n] : 0.0;
}

double PowerSeries::operator()(double x, int n_max) const {
  const int top = std::min(n_max, max_order());
  double acc = 0.0;
  for (int n = top; n >= 2; --n) acc = (acc + coeffs_[n]) * x;
  return acc * x;
}

double PowerSeries::tail_bound(double x, int n_max) const {
  double acc = 0.0;
  const double ax = std::abs(x);
  for (int n = n_max + 1; n <= max_order(); ++n) acc += std::abs(coeffs_[n]) * std::pow(ax, n);
  return acc;
}

double ModelConfig::coupling(int k) const {
  if (k == 0) return 0.0;
  const double k2 = static_cast<double>(k) * k;
  return k2 / (beta + k2);
}

void ModelConfig::validate() const {
  if (!(beta >= 0.0)) throw ConfigError("model: beta must be >= 0");
  if (dimension != 1) throw ConfigError("model: only dimension d = 1 is supported by the solvers");
  if (!h.is_zero() && (h_order < 2 || h_order > h.max_order())) {
    throw ConfigError("model: h truncation order must lie in [2, " + std::to_string(h.max_order()) + "]");
  }
}

ModelConfig make_preset(std::string_view name) {
  ModelConfig m;
  if (name == "vp") {
    m.beta = 0.0;
  } else if (name == "screened") {
    m.beta = 1.0;
  } else if (name == "vpme") {
    m.beta = 1.0;
    m.h = PowerSeries::exp_remainder();
  } else {
    throw ConfigError("unknown model preset '" + std::string(name) + "' (expected vp | screened | vpme)");
  }
  m.name = std::string(name);
  return m;
}

Equilibrium::Equilibrium(Evaluator mu_hat, double lambda_analytic, int m_check, std::string label,
                         DerivativeEvaluator derivative, bool even)
    : mu_hat_(std::move(mu_hat)),
      derivative_(std::move(derivative)),
      lambda_analytic_(lambda_analytic),
      m_check_(m_check),
      label_(std::move(label)),
      even_(even) {
  if (!mu_hat_) throw ConfigError("equilibrium: missing mu_hat evaluator");
  if (!(lambda_analytic_ > 0.0)) throw ConfigError("equilibrium: lambda_analytic must be positive");
}

namespace {

// d^j/deta^j of exp(-a eta^2 / 2 - i b eta) via f^(j+1) = y f^(j) - j a f^(j-1),
// y = -a eta - i b.
Complex gaussian_factor_derivative(double a, double b, double eta, int order) {
  const Complex f0 = std::exp(Complex(-0.5 * a * eta * eta, -b * eta));
  if (order == 0) return f0;
  const Complex y(-a * eta, -b);
  Complex prev = f0;
  Complex cur = y * f0;
  for (int j = 1; j < order; ++j) {
    const Complex next = y * cur - static_cast<double>(j) * a * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace

Equilibrium Equilibrium::gaussian_mixture(std::vector<GaussianComponent> parts, std::string label,
                                          double lambda_analytic, int m_check) {
  if (parts.empty()) throw ConfigError("equilibrium: empty Gaussian mixture");
  bool even = true;
  for (const auto& p : parts) {
    if (!(p.width > 0.0)) throw ConfigError("equilibrium: Gaussian width must be positive");
    if (p.center != 0.0) even = false;
  }
  // Symmetric pairs (+v0, -v0) with equal weight also give an even transform.
  if (!even) {
    even = std::all_of(parts.begin(), parts.end(), [&](const GaussianComponent& p) {
      return p.center == 0.0 || std::any_of(parts.begin(), parts.end(), [&](const GaussianComponent& q) {
               return q.center == -p.center && q.weight == p.weight && q.width == p.width;
             });
    });
  }
  auto mu = [parts](double eta) {
    Complex acc{};
    for (const auto& p : parts) {
      acc += p.weight * std::exp(Complex(-0.5 * p.width * p.width * eta * eta, -p.center * eta));
    }
    return acc;
  };
  auto deriv = [parts](double eta, int order) {
    Complex acc{};
    for (const auto& p : parts) {
      acc += p.weight * gaussian_factor_derivative(p.width * p.width, p.center, eta, order);
    }
    return acc;
  };
  return {mu, lambda_analytic, m_check, std::move(label), deriv, even};
}

Equilibrium Equilibrium::maxwellian(double lambda_analytic) {
  return gaussian_mixture({{1.0, 0.0, 1.0}}, "maxwellian", lambda_analytic);
}

Equilibrium Equilibrium::two_stream(double v0, double width, double lambda_analytic) {
  return gaussian_mixture({{0.5, v0, width}, {0.5, -v0, width}}, "two_stream", lambda_analytic);
}

Equilibrium Equilibrium::bump_on_tail(double nb, double vb, double sigma_b, double lambda_analytic) {
  if (!(nb >= 0.0 && nb < 1.0)) throw ConfigError("bump_on_tail: nb must lie in [0, 1)");
  return gaussian_mixture({{1.0 - nb, 0.0, 1.0}, {nb, vb, sigma_b}}, "bump_on_tail", lambda_analytic);
}

Complex Equilibrium::derivative(double eta, int order) const {
  if (order == 0) return mu_hat_(eta);
  if (derivative_) return derivative_(eta, order);
  // Centered differences of increasing order, applied recursively.
  const double h = 1e-4 * bracket(eta);
  if (order == 1) return (mu_hat_(eta + h) - mu_hat_(eta - h)) / (2.0 * h);
  return (derivative(eta + h, order - 1) - derivative(eta - h, order - 1)) / (2.0 * h);
}

Equilibrium Equilibrium::scaled(double s) const {
  auto mu = [base = mu_hat_, s](double eta) { return s * base(eta); };
  DerivativeEvaluator d;
  if (derivative_) d = [base = derivative_, s](double eta, int j) { return s * base(eta, j); };
  return {mu, lambda_analytic_, m_check_, label_ + "*" + std::to_string(s), d, even_};
}

double check_H1(const Equilibrium& eq, double lambda, int M, double eta_max) {
  if (!(eta_max > 0.0)) throw ConfigError("check_H1: eta_max must be positive");
  if (M < 0) throw ConfigError("check_H1: M must be nonnegative");
  // Fine sampling; the grid always contains eta = 0.
  const int half = std::max(2000, static_cast<int>(std::ceil(eta_max / 1e-3)));
  const double step = eta_max / half;
  double worst = 0.0;
  for (int i = -half; i <= half; ++i) {
    const double eta = i * step;
    const double weight = std::exp(lambda * bracket(eta));
    for (int j = 0; j <= M; ++j) {
      const double v = weight * std::abs(eq.derivative(eta, j));
      if (!std::isfinite(v)) {
        throw NumericalError("check_H1: non-finite sample of equilibrium '" + eq.label() +
                             "' at eta = " + std::to_string(eta));
      }
      worst = std::max(worst, v);
    }
  }
  return worst;
}

bool check_H3(const Equilibrium& eq) { return std::abs(eq.mu_hat(0.0) - 1.0) <= 1e-12; }

}  // namespace kinscat
