#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "kinscat/model.hpp"
#include "kinscat/types.hpp"

namespace kinscat {

inline constexpr double kLaplaceTol = 1e-13;

/// |k|^2/(beta+|k|^2) * int_0^inf t mu_hat(sign * k t) e^{-tau t} dt.
/// Only requires Re tau > -lambda_analytic |k| (quadrature convergence).
Complex coupled_transform(const ModelConfig& model, const Equilibrium& eq, int k, Complex tau, int sign,
                          double tol = kLaplaceTol);

/// D(k, tau) = 1 + coupled_transform(sign = +1). Requires Re tau >= -lambda_safe |k|.
Complex dispersion_D(const ModelConfig& model, const Equilibrium& eq, int k, Complex tau,
                     double tol = kLaplaceTol);

/// dD/dtau.
Complex dispersion_D_derivative(const ModelConfig& model, const Equilibrium& eq, int k, Complex tau,
                                double tol = kLaplaceTol);

/// K~_k(tau) = -F / (1 + F) with F = coupled_transform(sign = -1).
Complex resolvent_Ktilde(const ModelConfig& model, const Equilibrium& eq, int k, Complex tau,
                         double kappa_floor = 1e-6, double tol = kLaplaceTol);

struct DispersionSample {
  int k = 0;
  Complex tau{};
  Complex value{};
};

/// Newton iteration on D(k, .) = 0 from an initial guess.
Complex find_dispersion_root(const ModelConfig& model, const Equilibrium& eq, int k, Complex guess,
                             double tol = 1e-12, int max_iters = 60);

/// Winding number of f around 0 along the closed counter-clockwise contour
/// {i omega : omega from +R to -R} followed by the right semicircle of radius R
/// centred at `shift`. Sampling is refined until consecutive argument jumps
/// stay below pi/4. `residual` receives |accumulated arg - 2 pi n|.
int nyquist_winding(const std::function<Complex(Complex)>& f, double radius, double shift = 0.0,
                    double* residual = nullptr);

struct PenroseModeResult {
  int k = 0;
  double omega_argmin = 0.0;
  double abs_min = 0.0;
  int winding = 0;
  double winding_residual = 0.0;
};

struct PenroseReport {
  double kappa0 = 0.0;
  double sampled_min = 0.0;
  int argmin_k = 0;
  Complex argmin_tau{};
  std::map<int, int> windings;
  bool stable = false;
  int k_scan_max = 0;
  double tail_bound = 0.0;        // |D - 1| bound for |k| > k_scan_max
  double frequency_bound = 0.0;   // |D - 1| bound for |omega| > omega_max, scanned k
  bool conclusive = false;
  std::vector<PenroseModeResult> modes;
};

PenroseReport penrose_scan(const ModelConfig& model, const Equilibrium& eq, int k_scan_max,
                           double omega_max, int n_samples);

struct TwoStreamParams {
  double v0 = 0.0;
  double width = 1.0;
};

/// Coarse scan over beam widths {1, 1/2, 1/4} (outer) and v0 = v0_min, v0_min + step, ...
/// (inner); returns the first two-stream equilibrium whose D(1, .) has winding >= 1.
/// Unit-width beams alone cannot destabilize k = 1 on the 2 pi torus.
std::optional<TwoStreamParams> find_unstable_two_stream(const ModelConfig& model, double v0_min = 0.5,
                                                        double v0_max = 6.0, double step = 0.25);

/// max over sampled omega of |K~_k(i omega)| (1 + k^2 + omega^2).
double resolvent_decay_constant(const ModelConfig& model, const Equilibrium& eq, int k, double omega_max,
                                int n_samples);

/// Trapezoidal convolution-quadrature weights w_0..w_n of a Laplace-domain
/// symbol F: sum_m w_m z^m = F(2 (1 - z) / ((1 + z) dt)).
CVector convolution_quadrature_weights(const std::function<Complex(Complex)>& symbol, double dt, int n);

struct KhatOptions {
  std::optional<double> contour_re;  // default: -lambda_safe |k| / 2, then closer to the axis
  double omega_max = 60.0;
  double kappa_floor = 1e-6;
  double tol = 1e-12;
  bool with_cq_weights = true;
};

struct ResolventTable {
  int k = 0;
  TimeGrid grid;
  std::vector<double> times;
  CVector values;            // K^_k(t_j)
  double fit_C = 0.0;
  double fit_lambda1 = 0.0;  // decay rate per unit |k|
  double fit_r2 = 0.0;
  double contour_re = 0.0;
  bool contour_fallback = false;
  double omega_max = 0.0;
  double truncation_bound = 0.0;
  CVector kernel_weights;     // CQ weights of the coupling kernel
  CVector resolvent_weights;  // CQ weights of K
  double identity_defect = 0.0;  // l1 norm of the weights of (I+L)(I+K) - I
  double resolvent_norm_bound = 0.0;  // 1 + sum |resolvent weights|
};

ResolventTable inverse_laplace_Khat(const ModelConfig& model, const Equilibrium& eq, int k, const TimeGrid& grid,
                                    const KhatOptions& opts = {});

/// Tables for every nonzero mode |k| <= kmax. Negative modes are conjugates of
/// positive ones (mu real).
std::map<int, ResolventTable> build_resolvent_tables(const ModelConfig& model, const Equilibrium& eq, int kmax,
                                                     const TimeGrid& grid, const KhatOptions& opts = {});

/// Least-squares fit of log|values| = log C - rate * t on the upper envelope
/// (local maxima) where |values| > 1e-12; falls back to all samples after the
/// first maximum when fewer than three maxima exist. Returns (C, rate, r2).
struct DecayFit {
  double C = 0.0;
  double rate = 0.0;
  double r2 = 0.0;
  int points = 0;
};
DecayFit fit_exponential_envelope(const std::vector<double>& t, const std::vector<double>& magnitude,
                                  double t_min = 0.0, double t_max = 1e300);

/// l1 norm of the weights of (I + L)(I + K) - I for lower-triangular Toeplitz
/// operators with the given weights.
double resolvent_identity_defect(const CVector& l_weights, const CVector& k_weights);

}  // namespace kinscat
