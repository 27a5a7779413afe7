#pragma once

#include "kinscat/gevrey.hpp"
#include "kinscat/model.hpp"
#include "kinscat/types.hpp"

namespace kinscat {

/// Potential, field and modified density of one time slice.
struct FieldSnapshot {
  ModeField u_hat;
  ModeField e_hat;
  ModeField rho_hat;
  double residual = 0.0;
  int iters = 0;
  double contraction_ratio = 0.0;
  double h_tail_bound = 0.0;
};

/// (a * b)_k = sum_l a_l b_{k-l} truncated to |k| <= kmax, via zero-padded FFT
/// on 4 kmax + 2 points (no aliasing into the kept modes).
ModeField convolve_padded(const ModeField& a, const ModeField& b);
/// Same product by the direct double sum.
ModeField convolve_direct(const ModeField& a, const ModeField& b);

/// sum_k |c_k|.
double l1_norm(const ModeField& f);
/// sum_k e^{lambda(t) <k, k t>^gamma} |c_k|; submultiplicative under convolution.
double weighted_l1_norm(const ModeField& f, const GevreyWeight& w, double t);

/// sum_{n=2}^{n_h} a_n u^{*n}. tail_bound receives sum_{n>n_h} |a_n| ||u||_1^n.
/// Throws NumericalError when ||u||_1 >= R / 2.
ModeField h_of_field(const ModelConfig& model, const ModeField& u_hat, int n_h, double* tail_bound = nullptr);

/// U = rho / (beta + k^2); U(0) = rho(0) / beta for beta > 0 and 0 for beta = 0.
ModeField potential_from_density(const ModelConfig& model, const ModeField& rho_hat);

/// U and E = -i k U from rho. With beta = 0 a nonzero mean is rejected.
FieldSnapshot electric_from_density(const ModelConfig& model, const ModeField& rho_hat);

struct PoissonOptions {
  double tol = 1e-15;
  int max_iters = 50;
  /// Smallness threshold on the weighted norm of q; negative selects 0.05 R.
  double ball_threshold = -1.0;
};

/// Picard iteration rho <- q - h((beta - Delta)^{-1} rho) from rho = q.
FieldSnapshot poisson_fixed_point(const ModelConfig& model, const ModeField& q_hat, const GevreyWeight& w, double t,
                                  const PoissonOptions& opts = {});

}  // namespace kinscat
