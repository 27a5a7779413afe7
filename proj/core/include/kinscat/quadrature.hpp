#pragma once

#include <functional>
#include <vector>

#include "kinscat/types.hpp"

namespace kinscat {

using ComplexIntegrand = std::function<Complex(double)>;

struct QuadratureResult {
  Complex value{};
  double error = 0.0;     // certified by Gauss-Kronrod embedded estimate
  double max_abs = 0.0;   // largest |f| seen at the nodes
  int evaluations = 0;
};

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule by Newton iteration on P_n.
GaussRule gauss_legendre(int n);

/// Globally adaptive 7/15-point Gauss-Kronrod on [a, b]: bisects the interval
/// with the largest error estimate until the summed estimate is <= abs_tol.
QuadratureResult integrate_adaptive(const ComplexIntegrand& f, double a, double b, double abs_tol,
                                    int max_intervals = 4000);

/// int_0^inf e^{-tau t} phi(t) dt for phi bounded by C e^{-decay_rate t}.
/// Requires Re tau > -decay_rate; throws DomainError otherwise and
/// IntegrationError when the tail does not die out.
QuadratureResult laplace_one_sided_detailed(const ComplexIntegrand& phi, Complex tau, double tol,
                                            double decay_rate);

Complex laplace_one_sided(const ComplexIntegrand& phi, Complex tau, double tol, double decay_rate);

/// int_{-inf}^{inf} e^{-tau t} phi(t) dt; requires |Re tau| < decay_rate.
Complex laplace_two_sided(const ComplexIntegrand& phi, Complex tau, double tol, double decay_rate);

}  // namespace kinscat
