#include "kinscat/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "kinscat/errors.hpp"

namespace kinscat {

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for nodes kXgk[1], kXgk[3], kXgk[5], kXgk[7].
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  Complex value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const ComplexIntegrand& f, double a, double b, double& max_abs) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const Complex fc = f(c);
  max_abs = std::max(max_abs, std::abs(fc));
  Complex kron = kWgk[7] * fc;
  Complex gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const Complex f1 = f(c - dx);
    const Complex f2 = f(c + dx);
    max_abs = std::max({max_abs, std::abs(f1), std::abs(f2)});
    kron += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  kron *= h;
  gauss *= h;
  const double err = std::abs(kron - gauss);
  return {a, b, kron, err};
}

}  // namespace

QuadratureResult integrate_adaptive(const ComplexIntegrand& f, double a, double b, double abs_tol,
                                    int max_intervals) {
  QuadratureResult out;
  if (a == b) return out;
  std::priority_queue<Segment> heap;
  heap.push(gk15(f, a, b, out.max_abs));
  out.evaluations = 15;
  Complex total = heap.top().value;
  double err = heap.top().error;
  int count = 1;
  while (err > abs_tol && count < max_intervals) {
    const Segment s = heap.top();
    heap.pop();
    const double mid = 0.5 * (s.a + s.b);
    if (mid <= s.a || mid >= s.b) {
      heap.push(s);
      break;  // interval no longer divisible in double precision
    }
    const Segment left = gk15(f, s.a, mid, out.max_abs);
    const Segment right = gk15(f, mid, s.b, out.max_abs);
    out.evaluations += 30;
    total += left.value + right.value - s.value;
    err += left.error + right.error - s.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum to remove drift from the incremental updates.
  total = {};
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = total;
  out.error = err;
  return out;
}

GaussRule gauss_legendre(int n) {
  if (n < 1) throw ConfigError("gauss_legendre: need at least one node");
  GaussRule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[static_cast<std::size_t>(i)] = -x;
    r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    r.weights[static_cast<std::size_t>(i)] = w;
    r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return r;
}

QuadratureResult laplace_one_sided_detailed(const ComplexIntegrand& phi, Complex tau, double tol,
                                            double decay_rate) {
  if (!(decay_rate > 0.0)) throw DomainError("laplace_one_sided: decay rate must be positive");
  const double rate = decay_rate + tau.real();
  if (!(rate > 0.0)) {
    throw DomainError("laplace_one_sided: Re tau = " + std::to_string(tau.real()) +
                      " outside the half-plane Re tau > -" + std::to_string(decay_rate));
  }
  auto integrand = [&](double t) { return std::exp(-tau * t) * phi(t); };

  const double mag = std::abs(tau);
  double width = mag > 4.0 ? std::min(0.5, 2.0 / mag) : 0.5;
  const double max_width = std::max(0.5, 2.0 / rate);
  const double t_limit = 1e3 + 80.0 / rate;
  const double panel_tol = tol / 64.0;

  QuadratureResult out;
  double a = 0.0;
  int quiet_panels = 0;
  while (true) {
    const double b = a + width;
    QuadratureResult p = integrate_adaptive(integrand, a, b, panel_tol);
    out.value += p.value;
    out.error += p.error;
    out.evaluations += p.evaluations;
    out.max_abs = std::max(out.max_abs, p.max_abs);
    // Tail beyond b is bounded by max|integrand| / rate under exponential decay.
    const double tail = p.max_abs * (width + 1.0 / rate);
    if (std::abs(p.value) <= panel_tol && tail <= panel_tol) {
      if (++quiet_panels >= 2) {
        out.error += tail;
        break;
      }
    } else {
      quiet_panels = 0;
    }
    a = b;
    if (a > t_limit) {
      throw IntegrationError("laplace_one_sided: tail did not decay by t = " + std::to_string(a) +
                             " (declared decay rate " + std::to_string(decay_rate) + ")");
    }
    width = std::min(2.0 * width, max_width);
  }
  return out;
}

Complex laplace_one_sided(const ComplexIntegrand& phi, Complex tau, double tol, double decay_rate) {
  return laplace_one_sided_detailed(phi, tau, tol, decay_rate).value;
}

Complex laplace_two_sided(const ComplexIntegrand& phi, Complex tau, double tol, double decay_rate) {
  if (!(std::abs(tau.real()) < decay_rate)) {
    throw DomainError("laplace_two_sided: requires |Re tau| < " + std::to_string(decay_rate));
  }
  const Complex right = laplace_one_sided(phi, tau, 0.5 * tol, decay_rate);
  auto reflected = [&](double t) { return phi(-t); };
  const Complex left = laplace_one_sided(reflected, -tau, 0.5 * tol, decay_rate);
  return right + left;
}

}  // namespace kinscat
