#include "kinscat/field.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fft.hpp"
#include "kinscat/errors.hpp"

namespace kinscat {

namespace {

void require_same_lattice(const ModeField& a, const ModeField& b) {
  if (!(a.lattice() == b.lattice())) throw ConfigError("field: lattice mismatch");
}

CVector to_physical(const ModeField& f, int n) {
  CVector buf(static_cast<std::size_t>(n));
  for (int k = -f.kmax(); k <= f.kmax(); ++k) buf[static_cast<std::size_t>((k + n) % n)] = f[k];
  detail::dft(buf, +1);
  return buf;
}

}  // namespace

ModeField convolve_padded(const ModeField& a, const ModeField& b) {
  require_same_lattice(a, b);
  const int K = a.kmax();
  const int n = 4 * K + 2;
  CVector pa = to_physical(a, n);
  const CVector pb = to_physical(b, n);
  for (std::size_t i = 0; i < pa.size(); ++i) pa[i] *= pb[i];
  detail::dft(pa, -1);
  ModeField out(a.lattice());
  for (int k = -K; k <= K; ++k) out[k] = pa[static_cast<std::size_t>((k + n) % n)] / static_cast<double>(n);
  return out;
}

ModeField convolve_direct(const ModeField& a, const ModeField& b) {
  require_same_lattice(a, b);
  const int K = a.kmax();
  ModeField out(a.lattice());
  for (int k = -K; k <= K; ++k) {
    Complex acc{};
    for (int l = -K; l <= K; ++l) acc += a[l] * b.at_or_zero(k - l);
    out[k] = acc;
  }
  return out;
}

double l1_norm(const ModeField& f) {
  double s = 0.0;
  for (const auto& v : f.values()) s += std::abs(v);
  return s;
}

double weighted_l1_norm(const ModeField& f, const GevreyWeight& w, double t) {
  const double lam = lambda_of_t(w, t);
  double s = 0.0;
  for (int k = -f.kmax(); k <= f.kmax(); ++k) {
    s += std::exp(lam * std::pow(bracket(k, k * t), w.gamma)) * std::abs(f[k]);
  }
  return s;
}

ModeField h_of_field(const ModelConfig& model, const ModeField& u_hat, int n_h, double* tail_bound) {
  const double norm = l1_norm(u_hat);
  const double radius = model.h.radius();
  if (std::isfinite(radius) && norm >= 0.5 * radius) {
    throw NumericalError("h_of_field: ||U||_1 = " + std::to_string(norm) + " reaches half the series radius " +
                         std::to_string(radius) + "; the series diverges");
  }
  if (tail_bound) *tail_bound = model.h.tail_bound(norm, n_h);
  ModeField out(u_hat.lattice());
  const int top = std::min(n_h, model.h.max_order());
  if (model.h.is_zero() || top < 2) return out;
  // Horner: p <- a_n + u * p, from the top coefficient down to a_1 = 0.
  ModeField p(u_hat.lattice());
  p[0] = model.h.coefficient(top);
  for (int n = top - 1; n >= 1; --n) {
    p = convolve_padded(p, u_hat);
    p[0] += model.h.coefficient(n);
  }
  return convolve_padded(p, u_hat);
}

ModeField potential_from_density(const ModelConfig& model, const ModeField& rho_hat) {
  ModeField u(rho_hat.lattice());
  for (int k = -rho_hat.kmax(); k <= rho_hat.kmax(); ++k) {
    if (k == 0) {
      u[0] = model.beta > 0.0 ? rho_hat[0] / model.beta : Complex{};
    } else {
      u[k] = rho_hat[k] / (model.beta + static_cast<double>(k) * k);
    }
  }
  return u;
}

FieldSnapshot electric_from_density(const ModelConfig& model, const ModeField& rho_hat) {
  if (model.beta == 0.0) {
    double scale = 0.0;
    for (const auto& v : rho_hat.values()) scale = std::max(scale, std::abs(v));
    if (std::abs(rho_hat[0]) > 1e-14 * (1.0 + scale)) {
      throw ConfigError("electric_from_density: beta = 0 requires a mean-zero density (rho(0) = " +
                        std::to_string(std::abs(rho_hat[0])) + ")");
    }
  }
  FieldSnapshot s;
  s.rho_hat = rho_hat;
  s.u_hat = potential_from_density(model, rho_hat);
  s.e_hat = ModeField(rho_hat.lattice());
  for (int k = -rho_hat.kmax(); k <= rho_hat.kmax(); ++k) s.e_hat[k] = Complex(0.0, -k) * s.u_hat[k];
  return s;
}

FieldSnapshot poisson_fixed_point(const ModelConfig& model, const ModeField& q_hat, const GevreyWeight& w, double t,
                                  const PoissonOptions& opts) {
  const double q_norm = weighted_l1_norm(q_hat, w, t);
  const double threshold = opts.ball_threshold >= 0.0 ? opts.ball_threshold : 0.05 * model.h.radius();
  if (q_norm > threshold) {
    throw NoContractionError("poisson_fixed_point: weighted norm of q = " + std::to_string(q_norm) +
                             " exceeds the smallness threshold " + std::to_string(threshold));
  }
  const double ball = 2.0 * q_norm;
  ModeField rho = q_hat;
  FieldSnapshot snap;
  double prev_dist = std::numeric_limits<double>::quiet_NaN();
  for (int it = 1; it <= opts.max_iters; ++it) {
    double tail = 0.0;
    ModeField next = q_hat - h_of_field(model, potential_from_density(model, rho), model.h_order, &tail);
    if (model.beta == 0.0) next[0] = Complex{};
    const double dist = weighted_l1_norm(next - rho, w, t);
    if (weighted_l1_norm(next, w, t) > ball * (1.0 + 1e-12) + std::numeric_limits<double>::min()) {
      throw NoContractionError("poisson_fixed_point: iterate left the ball of radius 2 ||q|| at iteration " +
                               std::to_string(it));
    }
    rho = std::move(next);
    snap.h_tail_bound = tail;
    if (std::isfinite(prev_dist) && prev_dist > 0.0) snap.contraction_ratio = dist / prev_dist;
    prev_dist = dist;
    snap.iters = it;
    snap.residual = dist;
    // Roundoff floor keeps O(1) data from stalling below machine precision.
    if (dist <= std::max(opts.tol, 8.0 * std::numeric_limits<double>::epsilon() * q_norm)) {
      FieldSnapshot out = electric_from_density(model, rho);
      out.residual = snap.residual;
      out.iters = snap.iters;
      out.contraction_ratio = snap.contraction_ratio;
      out.h_tail_bound = snap.h_tail_bound;
      return out;
    }
  }
  throw NoContractionError("poisson_fixed_point: no convergence within " + std::to_string(opts.max_iters) +
                           " iterations (last distance " + std::to_string(snap.residual) + ")");
}

}  // namespace kinscat
