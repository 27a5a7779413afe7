#include "kinscat/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fft.hpp"
#include "kinscat/errors.hpp"
#include "kinscat/parallel.hpp"
#include "kinscat/quadrature.hpp"

namespace kinscat {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_nonzero_mode(int k, const char* what) {
  if (k == 0) throw ConfigError(std::string(what) + ": mode k must be nonzero");
}

void require_margin(const Equilibrium& eq, int k, Complex tau, const char* what) {
  const double margin = -eq.lambda_safe() * std::abs(k);
  if (tau.real() < margin) {
    throw DomainError(std::string(what) + ": Re tau = " + std::to_string(tau.real()) +
                      " lies left of the analyticity margin " + std::to_string(margin));
  }
}

// int_0^inf t^power mu_hat(sign k t) e^{-tau t} dt
Complex moment_transform(const Equilibrium& eq, int k, Complex tau, int sign, int power, double tol) {
  const double decay = eq.lambda_analytic() * std::abs(k);
  const double kk = static_cast<double>(sign * k);
  auto phi = [&eq, kk, power](double t) {
    return std::pow(t, power) * eq.mu_hat(kk * t);
  };
  return laplace_one_sided(phi, tau, tol, decay);
}

struct CqNodes {
  int L = 0;
  double rho = 0.0;
  CVector s;
};

CqNodes cq_nodes(double dt, int n) {
  CqNodes nodes;
  nodes.L = std::max(64, 4 * (n + 1));
  nodes.rho = std::exp(std::log(1e-12) / nodes.L);
  nodes.s.resize(static_cast<std::size_t>(nodes.L));
  for (int l = 0; l < nodes.L; ++l) {
    const Complex z = nodes.rho * std::exp(kI * (2.0 * kPi * l / nodes.L));
    nodes.s[static_cast<std::size_t>(l)] = 2.0 * (1.0 - z) / ((1.0 + z) * dt);
  }
  return nodes;
}

CVector cq_from_values(CVector values, const CqNodes& nodes, int n) {
  detail::dft(values, -1);
  CVector w(static_cast<std::size_t>(n + 1));
  double scale = 1.0 / nodes.L;
  for (int m = 0; m <= n; ++m) {
    w[static_cast<std::size_t>(m)] = values[static_cast<std::size_t>(m)] * scale;
    scale /= nodes.rho;
  }
  return w;
}

double golden_minimize(const std::function<double(double)>& f, double a, double b, int iters) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

}  // namespace

Complex coupled_transform(const ModelConfig& model, const Equilibrium& eq, int k, Complex tau, int sign,
                          double tol) {
  if (k == 0) return {};
  const double a = model.coupling(k);
  if (a == 0.0) return {};
  return a * moment_transform(eq, k, tau, sign, 1, tol);
}

Complex dispersion_D(const ModelConfig& model, const Equilibrium& eq, int k, Complex tau, double tol) {
  require_nonzero_mode(k, "dispersion_D");
  require_margin(eq, k, tau, "dispersion_D");
  return 1.0 + coupled_transform(model, eq, k, tau, +1, tol);
}

Complex dispersion_D_derivative(const ModelConfig& model, const Equilibrium& eq, int k, Complex tau, double tol) {
  require_nonzero_mode(k, "dispersion_D_derivative");
  return -model.coupling(k) * moment_transform(eq, k, tau, +1, 2, tol);
}

Complex resolvent_Ktilde(const ModelConfig& model, const Equilibrium& eq, int k, Complex tau, double kappa_floor,
                         double tol) {
  require_nonzero_mode(k, "resolvent_Ktilde");
  require_margin(eq, k, tau, "resolvent_Ktilde");
  const Complex F = coupled_transform(model, eq, k, tau, -1, tol);
  const Complex denom = 1.0 + F;
  if (std::abs(denom) < kappa_floor) {
    throw NearSingularError("resolvent_Ktilde: |1 + F| = " + std::to_string(std::abs(denom)) + " below floor at k = " +
                            std::to_string(k) + ", tau = (" + std::to_string(tau.real()) + ", " +
                            std::to_string(tau.imag()) + "); Penrose margin violated");
  }
  return -F / denom;
}

Complex find_dispersion_root(const ModelConfig& model, const Equilibrium& eq, int k, Complex guess, double tol,
                             int max_iters) {
  require_nonzero_mode(k, "find_dispersion_root");
  Complex tau = guess;
  for (int it = 0; it < max_iters; ++it) {
    const Complex D = 1.0 + coupled_transform(model, eq, k, tau, +1, 1e-15);
    const Complex dD = dispersion_D_derivative(model, eq, k, tau, 1e-15);
    if (dD == Complex{}) throw NumericalError("find_dispersion_root: vanishing derivative");
    Complex step = D / dD;
    // Damp large steps to stay inside the region of convergent quadrature.
    const double cap = 0.5 * (1.0 + std::abs(tau));
    if (std::abs(step) > cap) step *= cap / std::abs(step);
    tau -= step;
    if (std::abs(step) <= tol * std::max(1.0, std::abs(tau))) return tau;
  }
  throw NumericalError("find_dispersion_root: Newton iteration did not converge from guess (" +
                       std::to_string(guess.real()) + ", " + std::to_string(guess.imag()) + ")");
}

int nyquist_winding(const std::function<Complex(Complex)>& f, double radius, double shift, double* residual) {
  if (!(radius > 0.0)) throw ConfigError("nyquist_winding: radius must be positive");
  auto path = [&](double s) -> Complex {
    if (s <= 1.0) return {shift, radius * (1.0 - 2.0 * s)};
    const double theta = -0.5 * kPi + kPi * (s - 1.0);
    return shift + radius * std::exp(kI * theta);
  };
  auto eval = [&](double s) {
    const Complex v = f(path(s));
    if (!(std::abs(v) > 0.0) || !std::isfinite(std::abs(v))) {
      throw NearSingularError("nyquist_winding: function vanishes or is non-finite on the contour");
    }
    return v;
  };
  std::function<double(double, Complex, double, Complex, int)> refine =
      [&](double s0, Complex f0, double s1, Complex f1, int depth) -> double {
    const double d = std::arg(f1 / f0);
    if (std::abs(d) <= 0.25 * kPi || depth >= 30) return d;
    const double sm = 0.5 * (s0 + s1);
    const Complex fm = eval(sm);
    return refine(s0, f0, sm, fm, depth + 1) + refine(sm, fm, s1, f1, depth + 1);
  };
  constexpr int kSegments = 1024;
  double total = 0.0;
  Complex prev = eval(0.0);
  for (int i = 1; i <= 2 * kSegments; ++i) {
    const double s0 = static_cast<double>(i - 1) / kSegments;
    const double s1 = static_cast<double>(i) / kSegments;
    const Complex cur = i == 2 * kSegments ? eval(2.0) : eval(s1);
    total += refine(s0, prev, s1, cur, 0);
    prev = cur;
  }
  const double turns = total / (2.0 * kPi);
  const int n = static_cast<int>(std::lround(turns));
  if (residual) *residual = std::abs(total - 2.0 * kPi * n);
  return n;
}

PenroseReport penrose_scan(const ModelConfig& model, const Equilibrium& eq, int k_scan_max, double omega_max,
                           int n_samples) {
  if (k_scan_max < 1) throw ConfigError("penrose_scan: k_scan_max must be >= 1");
  if (!(omega_max > 0.0)) throw ConfigError("penrose_scan: omega_max must be positive");
  if (n_samples < 3) throw ConfigError("penrose_scan: need at least 3 frequency samples");
  constexpr double tol = 1e-11;

  std::vector<int> ks;
  for (int k = 1; k <= k_scan_max; ++k) {
    ks.push_back(k);
    if (!eq.is_even()) ks.push_back(-k);
  }
  std::vector<PenroseModeResult> results(ks.size());
  std::vector<double> freq_bounds(ks.size());
  parallel_for(ks.size(), [&](std::size_t idx) {
    const int k = ks[idx];
    auto absD = [&](double w) { return std::abs(dispersion_D(model, eq, k, Complex(0.0, w), tol)); };
    std::vector<double> vals(static_cast<std::size_t>(n_samples));
    const double step = 2.0 * omega_max / (n_samples - 1);
    std::size_t best = 0;
    for (int i = 0; i < n_samples; ++i) {
      vals[static_cast<std::size_t>(i)] = absD(-omega_max + step * i);
      if (vals[static_cast<std::size_t>(i)] < vals[best]) best = static_cast<std::size_t>(i);
    }
    const double w_best = -omega_max + step * static_cast<double>(best);
    const double lo = std::max(-omega_max, w_best - step);
    const double hi = std::min(omega_max, w_best + step);
    double w_min = golden_minimize(absD, lo, hi, 60);
    double v_min = absD(w_min);
    if (vals[best] < v_min) {
      v_min = vals[best];
      w_min = w_best;
    }
    PenroseModeResult r;
    r.k = k;
    r.omega_argmin = w_min;
    r.abs_min = v_min;
    r.winding = nyquist_winding(
        [&](Complex tau) { return dispersion_D(model, eq, k, tau, tol); }, omega_max, 0.0, &r.winding_residual);
    results[idx] = r;

    // |D - 1| <= a * TV(t mu_hat(kt)) / |omega| beyond the scanned frequencies.
    const double kk = k;
    auto variation = [&eq, kk](double t) {
      return Complex(std::abs(eq.mu_hat(kk * t) + kk * t * eq.derivative(kk * t, 1)), 0.0);
    };
    const double tv = laplace_one_sided(variation, 0.0, 1e-10, eq.lambda_analytic() * std::abs(k)).real();
    freq_bounds[idx] = model.coupling(k) * tv / omega_max;
  });

  PenroseReport rep;
  rep.k_scan_max = k_scan_max;
  rep.sampled_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const auto& r = results[i];
    rep.modes.push_back(r);
    rep.windings[r.k] = r.winding;
    if (eq.is_even()) rep.windings[-r.k] = r.winding;
    if (r.abs_min < rep.sampled_min) {
      rep.sampled_min = r.abs_min;
      rep.argmin_k = r.k;
      rep.argmin_tau = Complex(0.0, r.omega_argmin);
    }
    rep.frequency_bound = std::max(rep.frequency_bound, freq_bounds[i]);
  }
  // int_0^inf u |mu_hat(+-u)| du, then the O(|k|^-2) factor at the first excluded mode.
  double moment = 0.0;
  for (int sign : {+1, -1}) {
    auto f = [&eq, sign](double u) { return Complex(u * std::abs(eq.mu_hat(sign * u)), 0.0); };
    moment = std::max(moment, laplace_one_sided(f, 0.0, 1e-12, eq.lambda_analytic()).real());
  }
  const double kx = k_scan_max + 1.0;
  rep.tail_bound = moment / (model.beta + kx * kx);
  rep.kappa0 = std::max(0.0, std::min({rep.sampled_min, 1.0 - rep.frequency_bound, 1.0 - rep.tail_bound}));
  rep.conclusive = rep.tail_bound < rep.sampled_min && rep.frequency_bound < rep.sampled_min;
  const bool no_zeros =
      std::all_of(rep.windings.begin(), rep.windings.end(), [](const auto& kv) { return kv.second == 0; });
  rep.stable = rep.kappa0 > 0.0 && no_zeros;
  return rep;
}

std::optional<TwoStreamParams> find_unstable_two_stream(const ModelConfig& model, double v0_min, double v0_max,
                                                        double step) {
  if (!(step > 0.0)) throw ConfigError("find_unstable_two_stream: step must be positive");
  for (double width : {1.0, 0.5, 0.25}) {
    const int count = static_cast<int>(std::floor((v0_max - v0_min) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) {
      const double v0 = v0_min + step * i;
      const Equilibrium eq = Equilibrium::two_stream(v0, width);
      const int w = nyquist_winding([&](Complex tau) { return dispersion_D(model, eq, 1, tau, 1e-11); }, 50.0);
      if (w >= 1) return TwoStreamParams{v0, width};
    }
  }
  return std::nullopt;
}

double resolvent_decay_constant(const ModelConfig& model, const Equilibrium& eq, int k, double omega_max,
                                int n_samples) {
  double worst = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const double w = -omega_max + 2.0 * omega_max * i / std::max(1, n_samples - 1);
    const Complex K = resolvent_Ktilde(model, eq, k, Complex(0.0, w));
    worst = std::max(worst, std::abs(K) * (1.0 + static_cast<double>(k) * k + w * w));
  }
  return worst;
}

CVector convolution_quadrature_weights(const std::function<Complex(Complex)>& symbol, double dt, int n) {
  if (n < 0 || !(dt > 0.0)) throw ConfigError("convolution_quadrature_weights: need n >= 0 and dt > 0");
  const CqNodes nodes = cq_nodes(dt, n);
  CVector values(nodes.s.size());
  parallel_for(values.size(), [&](std::size_t l) { values[l] = symbol(nodes.s[l]); });
  return cq_from_values(std::move(values), nodes, n);
}

double resolvent_identity_defect(const CVector& l_weights, const CVector& k_weights) {
  const std::size_t n = std::min(l_weights.size(), k_weights.size());
  double acc = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    Complex c = l_weights[m] + k_weights[m];
    for (std::size_t j = 0; j <= m; ++j) c += l_weights[j] * k_weights[m - j];
    acc += std::abs(c);
  }
  return acc;
}

DecayFit fit_exponential_envelope(const std::vector<double>& t, const std::vector<double>& magnitude, double t_min,
                                  double t_max) {
  constexpr double kFloor = 1e-12;
  const std::size_t n = std::min(t.size(), magnitude.size());
  std::vector<std::size_t> pick;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (t[i] < t_min || t[i] > t_max || magnitude[i] <= kFloor) continue;
    if (magnitude[i] >= magnitude[i - 1] && magnitude[i] > magnitude[i + 1]) pick.push_back(i);
  }
  if (pick.size() < 3) {
    std::size_t first = pick.empty() ? 0 : pick.front();
    pick.clear();
    for (std::size_t i = first; i < n; ++i) {
      if (t[i] >= t_min && t[i] <= t_max && magnitude[i] > kFloor) pick.push_back(i);
    }
  }
  DecayFit fit;
  fit.points = static_cast<int>(pick.size());
  if (pick.size() < 2) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto i : pick) {
    const double x = t[i];
    const double y = std::log(magnitude[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(pick.size());
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) return fit;
  const double slope = (m * sxy - sx * sy) / denom;
  const double icept = (sy - slope * sx) / m;
  double ss_res = 0, ss_tot = 0;
  const double mean = sy / m;
  for (auto i : pick) {
    const double y = std::log(magnitude[i]);
    const double e = y - (icept + slope * t[i]);
    ss_res += e * e;
    ss_tot += (y - mean) * (y - mean);
  }
  fit.C = std::exp(icept);
  fit.rate = -slope;
  fit.r2 = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  return fit;
}

ResolventTable inverse_laplace_Khat(const ModelConfig& model, const Equilibrium& eq, int k, const TimeGrid& grid,
                                    const KhatOptions& opts) {
  require_nonzero_mode(k, "inverse_laplace_Khat");
  if (grid.steps < 1 || !(grid.dt > 0.0)) throw ConfigError("inverse_laplace_Khat: invalid time grid");
  if (!(opts.omega_max > 0.0)) throw ConfigError("inverse_laplace_Khat: omega_max must be positive");
  const double ak = std::abs(k);
  const double a = model.coupling(k);
  const double margin = -eq.lambda_safe() * ak;
  auto F = [&](Complex tau) { return coupled_transform(model, eq, k, tau, -1, opts.tol); };

  std::vector<double> candidates;
  if (opts.contour_re) {
    if (*opts.contour_re < margin) {
      throw DomainError("inverse_laplace_Khat: contour Re tau = " + std::to_string(*opts.contour_re) +
                        " outside the analyticity margin " + std::to_string(margin));
    }
    candidates = {*opts.contour_re};
  } else {
    candidates = {0.5 * margin, 0.25 * margin, 0.125 * margin};
  }
  candidates.push_back(0.01);

  const double T = grid.horizon();
  const double h = 2.0 * kPi / (2.0 * T + 100.0);
  const int J = static_cast<int>(std::ceil(opts.omega_max / h));
  const bool symmetric = eq.is_even();

  ResolventTable tab;
  tab.k = k;
  tab.grid = grid;
  tab.omega_max = J * h;

  CVector F_line;
  double c = 0.0;
  bool accepted = false;
  for (std::size_t ci = 0; ci < candidates.size() && !accepted; ++ci) {
    c = candidates[ci];
    // Samples j = -J..J (or 0..J under conjugate symmetry).
    const int j0 = symmetric ? 0 : -J;
    F_line.assign(static_cast<std::size_t>(J - j0 + 1), {});
    parallel_for(F_line.size(), [&](std::size_t idx) {
      F_line[idx] = F(Complex(c, h * (static_cast<int>(idx) + j0)));
    });
    double min_abs = std::numeric_limits<double>::infinity();
    for (const auto& v : F_line) min_abs = std::min(min_abs, std::abs(1.0 + v));
    if (min_abs < opts.kappa_floor) continue;
    int winding = 0;
    try {
      winding = nyquist_winding([&](Complex tau) { return 1.0 + F(tau); }, tab.omega_max, c);
    } catch (const NearSingularError&) {
      continue;
    }
    if (winding != 0) continue;
    accepted = true;
    tab.contour_fallback = ci > 0;
  }
  if (!accepted) {
    throw NearSingularError("inverse_laplace_Khat: no admissible contour for k = " + std::to_string(k) +
                            " (resolvent denominator vanishes on or right of every candidate line)");
  }
  tab.contour_re = c;

  // Asymptotic model sum_n c_n / (tau + p)^n with known inverse transform,
  // matched to the large-tau expansion of K~ in w = 1/tau.
  const double p = 1.0 + ak + eq.lambda_safe() * ak;
  const int top = eq.has_closed_form_derivatives() ? 6 : 4;
  const double kk = k;
  // F = a sum_{m>=0} (m+1) phi^(m)(0) w^{m+2}, phi(t) = mu_hat(-k t).
  CVector Fw(static_cast<std::size_t>(top + 1));
  double kpow = 1.0;
  for (int m = 0; m + 2 <= top; ++m) {
    Fw[static_cast<std::size_t>(m + 2)] = a * (m + 1.0) * kpow * eq.derivative(0.0, m);
    kpow *= -kk;
  }
  // K~ = sum_{j>=1} (-F)^j truncated at w^top.
  CVector Kw(Fw.size());
  CVector power(Fw.size());
  power[0] = 1.0;
  for (int j = 1; 2 * j <= top; ++j) {
    CVector next(Fw.size());
    for (int x = 0; x <= top; ++x) {
      for (int y = 2; x + y <= top; ++y) next[static_cast<std::size_t>(x + y)] -= power[static_cast<std::size_t>(x)] * Fw[static_cast<std::size_t>(y)];
    }
    power = next;
    for (int x = 0; x <= top; ++x) Kw[static_cast<std::size_t>(x)] += power[static_cast<std::size_t>(x)];
  }
  // w^m (1 + p w)^{-m} = sum_i (-1)^i binom(m+i-1, i) p^i w^{m+i}.
  CVector cn(Fw.size());
  for (int n = 2; n <= top; ++n) {
    Complex v = Kw[static_cast<std::size_t>(n)];
    for (int m = 2; m < n; ++m) {
      const int i = n - m;
      double binom = 1.0;
      for (int q = 1; q <= i; ++q) binom = binom * (m + q - 1) / q;
      v -= cn[static_cast<std::size_t>(m)] * ((i % 2 ? -1.0 : 1.0) * binom * std::pow(p, i));
    }
    cn[static_cast<std::size_t>(n)] = v;
  }
  auto model_symbol = [&](Complex tau) {
    const Complex q = 1.0 / (tau + p);
    Complex acc{};
    for (int n = top; n >= 2; --n) acc = (acc + cn[static_cast<std::size_t>(n)]) * q;
    return acc * q;
  };
  auto model_inverse = [&](double t) {
    Complex acc{};
    double term = 1.0;  // t^{n-1} / (n-1)!
    for (int n = 1; n <= top; ++n) {
      if (n >= 2) acc += cn[static_cast<std::size_t>(n)] * term;
      term *= t / n;
    }
    return std::exp(-p * t) * acc;
  };

  const int j0 = symmetric ? 0 : -J;
  CVector R(F_line.size());
  for (std::size_t idx = 0; idx < F_line.size(); ++idx) {
    const Complex tau(c, h * (static_cast<int>(idx) + j0));
    const Complex Kt = -F_line[idx] / (1.0 + F_line[idx]);
    R[idx] = Kt - model_symbol(tau);
  }
  const double edge = std::max(std::abs(R.front() * (symmetric ? 0.0 : 1.0)), std::abs(R.back()));
  // Tail of the trapezoid sum beyond omega_max for a remainder decaying like omega^{-(top+1)}.
  tab.truncation_bound = edge * tab.omega_max / (top * kPi) * std::max(1.0, std::exp(c * T));

  const int n = grid.points();
  tab.times.resize(static_cast<std::size_t>(n));
  tab.values.resize(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t jt) {
    const double t = grid.t(static_cast<int>(jt));
    Complex sum{};
    if (symmetric) {
      double acc = R[0].real();
      for (std::size_t idx = 1; idx < R.size(); ++idx) {
        acc += 2.0 * (R[idx] * std::exp(kI * (h * static_cast<double>(idx) * t))).real();
      }
      sum = acc;
    } else {
      for (std::size_t idx = 0; idx < R.size(); ++idx) {
        sum += R[idx] * std::exp(kI * (h * (static_cast<double>(idx) + j0) * t));
      }
    }
    tab.times[jt] = t;
    tab.values[jt] = model_inverse(t) + h / (2.0 * kPi) * std::exp(c * t) * sum;
  });

  std::vector<double> mags(tab.values.size());
  for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = std::abs(tab.values[i]);
  const DecayFit fit = fit_exponential_envelope(tab.times, mags);
  tab.fit_C = fit.C;
  tab.fit_lambda1 = fit.rate / ak;
  tab.fit_r2 = fit.r2;

  if (opts.with_cq_weights) {
    const CqNodes nodes = cq_nodes(grid.dt, grid.steps);
    CVector Fv(nodes.s.size());
    parallel_for(Fv.size(), [&](std::size_t l) { Fv[l] = F(nodes.s[l]); });
    CVector Kv(Fv.size());
    for (std::size_t l = 0; l < Fv.size(); ++l) {
      const Complex denom = 1.0 + Fv[l];
      if (std::abs(denom) < opts.kappa_floor) {
        throw NearSingularError("inverse_laplace_Khat: resolvent denominator below floor at a quadrature node");
      }
      Kv[l] = -Fv[l] / denom;
    }
    tab.kernel_weights = cq_from_values(std::move(Fv), nodes, grid.steps);
    tab.resolvent_weights = cq_from_values(std::move(Kv), nodes, grid.steps);
    tab.identity_defect = resolvent_identity_defect(tab.kernel_weights, tab.resolvent_weights);
    double s = 1.0;
    for (const auto& w : tab.resolvent_weights) s += std::abs(w);
    tab.resolvent_norm_bound = s;
  }
  return tab;
}

std::map<int, ResolventTable> build_resolvent_tables(const ModelConfig& model, const Equilibrium& eq, int kmax,
                                                     const TimeGrid& grid, const KhatOptions& opts) {
  std::vector<ResolventTable> pos(static_cast<std::size_t>(std::max(0, kmax)));
  // Per-mode work is itself parallel; run modes serially to keep one pool active.
  for (int k = 1; k <= kmax; ++k) pos[static_cast<std::size_t>(k - 1)] = inverse_laplace_Khat(model, eq, k, grid, opts);
  std::map<int, ResolventTable> out;
  for (auto& t : pos) {
    ResolventTable neg = t;
    neg.k = -t.k;
    for (auto& v : neg.values) v = std::conj(v);
    for (auto& v : neg.kernel_weights) v = std::conj(v);
    for (auto& v : neg.resolvent_weights) v = std::conj(v);
    out.emplace(neg.k, std::move(neg));
    out.emplace(t.k, std::move(t));
  }
  return out;
}

}  // namespace kinscat
