#include "kinscat/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "kinscat/errors.hpp"
#include "kinscat/parallel.hpp"
#include "kinscat/quadrature.hpp"

namespace kinscat {

namespace {

// Reverse time so the backward equation becomes a causal convolution.
CVector reversed(const CVector& v) { return {v.rbegin(), v.rend()}; }

void check_source(const SourceHistory& source, const TimeGrid& grid) {
  if (!(source.grid() == grid)) throw ConfigError("volterra: source grid does not match the kernel grid");
  if (source.grid().steps < 1) throw ConfigError("volterra: source needs at least one time step");
}

void set_mean_mode(const ModelConfig& model, const SourceHistory& source, DensityHistory& out) {
  for (int j = 0; j < source.grid().points(); ++j) {
    out.at(j, 0) = model.beta > 0.0 ? source.at(j, 0) : Complex{};
  }
}

}  // namespace

VolterraKernels VolterraKernels::build(const ModelConfig& model, const Equilibrium& eq, const Lattice& lattice,
                                       const TimeGrid& grid) {
  VolterraKernels kern;
  kern.grid = grid;
  for (int k = 1; k <= lattice.kmax; ++k) {
    CVector w = convolution_quadrature_weights(
        [&](Complex s) { return coupled_transform(model, eq, k, s, -1, 1e-12); }, grid.dt, grid.steps);
    CVector wn(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) wn[i] = std::conj(w[i]);
    kern.weights.emplace(k, std::move(w));
    kern.weights.emplace(-k, std::move(wn));
  }
  return kern;
}

VolterraKernels VolterraKernels::from_tables(const std::map<int, ResolventTable>& tables) {
  VolterraKernels kern;
  for (const auto& [k, tab] : tables) {
    if (tab.kernel_weights.empty()) throw ConfigError("VolterraKernels: table without quadrature weights");
    kern.grid = tab.grid;
    kern.weights.emplace(k, tab.kernel_weights);
  }
  return kern;
}

namespace {

// w_r = int_{x0}^{x1} kernel(x) l_r(x) dx, l_r the Lagrange cardinal functions on
// integer nodes base..base+deg (x in step units).
void panel_weights(const std::function<Complex(double)>& kernel, int base, int deg, double x0, double x1,
                   const GaussRule& rule, Complex* out) {
  const double mid = 0.5 * (x0 + x1);
  const double half = 0.5 * (x1 - x0);
  for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
    const double x = mid + half * rule.nodes[g];
    const Complex kv = kernel(x) * (half * rule.weights[g]);
    for (int r = 0; r <= deg; ++r) {
      double l = 1.0;
      for (int q = 0; q <= deg; ++q) {
        if (q != r) l *= (x - (base + q)) / static_cast<double>(r - q);
      }
      out[r] += kv * l;
    }
  }
}

DensityHistory solve_product(const ModelConfig& model, const Equilibrium& eq, const SourceHistory& source) {
  constexpr int kDeg = 8;
  const GaussRule rule = gauss_legendre(24);
  const Lattice lat = source.lattice();
  const TimeGrid grid = source.grid();
  const int N = grid.steps;
  DensityHistory out(lat, grid);
  set_mean_mode(model, source, out);
  std::vector<int> modes;
  for (int k = -lat.kmax; k <= lat.kmax; ++k) {
    if (k != 0) modes.push_back(k);
  }
  std::vector<CVector> solved(modes.size());
  parallel_for(modes.size(), [&](std::size_t idx) {
    const int k = modes[idx];
    const double a = model.coupling(k);
    const double h = grid.dt;
    // Kernel in step units, including the dt of the measure.
    auto kernel = [&](double x) { return a * (x * h) * eq.mu_hat(-k * x * h) * h; };
    const int panels = N / kDeg;
    std::vector<CVector> full(static_cast<std::size_t>(panels), CVector(kDeg + 1));
    for (int P = 0; P < panels; ++P) {
      panel_weights(kernel, P * kDeg, kDeg, P * kDeg, (P + 1) * kDeg, rule, full[static_cast<std::size_t>(P)].data());
    }
    const CVector s = source.mode_series(k);
    CVector r(s.size());
    CVector w;
    for (int i = N; i >= 0; --i) {
      const int m = N - i;
      w.assign(static_cast<std::size_t>(m + 1), Complex{});
      if (m > 0 && m < kDeg) {
        panel_weights(kernel, 0, m, 0.0, m, rule, w.data());
      } else if (m >= kDeg) {
        const int nf = m / kDeg;
        for (int P = 0; P < nf; ++P) {
          for (int q = 0; q <= kDeg; ++q) w[static_cast<std::size_t>(P * kDeg + q)] += full[static_cast<std::size_t>(P)][static_cast<std::size_t>(q)];
        }
        if (m > nf * kDeg) panel_weights(kernel, m - kDeg, kDeg, nf * kDeg, m, rule, w.data() + (m - kDeg));
      }
      const Complex diag = 1.0 + w[0];
      if (std::abs(diag) < 1e-8) {
        throw NumericalError("solve_direct_backward: diagonal entry below 1e-8 at mode " + std::to_string(k) +
                             "; reduce the time step");
      }
      Complex acc = s[static_cast<std::size_t>(i)];
      for (int j = 1; j <= m; ++j) acc -= w[static_cast<std::size_t>(j)] * r[static_cast<std::size_t>(i + j)];
      r[static_cast<std::size_t>(i)] = acc / diag;
    }
    solved[idx] = std::move(r);
  });
  for (std::size_t idx = 0; idx < modes.size(); ++idx) out.set_mode_series(modes[idx], solved[idx]);
  return out;
}

}  // namespace

DensityHistory solve_direct_backward(const ModelConfig& model, const Equilibrium& eq, const SourceHistory& source,
                                     VolterraScheme scheme) {
  if (source.grid().steps < 1) throw ConfigError("volterra: source needs at least one time step");
  if (scheme == VolterraScheme::ProductLagrange) return solve_product(model, eq, source);
  return solve_direct_backward(model, VolterraKernels::build(model, eq, source.lattice(), source.grid()), source);
}

DensityHistory solve_direct_backward(const ModelConfig& model, const VolterraKernels& kernels,
                                     const SourceHistory& source) {
  check_source(source, kernels.grid);
  const Lattice lat = source.lattice();
  DensityHistory out(lat, source.grid());
  set_mean_mode(model, source, out);
  std::vector<int> modes;
  for (int k = -lat.kmax; k <= lat.kmax; ++k) {
    if (k != 0) modes.push_back(k);
  }
  std::vector<CVector> solved(modes.size());
  parallel_for(modes.size(), [&](std::size_t idx) {
    const int k = modes[idx];
    const auto it = kernels.weights.find(k);
    if (it == kernels.weights.end()) throw ConfigError("solve_direct_backward: no kernel for mode " + std::to_string(k));
    const CVector& w = it->second;
    const CVector s = reversed(source.mode_series(k));
    const Complex diag = 1.0 + w[0];
    if (std::abs(diag) < 1e-8) {
      throw NumericalError("solve_direct_backward: diagonal entry below 1e-8 at mode " + std::to_string(k) +
                           "; reduce the time step");
    }
    CVector r(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) {
      Complex acc = s[n];
      for (std::size_t i = 0; i < n; ++i) acc -= w[n - i] * r[i];
      r[n] = acc / diag;
    }
    solved[idx] = reversed(r);
  });
  for (std::size_t idx = 0; idx < modes.size(); ++idx) out.set_mode_series(modes[idx], solved[idx]);
  return out;
}

DensityHistory solve_resolvent(const ModelConfig& model, const SourceHistory& source,
                               const std::map<int, ResolventTable>& tables) {
  const Lattice lat = source.lattice();
  DensityHistory out(lat, source.grid());
  set_mean_mode(model, source, out);
  std::vector<int> modes;
  for (int k = -lat.kmax; k <= lat.kmax; ++k) {
    if (k == 0) continue;
    const auto it = tables.find(k);
    if (it == tables.end()) throw ConfigError("solve_resolvent: missing resolvent table for mode " + std::to_string(k));
    if (!(it->second.grid == source.grid()) || it->second.resolvent_weights.empty()) {
      throw ConfigError("solve_resolvent: table for mode " + std::to_string(k) + " does not match the source grid");
    }
    modes.push_back(k);
  }
  std::vector<CVector> solved(modes.size());
  parallel_for(modes.size(), [&](std::size_t idx) {
    const CVector& w = tables.at(modes[idx]).resolvent_weights;
    const CVector s = reversed(source.mode_series(modes[idx]));
    CVector r(s.size());
    for (std::size_t n = 0; n < s.size(); ++n) {
      Complex acc = s[n];
      for (std::size_t i = 0; i <= n; ++i) acc += w[n - i] * s[i];
      r[n] = acc;
    }
    solved[idx] = reversed(r);
  });
  for (std::size_t idx = 0; idx < modes.size(); ++idx) out.set_mode_series(modes[idx], solved[idx]);
  return out;
}

double volterra_residual(const VolterraKernels& kernels, const SourceHistory& source, const DensityHistory& density) {
  double worst = 0.0;
  const int kmax = source.lattice().kmax;
  for (int k = -kmax; k <= kmax; ++k) {
    if (k == 0) continue;
    const CVector& w = kernels.weights.at(k);
    const CVector s = reversed(source.mode_series(k));
    const CVector r = reversed(density.mode_series(k));
    double res = 0.0, ref = 0.0;
    for (std::size_t n = 0; n < s.size(); ++n) {
      Complex acc = r[n] - s[n];
      for (std::size_t i = 0; i <= n; ++i) acc += w[n - i] * r[i];
      res += std::norm(acc);
      ref += std::norm(s[n]);
    }
    if (ref > 0.0) worst = std::max(worst, std::sqrt(res / ref));
    else worst = std::max(worst, std::sqrt(res));
  }
  return worst;
}

NormTransfer estimate_density_norm_transfer(const SourceHistory& source, const DensityHistory& density,
                                            const GevreyWeight& w) {
  NormTransfer nt;
  nt.density_norm = norm_N2(density, w);
  nt.source_norm = norm_N2(source, w);
  nt.ratio = nt.source_norm > 0.0 ? nt.density_norm / nt.source_norm : 1.0;
  return nt;
}

}  // namespace kinscat
