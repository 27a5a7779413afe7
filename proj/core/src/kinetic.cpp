#include "kinscat/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kinscat/errors.hpp"
#include "kinscat/parallel.hpp"

namespace kinscat {

AsymptoticDatum AsymptoticDatum::gaussian(std::vector<std::pair<int, Complex>> modes, double width) {
  if (!(width > 0.0)) throw ConfigError("datum: gaussian width must be positive");
  AsymptoticDatum d;
  bool mean_zero = true;
  double amp = 0.0;
  std::vector<std::pair<int, Complex>> full;
  for (const auto& [k, c] : modes) {
    amp = std::max(amp, std::abs(c));
    if (k == 0) {
      if (c != Complex{}) mean_zero = false;
      full.emplace_back(0, Complex(c.real(), 0.0));
    } else {
      full.emplace_back(k, c);
      full.emplace_back(-k, std::conj(c));
    }
  }
  d.amplitude = amp;
  d.mean_zero = mean_zero;
  const double inv = 1.0 / (width * width);
  d.evaluator = [full, inv](int k, double eta) {
    Complex acc{};
    for (const auto& [m, c] : full) {
      if (m == k) acc += c * std::exp(-0.5 * inv * eta * eta);
    }
    return acc;
  };
  return d;
}

AsymptoticDatum AsymptoticDatum::zero() {
  AsymptoticDatum d;
  d.evaluator = [](int, double) { return Complex{}; };
  return d;
}

SpectralState AsymptoticDatum::sample(const Lattice& lattice, const EtaGrid& eta, double t) const {
  SpectralState s(lattice, eta, t);
  for (int k = -lattice.kmax; k <= lattice.kmax; ++k) {
    auto row = s.row(k);
    for (int i = 0; i < eta.size(); ++i) row[static_cast<std::size_t>(i)] = (*this)(k, eta.eta(i));
  }
  if (mean_zero && std::abs(s.mass()) > 0.0) {
    throw ConfigError("datum: declared mean-zero but g_inf(0, 0) = " + std::to_string(std::abs(s.mass())));
  }
  return s;
}

AsymptoticDatum AsymptoticDatum::scaled(double s) const {
  AsymptoticDatum d = *this;
  d.amplitude = std::abs(s) * amplitude;
  d.evaluator = [base = evaluator, s](int k, double eta) { return base ? s * base(k, eta) : Complex{}; };
  return d;
}

Complex eta_interpolate(const SpectralState& state, int k, double eta, std::size_t* truncated) {
  const EtaSpline spline(state);
  const Complex v = spline.eval(k, eta);
  if (truncated) *truncated += spline.truncations();
  return v;
}

ModeField density_trace(const EtaSpline& spline, std::size_t* truncated) {
  const auto& st = spline.state();
  ModeField q(st.lattice());
  const std::size_t before = spline.truncations();
  for (int k = -st.lattice().kmax; k <= st.lattice().kmax; ++k) q[k] = spline.eval(k, k * st.t());
  if (truncated) *truncated += spline.truncations() - before;
  return q;
}

ModeField density_trace(const SpectralState& state, std::size_t* truncated) {
  return density_trace(EtaSpline(state), truncated);
}

DensityHistory density_trace_history(const std::vector<SpectralState>& states, const TimeGrid& grid,
                                     std::size_t* truncated) {
  if (static_cast<int>(states.size()) != grid.points()) {
    throw ConfigError("density_trace_history: history length does not match the time grid");
  }
  DensityHistory out(states.front().lattice(), grid);
  std::vector<std::size_t> counts(states.size(), 0);
  parallel_for(states.size(), [&](std::size_t j) {
    out.slice(static_cast<int>(j)) = density_trace(states[j], &counts[j]);
  });
  if (truncated) {
    for (auto c : counts) *truncated += c;
  }
  return out;
}

namespace {

void check_source_inputs(const std::vector<EtaSpline>& splines, const DensityHistory& density,
                         const ModeHistory& potential) {
  const auto& grid = density.grid();
  if (static_cast<int>(splines.size()) != grid.points() || !density.compatible(potential)) {
    throw ConfigError("assemble_source: histories do not share one time grid");
  }
  for (int m = 0; m < grid.points(); ++m) {
    const auto& st = splines[static_cast<std::size_t>(m)].state();
    if (std::abs(st.t() - grid.t(m)) > 1e-9 * std::max(1.0, grid.horizon()) ||
        !(st.lattice() == density.lattice())) {
      throw ConfigError("assemble_source: state " + std::to_string(m) + " does not match the grid");
    }
  }
}

}  // namespace

ModeField assemble_source(const std::vector<EtaSpline>& splines, const DensityHistory& density,
                          const ModeHistory& potential, const AsymptoticDatum& ginf, const ModelConfig& model, int j,
                          const SourceTerms& terms) {
  check_source_inputs(splines, density, potential);
  const auto& grid = density.grid();
  const Lattice lat = density.lattice();
  const int n = grid.steps;
  const double tj = grid.t(j);
  ModeField s(lat);
  for (int k = -lat.kmax; k <= lat.kmax; ++k) s[k] = ginf(k, k * tj);
  if (!model.h.is_zero()) s -= h_of_field(model, potential.slice(j), model.h_order);
  if (!terms.nonlinear || j == n) return s;
  for (int k = -lat.kmax; k <= lat.kmax; ++k) {
    if (k == 0) continue;
    Complex acc{};
    for (int l = -lat.kmax; l <= lat.kmax; ++l) {
      if (l == 0 || !lat.contains(k - l)) continue;
      const double coef = static_cast<double>(k) * l / (model.beta + static_cast<double>(l) * l);
      for (int m = j; m <= n; ++m) {
        const double wm = (m == j || m == n) ? 0.5 * grid.dt : grid.dt;
        const double sm = grid.t(m);
        const Complex rho = density.at(m, l);
        if (rho == Complex{}) continue;
        acc += wm * (sm - tj) * coef * rho * splines[static_cast<std::size_t>(m)].eval(k - l, k * tj - l * sm);
      }
    }
    s[k] -= acc;
  }
  return s;
}

SourceHistory assemble_source_history(const std::vector<EtaSpline>& splines, const DensityHistory& density,
                                      const ModeHistory& potential, const AsymptoticDatum& ginf,
                                      const ModelConfig& model, const SourceTerms& terms) {
  check_source_inputs(splines, density, potential);
  SourceHistory out(density.lattice(), density.grid());
  parallel_for(static_cast<std::size_t>(density.grid().points()), [&](std::size_t j) {
    out.slice(static_cast<int>(j)) =
        assemble_source(splines, density, potential, ginf, model, static_cast<int>(j), terms);
  });
  return out;
}

SpectralState transport_rhs(const EtaSpline& spline, const ModeField& u_linear, const ModeField& u_nonlinear,
                            const Equilibrium& eq) {
  const auto& st = spline.state();
  const Lattice lat = st.lattice();
  const EtaGrid& eg = st.eta_grid();
  const int n = eg.size();
  const double t = st.t();
  SpectralState out(lat, eg, t);
  parallel_for(static_cast<std::size_t>(lat.size()), [&](std::size_t idx) {
    const int k = lat.mode(idx);
    auto row = out.row(k);
    const Complex ul = u_linear.at_or_zero(k);
    if (k != 0 && ul != Complex{}) {
      for (int i = 0; i < n; ++i) {
        const double s = eg.eta(i) - k * t;
        row[static_cast<std::size_t>(i)] = -s * static_cast<double>(k) * ul * eq.mu_hat(s);
      }
    }
    CVector shifted(static_cast<std::size_t>(n));
    const int lmax = u_nonlinear.lattice().kmax;
    for (int l = -lmax; l <= lmax; ++l) {
      if (l == 0 || !lat.contains(k - l)) continue;
      const Complex un = u_nonlinear[l];
      if (un == Complex{}) continue;
      spline.eval_shifted(k - l, -l * t, shifted.data());
      const Complex c = static_cast<double>(l) * un;
      for (int i = 0; i < n; ++i) {
        const double s = eg.eta(i) - k * t;
        row[static_cast<std::size_t>(i)] -= s * c * shifted[static_cast<std::size_t>(i)];
      }
    }
  });
  return out;
}

SpectralState transport_rhs(const EtaSpline& spline, const FieldSnapshot& linear, const FieldSnapshot& nonlinear,
                            const Equilibrium& eq) {
  return transport_rhs(spline, linear.u_hat, nonlinear.u_hat, eq);
}

ModeField interpolate_in_time(const ModeHistory& history, double t) {
  const TimeGrid& g = history.grid();
  const int n = g.steps;
  const double x = t / g.dt;
  const double nearest = std::round(x);
  if (std::abs(x - nearest) < 1e-12 && nearest >= 0 && nearest <= n) return history.slice(static_cast<int>(nearest));
  if (x < -1e-9 || x > n + 1e-9) {
    throw ConfigError("interpolate_in_time: t = " + std::to_string(t) + " outside the history");
  }
  if (n < 3) {
    const int j = std::clamp(static_cast<int>(std::floor(x)), 0, std::max(0, n - 1));
    const double f = x - j;
    return (1.0 - f) * history.slice(j) + f * history.slice(std::min(j + 1, n));
  }
  const int start = std::clamp(static_cast<int>(std::floor(x)) - 1, 0, n - 3);
  ModeField out(history.lattice());
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b != a) w *= (x - (start + b)) / static_cast<double>(a - b);
    }
    out += w * history.slice(start + a);
  }
  return out;
}

FieldProvider history_fields(ModeHistory u_linear, ModeHistory u_nonlinear) {
  const bool has_nl = u_nonlinear.grid().points() > 0 && u_nonlinear.lattice().kmax > 0;
  return [lin = std::move(u_linear), nl = std::move(u_nonlinear), has_nl](double t, const EtaSpline&) {
    FieldPair f;
    f.linear = interpolate_in_time(lin, t);
    f.nonlinear = has_nl ? interpolate_in_time(nl, t) : ModeField(Lattice{0});
    return f;
  };
}

FieldProvider zero_fields(const Lattice& lattice) {
  return [lattice](double, const EtaSpline&) { return FieldPair{ModeField(lattice), ModeField(Lattice{0})}; };
}

FieldProvider self_consistent_fields(const ModelConfig& model, const GevreyWeight& w, bool nonlinear,
                                     const PoissonOptions& poisson) {
  return [model, w, nonlinear, poisson](double t, const EtaSpline& stage) {
    ModeField q = density_trace(stage);
    if (model.beta == 0.0) q[0] = {};
    const FieldSnapshot snap = poisson_fixed_point(model, q, w, t, poisson);
    FieldPair f;
    f.linear = snap.u_hat;
    f.nonlinear = nonlinear ? snap.u_hat : ModeField(Lattice{0});
    return f;
  };
}

IntegrationResult integrate(const SpectralState& start, const FieldProvider& fields, Direction direction,
                            const TimeGrid& grid, const Equilibrium& eq, const IntegrateOptions& opts) {
  const bool backward = direction == Direction::Backward;
  const int n = grid.steps;
  const double t0 = backward ? grid.horizon() : 0.0;
  if (std::abs(start.t() - t0) > 1e-9 * std::max(1.0, grid.horizon())) {
    throw ConfigError("integrate: start state at t = " + std::to_string(start.t()) + ", expected " +
                      std::to_string(t0));
  }
  IntegrationResult res;
  if (opts.keep_history) res.states.resize(static_cast<std::size_t>(grid.points()));
  SpectralState y = start;
  y.set_time(t0);
  const Complex mass0 = y.mass();
  res.boundary_max = y.boundary_magnitude();
  int j = backward ? n : 0;
  if (opts.keep_history) res.states[static_cast<std::size_t>(j)] = y;
  const double h = backward ? -grid.dt : grid.dt;

  auto stage = [&](const SpectralState& s) {
    const EtaSpline sp(s);
    const FieldPair f = fields(s.t(), sp);
    return transport_rhs(sp, f.linear, f.nonlinear, eq);
  };

  for (int step = 0; step < n; ++step) {
    const double t = grid.t(j);
    const int jn = backward ? j - 1 : j + 1;
    const SpectralState k1 = stage(y);
    SpectralState y2 = y;
    y2.axpy(0.5 * h, k1);
    y2.set_time(t + 0.5 * h);
    const SpectralState k2 = stage(y2);
    SpectralState y3 = y;
    y3.axpy(0.5 * h, k2);
    y3.set_time(t + 0.5 * h);
    const SpectralState k3 = stage(y3);
    SpectralState y4 = y;
    y4.axpy(h, k3);
    y4.set_time(grid.t(jn));
    const SpectralState k4 = stage(y4);

    y.axpy(h / 6.0, k1);
    y.axpy(h / 3.0, k2);
    y.axpy(h / 3.0, k3);
    y.axpy(h / 6.0, k4);
    y.set_time(grid.t(jn));

    const double sup = y.sup_norm();
    if (!std::isfinite(sup)) {
      throw BlowUpError("integrate: non-finite state at t = " + std::to_string(y.t()) +
                        "; reduce dt (currently " + std::to_string(grid.dt) + ") or the datum amplitude");
    }
    res.max_reality_defect = std::max(res.max_reality_defect, y.reality_defect());
    y.symmetrize();
    res.mass_drift = std::max(res.mass_drift, std::abs(y.mass() - mass0));
    res.boundary_max = std::max(res.boundary_max, y.boundary_magnitude());
    j = jn;
    if (opts.keep_history) res.states[static_cast<std::size_t>(j)] = y;
    ++res.steps;
  }
  res.boundary_warning = res.boundary_max > opts.boundary_tol;
  if (!opts.keep_history) res.states.push_back(y);
  return res;
}

}  // namespace kinscat
