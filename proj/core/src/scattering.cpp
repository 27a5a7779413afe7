#include "kinscat/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kinscat/errors.hpp"
#include "kinscat/parallel.hpp"
#include "kinscat/volterra.hpp"

namespace kinscat {

void ScatteringGrids::validate(double margin) const {
  if (lattice.kmax < 1) throw ConfigError("grid.kmax must be at least 1");
  if (!(time.dt > 0.0) || time.steps < 1) throw ConfigError("grid: need dt > 0 and at least one step");
  const double need = lattice.kmax * time.horizon() + margin;
  if (eta.hmax() + 1e-12 < need) {
    throw ConfigError("grid.hmax = " + std::to_string(eta.hmax()) + " is below kmax * T + margin = " +
                      std::to_string(need) + "; the density trace would leave the eta grid");
  }
}

namespace {

std::vector<EtaSpline> build_splines(const std::vector<SpectralState>& states) {
  std::vector<EtaSpline> out(states.size());
  parallel_for(states.size(), [&](std::size_t j) { out[j] = EtaSpline(states[j]); });
  return out;
}

ModeHistory potential_history(const ModelConfig& model, const DensityHistory& density) {
  ModeHistory u(density.lattice(), density.grid());
  for (int j = 0; j < density.grid().points(); ++j) u.slice(j) = potential_from_density(model, density.slice(j));
  return u;
}

}  // namespace

Iterate complete_iterate(std::vector<SpectralState> states, const ModelConfig& model, const GevreyWeight& w,
                         const TimeGrid& grid, const PoissonOptions& poisson) {
  Iterate it;
  it.states = std::move(states);
  const DensityHistory q = density_trace_history(it.states, grid, &it.truncations);
  it.density = DensityHistory(q.lattice(), grid);
  it.potential = ModeHistory(q.lattice(), grid);
  for (int j = 0; j < grid.points(); ++j) {
    ModeField qj = q.slice(j);
    if (model.beta == 0.0) qj[0] = {};
    const FieldSnapshot snap = poisson_fixed_point(model, qj, w, grid.t(j), poisson);
    it.density.slice(j) = snap.rho_hat;
    it.potential.slice(j) = snap.u_hat;
  }
  it.norms = weighted_norms(it.states, it.density, w);
  return it;
}

Iterate free_extension(const AsymptoticDatum& ginf, const ModelConfig& model, const GevreyWeight& w,
                       const ScatteringGrids& grids, const PoissonOptions& poisson) {
  std::vector<SpectralState> states(static_cast<std::size_t>(grids.time.points()));
  const SpectralState base = ginf.sample(grids.lattice, grids.eta, 0.0);
  for (int j = 0; j < grids.time.points(); ++j) {
    states[static_cast<std::size_t>(j)] = base;
    states[static_cast<std::size_t>(j)].set_time(grids.time.t(j));
  }
  return complete_iterate(std::move(states), model, w, grids.time, poisson);
}

double datum_norm(const AsymptoticDatum& ginf, const GevreyWeight& w, const ScatteringGrids& grids) {
  // state_norm carries sigma + 1 powers of the bracket.
  GevreyWeight wd = w;
  wd.sigma = w.sigma + w.b - 1.0;
  wd.c_decay = 0.0;
  return state_norm(ginf.sample(grids.lattice, grids.eta, grids.time.horizon()), wd);
}

Iterate zero_iterate(const ScatteringGrids& grids) {
  Iterate it;
  it.states.reserve(static_cast<std::size_t>(grids.time.points()));
  for (int j = 0; j < grids.time.points(); ++j) it.states.emplace_back(grids.lattice, grids.eta, grids.time.t(j));
  it.density = DensityHistory(grids.lattice, grids.time);
  it.potential = ModeHistory(grids.lattice, grids.time);
  return it;
}

Iterate apply_map_F(const Iterate& phi, const AsymptoticDatum& ginf, const ModelConfig& model, const Equilibrium& eq,
                    const GevreyWeight& w, const ScatteringGrids& grids, const MapOptions& opts) {
  const TimeGrid& grid = grids.time;
  if (static_cast<int>(phi.states.size()) != grid.points()) {
    throw ConfigError("apply_map_F: iterate does not cover the time grid");
  }
  // (1) density and field of phi.
  Iterate phi_fields = complete_iterate(phi.states, model, w, grid, opts.poisson);
  // (2) source.
  std::size_t truncations = phi_fields.truncations;
  SourceHistory source;
  {
    const std::vector<EtaSpline> splines = build_splines(phi.states);
    const ModeHistory u_for_h = opts.nonlinear ? phi_fields.potential : ModeHistory(grids.lattice, grid);
    SourceTerms terms;
    terms.nonlinear = opts.nonlinear;
    source = assemble_source_history(splines, phi_fields.density, u_for_h, ginf, model, terms);
    for (const auto& s : splines) truncations += s.truncations();
  }
  // (3) density of psi.
  DensityHistory rho;
  switch (opts.volterra) {
    case VolterraPath::Resolvent:
      if (!opts.tables) throw ConfigError("apply_map_F: resolvent path needs kernel tables");
      rho = solve_resolvent(model, source, *opts.tables);
      break;
    case VolterraPath::DirectConvolution:
      rho = solve_direct_backward(model, eq, source, VolterraScheme::ConvolutionQuadrature);
      break;
    case VolterraPath::DirectProduct:
      rho = solve_direct_backward(model, eq, source, VolterraScheme::ProductLagrange);
      break;
  }
  // (4) potential of psi.
  ModeHistory u_psi = potential_history(model, rho);
  // (5) backward transport from the datum.
  const SpectralState start = ginf.sample(grids.lattice, grids.eta, grid.horizon());
  FieldProvider fields = history_fields(u_psi, opts.nonlinear ? phi_fields.potential : ModeHistory());
  IntegrationResult flow = integrate(start, fields, Direction::Backward, grid, eq);

  Iterate psi;
  psi.states = std::move(flow.states);
  psi.density = std::move(rho);
  psi.potential = std::move(u_psi);
  psi.norms = weighted_norms(psi.states, psi.density, w);
  psi.truncations = truncations;
  if (psi.norms.n1 > opts.ball_limit) {
    throw NoContractionError("apply_map_F: iterate left the ball (N1 = " + std::to_string(psi.norms.n1) +
                             " > " + std::to_string(opts.ball_limit) + "); reduce the datum amplitude");
  }
  return psi;
}

double iterate_distance(const Iterate& a, const Iterate& b, const GevreyWeight& w) {
  if (a.states.size() != b.states.size()) throw ConfigError("iterate_distance: histories differ in length");
  std::vector<double> per(a.states.size(), 0.0);
  parallel_for(a.states.size(), [&](std::size_t j) { per[j] = state_norm(a.states[j] - b.states[j], w); });
  const double n1 = *std::max_element(per.begin(), per.end());
  DensityHistory d = a.density;
  d -= b.density;
  return n1 + norm_N2(d, w);
}

ModeHistory electric_history(const ModeHistory& potential) {
  ModeHistory e(potential.lattice(), potential.grid());
  const int kmax = potential.lattice().kmax;
  for (int j = 0; j < potential.grid().points(); ++j) {
    for (int k = -kmax; k <= kmax; ++k) e.at(j, k) = Complex(0.0, -static_cast<double>(k)) * potential.at(j, k);
  }
  return e;
}

std::vector<std::pair<double, double>> weighted_field_series(const ModeHistory& efield, const GevreyWeight& w,
                                                             double lambda_bar) {
  GevreyWeight frozen = w.with_lambda_inf(lambda_bar);
  frozen.c_decay = 0.0;
  const int kmax = efield.lattice().kmax;
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(efield.grid().points()));
  for (int j = 0; j < efield.grid().points(); ++j) {
    const double t = efield.grid().t(j);
    double acc = 0.0;
    for (int k = -kmax; k <= kmax; ++k) {
      const double mag = std::abs(efield.at(j, k));
      if (mag == 0.0) continue;
      acc += std::exp(2.0 * (log_weight_A(frozen, t, k, k * t) + std::log(mag)));
    }
    out.emplace_back(t, std::sqrt(acc));
  }
  return out;
}

LogLinearFit fit_log_linear(const std::vector<double>& x, const std::vector<double>& y) {
  LogLinearFit f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(y[i] > 0.0) || !std::isfinite(y[i])) continue;
    const double ly = std::log(y[i]);
    sx += x[i];
    sy += ly;
    sxx += x[i] * x[i];
    sxy += x[i] * ly;
    syy += ly * ly;
    ++n;
  }
  f.points = n;
  if (n < 3) return f;
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  const double cxy = sxy - sx * sy / n;
  if (!(vx > 0.0)) return f;
  const double slope = cxy / vx;
  f.c = -slope;
  f.C = std::exp((sy - slope * sx) / n);
  f.r2 = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
  return f;
}

ScatteringRun fixed_point_drive(const AsymptoticDatum& ginf, const ModelConfig& model, const Equilibrium& eq,
                                const GevreyWeight& w, const ScatteringGrids& grids, const ScatteringOptions& opts) {
  model.validate();
  w.validate(model.dimension);
  grids.validate();
  if (ginf.amplitude > opts.eps_max) {
    throw NoContractionError("fixed_point_drive: datum amplitude " + std::to_string(ginf.amplitude) +
                             " exceeds the smallness threshold " + std::to_string(opts.eps_max) +
                             "; the iteration is not expected to contract");
  }
  const GevreyWeight w_tilde = w.with_lambda_inf(opts.contraction_lambda_factor * w.lambda_inf);

  Iterate phi = free_extension(ginf, model, w, grids, opts.map.poisson);
  MapOptions map = opts.map;
  map.ball_limit = std::min(map.ball_limit, opts.ball_factor * datum_norm(ginf, w, grids));
  if (opts.zero_start) phi = zero_iterate(grids);

  ScatteringRun run;
  double prev = 0.0;
  int streak = 0;
  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    Iterate psi = apply_map_F(phi, ginf, model, eq, w, grids, map);
    const double dist = iterate_distance(psi, phi, w_tilde);
    const double scale = weighted_norms(psi.states, psi.density, w_tilde).n_total;
    const double rel = scale > 0.0 ? dist / scale : (dist > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    IterateRecord rec;
    rec.iter = iter;
    rec.n1 = psi.norms.n1;
    rec.n2 = psi.norms.n2;
    rec.distance = rel;
    if (iter > 1) {
      rec.ratio = prev > 0.0 ? dist / prev : 0.0;
      run.contraction_ratios.push_back(rec.ratio);
      streak = rec.ratio >= 1.0 ? streak + 1 : 0;
    }
    run.records.push_back(rec);
    run.truncations += psi.truncations;
    prev = dist;
    phi = std::move(psi);
    run.residual = rel;
    if (rel <= opts.tol) {
      run.converged = true;
      break;
    }
    if (streak >= opts.divergence_patience) {
      throw NoContractionError("fixed_point_drive: contraction ratio " + std::to_string(rec.ratio) + " >= 1 for " +
                               std::to_string(streak) + " iterations; reduce the datum amplitude");
    }
  }

  run.solution = std::move(phi);
  run.g0 = run.solution.states.front();
  run.efield = electric_history(run.solution.potential);
  const double lambda_bar = opts.report_lambda_factor * lambda_of_t(w, 0.0);
  run.efield_decay = weighted_field_series(run.efield, w, lambda_bar);
  const double horizon = grids.time.horizon();
  std::vector<double> xs, ys;
  for (const auto& [t, v] : run.efield_decay) {
    if (t < 0.25 * horizon - 1e-12 || t > 0.75 * horizon + 1e-12) continue;
    xs.push_back(std::pow(bracket(t), w.gamma));
    ys.push_back(v);
  }
  run.fitted_decay = fit_log_linear(xs, ys);
  return run;
}

ProfileSampler::ProfileSampler(const EtaGrid& eta, const PhysicalSampling& sampling)
    : eta_(eta), sampling_(sampling) {
  if (sampling_.nv < 1 || sampling_.nx < 1) throw ConfigError("ProfileSampler: empty sampling grid");
  const int n = eta_.size();
  const int nv = sampling_.nv;
  phase_.resize(static_cast<std::size_t>(nv) * static_cast<std::size_t>(n));
  for (int m = 0; m < nv; ++m) {
    const double v = nv == 1 ? 0.0 : -sampling_.v_max + 2.0 * sampling_.v_max * m / (nv - 1);
    for (int i = 0; i < n; ++i) {
      const double wi = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      phase_[static_cast<std::size_t>(m) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)] =
          std::polar(wi * eta_.deta / (2.0 * kPi), eta_.eta(i) * v);
    }
  }
}

std::vector<Complex> ProfileSampler::sample(const SpectralState& g) const {
  if (!(g.eta_grid() == eta_)) throw ConfigError("ProfileSampler: state on a different eta grid");
  const Lattice lat = g.lattice();
  const int n = eta_.size();
  const int nv = sampling_.nv;
  const int nx = sampling_.nx;
  std::vector<Complex> out(static_cast<std::size_t>(nv) * static_cast<std::size_t>(nx));
  parallel_for(static_cast<std::size_t>(nv), [&](std::size_t m) {
    const Complex* ph = phase_.data() + m * static_cast<std::size_t>(n);
    CVector fk(static_cast<std::size_t>(lat.size()));
    for (int k = -lat.kmax; k <= lat.kmax; ++k) {
      const auto a = g.row(k);
      Complex acc{};
      for (int i = 0; i < n; ++i) acc += a[static_cast<std::size_t>(i)] * ph[i];
      fk[lat.index(k)] = acc;
    }
    for (int jx = 0; jx < nx; ++jx) {
      const double x = 2.0 * kPi * jx / nx;
      Complex val{};
      for (int k = -lat.kmax; k <= lat.kmax; ++k) val += fk[lat.index(k)] * std::polar(1.0, k * x);
      out[m * static_cast<std::size_t>(nx) + static_cast<std::size_t>(jx)] = val;
    }
  });
  return out;
}

double ProfileSampler::distance(const SpectralState& a, const SpectralState& b) const {
  const auto sa = sample(a);
  const auto sb = sample(b);
  double best = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) best = std::max(best, std::abs(sa[i] - sb[i]));
  return best;
}

double profile_distance(const SpectralState& g, const SpectralState& ref, const PhysicalSampling& sampling) {
  const auto sa = ProfileSampler(g.eta_grid(), sampling).sample(g);
  const auto sb = ProfileSampler(ref.eta_grid(), sampling).sample(ref);
  double best = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) best = std::max(best, std::abs(sa[i] - sb[i]));
  return best;
}

RoundTripReport roundtrip_check(const ScatteringRun& run, const AsymptoticDatum& ginf, const ModelConfig& model,
                                const Equilibrium& eq, const GevreyWeight& w, const ScatteringGrids& grids,
                                const PhysicalSampling& sampling) {
  SpectralState start = run.g0;
  start.set_time(0.0);
  IntegrationResult flow;
  try {
    flow = integrate(start, self_consistent_fields(model, w, true), Direction::Forward, grids.time, eq);
  } catch (const BlowUpError& e) {
    throw BlowUpError(std::string("roundtrip_check: forward flow unstable: ") + e.what());
  }
  const SpectralState ref = ginf.sample(grids.lattice, grids.eta, grids.time.horizon());
  RoundTripReport rep;
  rep.mass_drift = flow.mass_drift;
  rep.reality_defect = flow.max_reality_defect;
  const ProfileSampler sampler(grids.eta, sampling);
  const std::vector<Complex> target = sampler.sample(ref);
  std::vector<double> d(flow.states.size());
  for (std::size_t j = 0; j < flow.states.size(); ++j) {
    const std::vector<Complex> cur = sampler.sample(flow.states[j]);
    double best = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) best = std::max(best, std::abs(cur[i] - target[i]));
    d[j] = best;
    rep.profile_error_series.emplace_back(grids.time.t(static_cast<int>(j)), d[j]);
  }
  rep.sup_error = d.back();
  const int n = grids.time.steps;
  rep.final_quarter_increase = -std::numeric_limits<double>::infinity();
  for (int j = (3 * n) / 4; j < n; ++j) {
    rep.final_quarter_increase =
        std::max(rep.final_quarter_increase, d[static_cast<std::size_t>(j + 1)] - d[static_cast<std::size_t>(j)]);
  }
  return rep;
}

}  // namespace kinscat
