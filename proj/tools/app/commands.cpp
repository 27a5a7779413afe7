#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <kinscat/dispersion.hpp>
#include <kinscat/errors.hpp>
#include <kinscat/field.hpp>
#include <kinscat/kinetic.hpp>
#include <kinscat/parallel.hpp>
#include <kinscat/scattering.hpp>

#ifndef KINSCAT_VERSION
#define KINSCAT_VERSION "unknown"
#endif

namespace kinscat::app {

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

std::filesystem::path out_dir(const RunConfig& cfg) {
  std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

PoissonOptions poisson_options(const RunConfig& cfg) {
  PoissonOptions p;
  p.tol = cfg.poisson_tol;
  p.max_iters = cfg.poisson_max_iters;
  return p;
}

/// Columns t, weighted_norm, |E(t, k)| for k = 1..kmax.
void write_efield_csv(const std::filesystem::path& path, const ModeHistory& efield,
                      const std::vector<std::pair<double, double>>& weighted) {
  auto out = open_out(path);
  const int kmax = efield.lattice().kmax;
  out << "t,weighted_norm";
  for (int k = 1; k <= kmax; ++k) out << ",abs_E_k" << k;
  out << "\n";
  for (int j = 0; j < efield.grid().points(); ++j) {
    out << csv_number(efield.grid().t(j)) << "," << csv_number(weighted[static_cast<std::size_t>(j)].second);
    for (int k = 1; k <= kmax; ++k) out << "," << csv_number(std::abs(efield.at(j, k)));
    out << "\n";
  }
}

/// Penrose scan on the grid's modes; returns false when unstable.
bool penrose_preflight(const ModelConfig& model, const Equilibrium& eq, const RunConfig& cfg, std::ostream& log) {
  const PenroseReport r = penrose_scan(model, eq, cfg.penrose_kscan, cfg.penrose_omega_max, cfg.penrose_samples);
  log << "penrose preflight: kappa0 = " << r.kappa0 << (r.stable ? " (stable)" : " (UNSTABLE)") << "\n";
  return r.stable;
}

int cmd_penrose(const RunConfig& cfg, std::ostream& log) {
  const auto dir = out_dir(cfg);
  const ModelConfig model = build_model(cfg);
  const Equilibrium eq = build_equilibrium(cfg);
  const PenroseReport r = penrose_scan(model, eq, cfg.penrose_kscan, cfg.penrose_omega_max, cfg.penrose_samples);
  auto out = open_out(dir / "penrose.csv");
  out << "k,omega_argmin,abs_D_min,winding,tail_bound,stable\n";
  int total = 0;
  for (const auto& m : r.modes) {
    total += m.winding;
    out << m.k << "," << csv_number(m.omega_argmin) << "," << csv_number(m.abs_min) << "," << m.winding << ","
        << csv_number(r.tail_bound) << "," << ((m.winding == 0 && m.abs_min > 0.0) ? "true" : "false") << "\n";
  }
  out << "all," << csv_number(r.argmin_tau.imag()) << "," << csv_number(r.kappa0) << "," << total << ","
      << csv_number(r.tail_bound) << "," << (r.stable ? "true" : "false") << "\n";
  log << "penrose: kappa0 = " << r.kappa0 << " at k = " << r.argmin_k << ", omega = " << r.argmin_tau.imag()
      << "; tail bound " << r.tail_bound << ", frequency bound " << r.frequency_bound
      << (r.conclusive ? "" : " (inconclusive: bounds exceed kappa0)") << "\n";
  log << "penrose: " << (r.stable ? "stable" : "UNSTABLE") << "\n";
  return (!r.stable && cfg.penrose_require_stable) ? kExitHypothesis : kExitOk;
}

int cmd_kernel(const RunConfig& cfg, std::ostream& log) {
  const auto dir = out_dir(cfg);
  const ModelConfig model = build_model(cfg);
  const Equilibrium eq = build_equilibrium(cfg);
  const ScatteringGrids g = build_grids(cfg);
  KhatOptions opts;
  opts.omega_max = cfg.kernel_omega_max;
  for (int k : parse_mode_list(cfg.kernel_modes)) {
    const ResolventTable t = inverse_laplace_Khat(model, eq, k, g.time, opts);
    auto out = open_out(dir / ("kernel_k" + std::to_string(k) + ".csv"));
    out << "t,re_K,im_K,abs_K\n";
    for (std::size_t j = 0; j < t.times.size(); ++j) {
      out << csv_number(t.times[j]) << "," << csv_number(t.values[j].real()) << "," << csv_number(t.values[j].imag())
          << "," << csv_number(std::abs(t.values[j])) << "\n";
    }
    log << "kernel k = " << k << ": lambda1 = " << t.fit_lambda1 << ", C = " << t.fit_C << ", R^2 = " << t.fit_r2
        << ", contour Re = " << t.contour_re << (t.contour_fallback ? " (fallback)" : "")
        << ", truncation bound " << t.truncation_bound << "\n";
  }
  return kExitOk;
}

int cmd_damp(const RunConfig& cfg, std::ostream& log) {
  const auto dir = out_dir(cfg);
  const ModelConfig model = build_model(cfg);
  const Equilibrium eq = build_equilibrium(cfg);
  const Lattice lat{cfg.damp_kmax};
  const EtaGrid eta = EtaGrid::covering(cfg.damp_kmax * cfg.damp_T + 6.0 * cfg.datum_width, cfg.grid_deta);
  const TimeGrid grid{cfg.grid_dt, static_cast<int>(std::lround(cfg.damp_T / cfg.grid_dt))};
  AsymptoticDatum shape = build_datum(cfg);
  if (!(shape.amplitude > 0.0)) throw ConfigError("damp: datum.modes must carry a nonzero amplitude");
  const AsymptoticDatum init = shape.scaled(cfg.damp_epsilon / shape.amplitude);
  const SpectralState s0 = init.sample(lat, eta, 0.0);
  const IntegrationResult r =
      integrate(s0, self_consistent_fields(model, cfg.gevrey, true, poisson_options(cfg)), Direction::Forward, grid, eq);

  ModeHistory potential(lat, grid);
  for (int j = 0; j < grid.points(); ++j) {
    ModeField q = density_trace(r.states[static_cast<std::size_t>(j)]);
    if (model.beta == 0.0) q[0] = {};
    potential.slice(j) = poisson_fixed_point(model, q, cfg.gevrey, grid.t(j), poisson_options(cfg)).u_hat;
  }
  const ModeHistory efield = electric_history(potential);
  const double lambda_bar = cfg.scatter_report_factor * lambda_of_t(cfg.gevrey, 0.0);
  write_efield_csv(dir / "efield.csv", efield, weighted_field_series(efield, cfg.gevrey, lambda_bar));

  std::vector<double> ts, mags;
  for (int j = 0; j < grid.points(); ++j) {
    ts.push_back(grid.t(j));
    mags.push_back(std::abs(efield.at(j, 1)));
  }
  const DecayFit fit = fit_exponential_envelope(ts, mags, cfg.damp_fit_start, cfg.damp_fit_end);
  log << "damp: |E(t,1)| decay rate " << fit.rate << " (R^2 = " << fit.r2 << ", " << fit.points << " peaks)\n";
  try {
    const Complex root = find_dispersion_root(model, eq, 1, Complex(-0.5, 2.0));
    const double expected = -root.real();
    log << "damp: dispersion root tau = " << root.real() << " + " << root.imag() << "i, relative deviation "
        << std::abs(fit.rate - expected) / expected << "\n";
  } catch (const NumericalError& e) {
    log << "damp: dispersion root not located (" << e.what() << ")\n";
  }
  log << "damp: mass drift " << r.mass_drift << ", reality defect " << r.max_reality_defect << "\n";
  return kExitOk;
}

struct ScatterSetup {
  ModelConfig model;
  Equilibrium eq;
  ScatteringGrids grids;
  AsymptoticDatum datum;
  ScatteringOptions opts;
  std::map<int, ResolventTable> tables;
};

ScatterSetup make_scatter_setup(const RunConfig& cfg) {
  ScatterSetup s{build_model(cfg), build_equilibrium(cfg), build_grids(cfg), build_datum(cfg), {}, {}};
  s.opts.tol = cfg.scatter_tol;
  s.opts.max_iters = cfg.scatter_max_iters;
  s.opts.eps_max = cfg.scatter_eps_max;
  s.opts.contraction_lambda_factor = cfg.scatter_contraction_factor;
  s.opts.report_lambda_factor = cfg.scatter_report_factor;
  s.opts.ball_factor = cfg.scatter_ball_factor;
  s.opts.map.poisson = poisson_options(cfg);
  if (cfg.scatter_volterra == "resolvent") {
    s.opts.map.volterra = VolterraPath::Resolvent;
  } else if (cfg.scatter_volterra == "convolution") {
    s.opts.map.volterra = VolterraPath::DirectConvolution;
  } else {
    s.opts.map.volterra = VolterraPath::DirectProduct;
  }
  return s;
}

int run_scatter(const RunConfig& cfg, std::ostream& log, bool roundtrip) {
  const auto dir = out_dir(cfg);
  ScatterSetup s = make_scatter_setup(cfg);
  if (!penrose_preflight(s.model, s.eq, cfg, log)) {
    log << "scatter: equilibrium violates the Penrose condition; no scattering solve attempted\n";
    return kExitHypothesis;
  }
  if (s.opts.map.volterra == VolterraPath::Resolvent) {
    s.tables = build_resolvent_tables(s.model, s.eq, s.grids.lattice.kmax, s.grids.time);
    s.opts.map.tables = &s.tables;
  }
  const ScatteringRun run = fixed_point_drive(s.datum, s.model, s.eq, cfg.gevrey, s.grids, s.opts);
  {
    auto out = open_out(dir / "iterates.csv");
    out << "iter,N1,N2,distance,ratio\n";
    for (const auto& r : run.records) {
      out << r.iter << "," << csv_number(r.n1) << "," << csv_number(r.n2) << "," << csv_number(r.distance) << ","
          << csv_number(r.ratio) << "\n";
      log << "scatter: iter " << r.iter << " N1 = " << r.n1 << " N2 = " << r.n2 << " distance = " << r.distance
          << " ratio = " << r.ratio << "\n";
    }
  }
  write_efield_csv(dir / "efield.csv", run.efield, run.efield_decay);
  write_state_csv(dir / "g0_state.csv", run.g0);
  log << "scatter: field decay fit log||AE|| = log C - c <t>^gamma: c = " << run.fitted_decay.c
      << ", R^2 = " << run.fitted_decay.r2 << "\n";
  if (!run.converged) {
    log << "scatter: no convergence after " << run.records.size() << " iterations (distance " << run.residual << ")\n";
    return kExitNumerical;
  }
  log << "scatter: converged after " << run.records.size() << " iterations\n";
  if (run.truncations > 0) log << "scatter: warning: " << run.truncations << " trace evaluations left the eta grid\n";
  if (!roundtrip) return kExitOk;

  const RoundTripReport rt = roundtrip_check(run, s.datum, s.model, s.eq, cfg.gevrey, s.grids);
  auto out = open_out(dir / "roundtrip.csv");
  out << "t,profile_distance\n";
  for (const auto& [t, d] : rt.profile_error_series) out << csv_number(t) << "," << csv_number(d) << "\n";
  log << "roundtrip: sup error at T = " << rt.sup_error << ", largest rise over the final quarter "
      << rt.final_quarter_increase << "\n";
  return kExitOk;
}

int cmd_poisson(const RunConfig& cfg, std::ostream& log) {
  const auto dir = out_dir(cfg);
  const ModelConfig model = build_model(cfg);
  const Lattice lat{cfg.grid_kmax};
  // Manufactured potential U*(x) = a cos x + (a/2) sin 2x.
  ModeField u_exact(lat);
  const double a = cfg.poisson_amplitude;
  u_exact[1] = u_exact[-1] = a / 2.0;
  if (lat.contains(2)) {
    u_exact[2] = Complex(0.0, -a / 4.0);
    u_exact[-2] = Complex(0.0, a / 4.0);
  }
  ModeField q(lat);
  for (int k = -lat.kmax; k <= lat.kmax; ++k) q[k] = (model.beta + static_cast<double>(k) * k) * u_exact[k];
  if (!model.h.is_zero()) q += h_of_field(model, u_exact, model.h_order);
  const FieldSnapshot snap = poisson_fixed_point(model, q, cfg.gevrey, 0.0, poisson_options(cfg));
  double num = 0.0, den = 0.0;
  auto out = open_out(dir / "poisson.csv");
  out << "k,re_U,im_U,re_exact,im_exact\n";
  for (int k = -lat.kmax; k <= lat.kmax; ++k) {
    num += std::norm(snap.u_hat[k] - u_exact[k]);
    den += std::norm(u_exact[k]);
    out << k << "," << csv_number(snap.u_hat[k].real()) << "," << csv_number(snap.u_hat[k].imag()) << ","
        << csv_number(u_exact[k].real()) << "," << csv_number(u_exact[k].imag()) << "\n";
  }
  const double rel = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  log << "poisson: relative error " << rel << " after " << snap.iters << " iterations (contraction ratio "
      << snap.contraction_ratio << ")\n";
  return kExitOk;
}

}  // namespace

void write_state_csv(const std::filesystem::path& path, const SpectralState& state) {
  auto out = open_out(path);
  const auto& eg = state.eta_grid();
  out << "# kmax=" << state.lattice().kmax << " deta=" << csv_number(eg.deta) << " half=" << eg.half
      << " t=" << csv_number(state.t()) << "\n";
  out << "k_index,eta_index,re,im\n";
  for (int k = -state.lattice().kmax; k <= state.lattice().kmax; ++k) {
    const auto row = state.row(k);
    for (int i = 0; i < eg.size(); ++i) {
      out << k << "," << i << "," << csv_number(row[static_cast<std::size_t>(i)].real()) << ","
          << csv_number(row[static_cast<std::size_t>(i)].imag()) << "\n";
    }
  }
}

void write_manifest(const std::filesystem::path& path, const std::string& command, const RunConfig& cfg) {
  auto out = open_out(path);
  out << "# kinscat " << KINSCAT_VERSION << "\n";
  out << "# command: " << command << "\n";
  out << "# compiler: " << __VERSION__ << "\n";
  out << "# re-run with: kinscat " << command << " --config <this file>\n";
  for (const auto& [k, v] : config_entries(cfg)) out << k << " = " << v << "\n";
}

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log, bool verbose) {
  try {
    validate(cfg);
    set_thread_count(cfg.threads);
    if (verbose) log << "kinscat " << command << ": " << cfg.threads << " thread(s), output " << cfg.output_dir << "\n";
    if (command == "selftest") return run_selftest(log);
    write_manifest(out_dir(cfg) / "manifest.txt", command, cfg);
    if (command == "penrose") return cmd_penrose(cfg, log);
    if (command == "kernel") return cmd_kernel(cfg, log);
    if (command == "damp") return cmd_damp(cfg, log);
    if (command == "scatter") return run_scatter(cfg, log, false);
    if (command == "roundtrip") return run_scatter(cfg, log, true);
    if (command == "poisson") return cmd_poisson(cfg, log);
    log << "error: unknown command '" << command << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const HypothesisError& e) {
    log << "hypothesis failure: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const NumericalError& e) {
    log << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace kinscat::app
