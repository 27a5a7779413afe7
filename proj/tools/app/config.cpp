#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <kinscat/errors.hpp>

namespace kinscat::app {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a real number, got '" + v + "'");
  }
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

struct Entry {
  const char* key;
  const char* help;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class Access>
Entry real(const char* key, const char* help, Access access) {
  return {key, help, [=](RunConfig& c, const std::string& v) { access(c) = to_double(key, v); },
          [=](const RunConfig& c) { return format_double(access(c)); }};
}

template <class Access>
Entry integer(const char* key, const char* help, Access access) {
  return {key, help, [=](RunConfig& c, const std::string& v) { access(c) = to_int(key, v); },
          [=](const RunConfig& c) { return std::to_string(access(c)); }};
}

template <class Access>
Entry boolean(const char* key, const char* help, Access access) {
  return {key, help, [=](RunConfig& c, const std::string& v) { access(c) = to_bool(key, v); },
          [=](const RunConfig& c) { return std::string(access(c) ? "true" : "false"); }};
}

template <class Access>
Entry text(const char* key, const char* help, Access access) {
  return {key, help, [=](RunConfig& c, const std::string& v) { access(c) = v; },
          [=](const RunConfig& c) { return std::string(access(c)); }};
}

#define KS_FIELD(member) [](auto& c) -> auto& { return c.member; }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> list = {
      text("model.preset", "vp | screened | vpme", KS_FIELD(model_preset)),
      real("model.beta", "screening constant; negative keeps the preset value", KS_FIELD(model_beta)),
      integer("model.h_order", "truncation order of the h series", KS_FIELD(model_h_order)),
      text("equilibrium.kind", "maxwellian | two_stream | bump_on_tail", KS_FIELD(eq_kind)),
      real("equilibrium.v0", "two-stream beam velocity", KS_FIELD(eq_v0)),
      real("equilibrium.width", "two-stream beam width", KS_FIELD(eq_width)),
      real("equilibrium.nb", "bump density", KS_FIELD(eq_nb)),
      real("equilibrium.vb", "bump velocity", KS_FIELD(eq_vb)),
      real("equilibrium.sigma_b", "bump width", KS_FIELD(eq_sigma_b)),
      real("equilibrium.lambda", "analyticity strip of mu_hat", KS_FIELD(eq_lambda)),
      integer("grid.kmax", "largest Fourier mode", KS_FIELD(grid_kmax)),
      real("grid.deta", "eta spacing", KS_FIELD(grid_deta)),
      real("grid.hmax", "eta half-width; must reach kmax * T + 6 * datum.width", KS_FIELD(grid_hmax)),
      real("grid.dt", "time step", KS_FIELD(grid_dt)),
      real("grid.T", "horizon", KS_FIELD(grid_T)),
      real("gevrey.gamma", "Gevrey exponent, in (1/3, 1)", KS_FIELD(gevrey.gamma)),
      real("gevrey.sigma", "Sobolev index, > 10 + d", KS_FIELD(gevrey.sigma)),
      real("gevrey.b", "time weight exponent, > 10", KS_FIELD(gevrey.b)),
      integer("gevrey.M", "velocity moments, > d/2 and <= 4", KS_FIELD(gevrey.M)),
      real("gevrey.lambda_inf", "asymptotic Gevrey radius", KS_FIELD(gevrey.lambda_inf)),
      real("gevrey.C", "radius loss: lambda(t) = lambda_inf - C <t>^-delta", KS_FIELD(gevrey.c_decay)),
      real("gevrey.delta", "radius loss exponent, in (0, 1)", KS_FIELD(gevrey.delta)),
      text("datum.modes", "comma list of k:amplitude", KS_FIELD(datum_modes)),
      real("datum.width", "eta-profile width of the datum", KS_FIELD(datum_width)),
      integer("penrose.k_scan", "modes scanned explicitly", KS_FIELD(penrose_kscan)),
      real("penrose.omega_max", "frequency cutoff", KS_FIELD(penrose_omega_max)),
      integer("penrose.samples", "frequency samples per mode", KS_FIELD(penrose_samples)),
      boolean("penrose.require_stable", "exit 2 when unstable", KS_FIELD(penrose_require_stable)),
      text("kernel.modes", "comma list of modes to tabulate", KS_FIELD(kernel_modes)),
      real("kernel.omega_max", "inverse Laplace frequency cutoff", KS_FIELD(kernel_omega_max)),
      integer("damp.kmax", "largest mode of the forward run", KS_FIELD(damp_kmax)),
      real("damp.T", "forward horizon", KS_FIELD(damp_T)),
      real("damp.epsilon", "perturbation amplitude", KS_FIELD(damp_epsilon)),
      real("damp.fit_start", "start of the rate fit window", KS_FIELD(damp_fit_start)),
      real("damp.fit_end", "end of the rate fit window", KS_FIELD(damp_fit_end)),
      real("scatter.tol", "relative distance between iterates", KS_FIELD(scatter_tol)),
      integer("scatter.max_iters", "iteration cap", KS_FIELD(scatter_max_iters)),
      real("scatter.eps_max", "largest datum amplitude attempted", KS_FIELD(scatter_eps_max)),
      text("scatter.volterra", "product | convolution | resolvent", KS_FIELD(scatter_volterra)),
      real("scatter.contraction_factor", "lambda_inf factor of the contraction norm", KS_FIELD(scatter_contraction_factor)),
      real("scatter.report_factor", "lambda(0) factor of the field-decay weight", KS_FIELD(scatter_report_factor)),
      real("scatter.ball_factor", "iterate N1 bound in units of the datum norm", KS_FIELD(scatter_ball_factor)),
      real("poisson.tol", "Picard stopping distance", KS_FIELD(poisson_tol)),
      integer("poisson.max_iters", "Picard iteration cap", KS_FIELD(poisson_max_iters)),
      real("poisson.amplitude", "manufactured potential amplitude", KS_FIELD(poisson_amplitude)),
      text("output.dir", "output directory", KS_FIELD(output_dir)),
      integer("run.threads", "worker threads", KS_FIELD(threads)),
  };
  return list;
}

#undef KS_FIELD

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc() ? std::string(buf, ptr) : std::to_string(v);
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& e : entries()) {
    if (key == e.key) {
      e.set(cfg, value);
      return;
    }
  }
  throw ConfigError("unknown key '" + key + "'");
}

RunConfig parse_config_text(std::string_view text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw ConfigError(where + "missing key");
    try {
      set_key(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : entries()) out.emplace_back(e.key, e.get(cfg));
  return out;
}

std::string config_reference() {
  const RunConfig defaults;
  std::ostringstream os;
  os << "Config keys (key = default  # meaning):\n";
  for (const auto& e : entries()) os << "  " << e.key << " = " << e.get(defaults) << "  # " << e.help << "\n";
  return os.str();
}

std::vector<int> parse_mode_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(to_int("mode list", t));
  }
  return out;
}

namespace {

std::vector<std::pair<int, Complex>> parse_datum_modes(const std::string& text) {
  std::vector<std::pair<int, Complex>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) continue;
    const auto colon = t.find(':');
    if (colon == std::string::npos) throw ConfigError("datum.modes: expected k:amplitude, got '" + t + "'");
    const int k = to_int("datum.modes", trim(std::string_view(t).substr(0, colon)));
    const double a = to_double("datum.modes", trim(std::string_view(t).substr(colon + 1)));
    out.emplace_back(k, Complex(a, 0.0));
  }
  return out;
}

}  // namespace

void validate(const RunConfig& cfg) {
  std::vector<std::string> issues;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) issues.push_back(msg);
  };
  check(cfg.model_preset == "vp" || cfg.model_preset == "screened" || cfg.model_preset == "vpme",
        "model.preset must be vp, screened or vpme");
  check(cfg.model_h_order >= 2 && cfg.model_h_order <= PowerSeries::kStoredOrder, "model.h_order must lie in [2, 64]");
  check(cfg.eq_kind == "maxwellian" || cfg.eq_kind == "two_stream" || cfg.eq_kind == "bump_on_tail",
        "equilibrium.kind must be maxwellian, two_stream or bump_on_tail");
  check(cfg.eq_lambda > 0.0, "equilibrium.lambda must be positive");
  check(cfg.eq_width > 0.0 && cfg.eq_sigma_b > 0.0, "equilibrium widths must be positive");
  check(cfg.eq_nb >= 0.0 && cfg.eq_nb < 1.0, "equilibrium.nb must lie in [0, 1)");

  const auto& w = cfg.gevrey;
  const int d = 1;
  check(w.gamma > 1.0 / 3.0 && w.gamma < 1.0,
        "gevrey.gamma = " + format_double(w.gamma) + " violates the hypothesis gamma in (1/3, 1)");
  check(w.sigma > 10.0 + d, "gevrey.sigma = " + format_double(w.sigma) + " violates the hypothesis sigma > 10 + d");
  check(w.b > 10.0, "gevrey.b = " + format_double(w.b) + " violates the hypothesis b > 10");
  check(2 * w.M > d, "gevrey.M = " + std::to_string(w.M) + " violates the hypothesis M > d/2");
  check(w.M <= 4, "gevrey.M > 4 is not supported by the eta-difference stencils");
  check(w.c_decay > 0.0, "gevrey.C must be positive");
  check(w.delta > 0.0 && w.delta < 1.0, "gevrey.delta must lie in (0, 1)");
  check(w.lambda_inf - w.c_decay > 0.0, "gevrey: lambda(0) = lambda_inf - C must be positive");

  check(cfg.grid_kmax >= 1, "grid.kmax must be at least 1");
  check(cfg.grid_deta > 0.0 && cfg.grid_dt > 0.0 && cfg.grid_T > 0.0, "grid.deta, grid.dt and grid.T must be positive");
  if (cfg.grid_dt > 0.0 && cfg.grid_T > 0.0) {
    const double steps = cfg.grid_T / cfg.grid_dt;
    check(std::abs(steps - std::round(steps)) < 1e-9 * steps, "grid.T must be a multiple of grid.dt");
  }
  check(cfg.datum_width > 0.0, "datum.width must be positive");
  const double need = cfg.grid_kmax * cfg.grid_T + 6.0 * cfg.datum_width;
  check(cfg.grid_hmax >= need, "grid.hmax = " + format_double(cfg.grid_hmax) + " must be >= kmax * T + 6 * datum.width = " +
                                   format_double(need) + " (the density trace walks out to eta = k t)");
  try {
    for (const auto& [k, a] : parse_datum_modes(cfg.datum_modes)) {
      check(k != 0, "datum.modes: mode 0 would give the datum a nonzero mean");
      check(std::abs(k) <= cfg.grid_kmax, "datum.modes: mode " + std::to_string(k) + " outside grid.kmax");
    }
  } catch (const ConfigError& e) {
    issues.emplace_back(e.what());
  }
  try {
    for (int k : parse_mode_list(cfg.kernel_modes)) check(k != 0, "kernel.modes: mode 0 has no kernel");
  } catch (const ConfigError& e) {
    issues.emplace_back(e.what());
  }
  check(cfg.penrose_kscan >= 1 && cfg.penrose_samples >= 16 && cfg.penrose_omega_max > 0.0,
        "penrose: need k_scan >= 1, samples >= 16 and omega_max > 0");
  check(cfg.damp_kmax >= 1 && cfg.damp_T > 0.0 && cfg.damp_fit_start < cfg.damp_fit_end,
        "damp: need kmax >= 1, T > 0 and fit_start < fit_end");
  check(cfg.scatter_volterra == "product" || cfg.scatter_volterra == "convolution" ||
            cfg.scatter_volterra == "resolvent",
        "scatter.volterra must be product, convolution or resolvent");
  check(cfg.scatter_contraction_factor > 0.0 && cfg.scatter_contraction_factor < 1.0,
        "scatter.contraction_factor must lie in (0, 1)");
  check(cfg.scatter_tol > 0.0 && cfg.scatter_max_iters >= 1, "scatter: need tol > 0 and max_iters >= 1");
  check(cfg.poisson_max_iters >= 1 && cfg.poisson_tol > 0.0, "poisson: need max_iters >= 1 and tol > 0");
  check(cfg.threads >= 1, "run.threads must be at least 1");

  if (!issues.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& s : issues) msg += "\n  - " + s;
    throw ConfigError(msg);
  }
}

ModelConfig build_model(const RunConfig& cfg) {
  ModelConfig m = make_preset(cfg.model_preset);
  if (cfg.model_beta >= 0.0) m.beta = cfg.model_beta;
  m.h_order = cfg.model_h_order;
  m.validate();
  return m;
}

Equilibrium build_equilibrium(const RunConfig& cfg) {
  if (cfg.eq_kind == "maxwellian") return Equilibrium::maxwellian(cfg.eq_lambda);
  if (cfg.eq_kind == "two_stream") return Equilibrium::two_stream(cfg.eq_v0, cfg.eq_width, cfg.eq_lambda);
  if (cfg.eq_kind == "bump_on_tail") {
    return Equilibrium::bump_on_tail(cfg.eq_nb, cfg.eq_vb, cfg.eq_sigma_b, cfg.eq_lambda);
  }
  throw ConfigError("unknown equilibrium.kind '" + cfg.eq_kind + "'");
}

ScatteringGrids build_grids(const RunConfig& cfg) {
  ScatteringGrids g;
  g.lattice = Lattice{cfg.grid_kmax};
  g.eta = EtaGrid::covering(cfg.grid_hmax, cfg.grid_deta);
  g.time = TimeGrid{cfg.grid_dt, static_cast<int>(std::lround(cfg.grid_T / cfg.grid_dt))};
  return g;
}

AsymptoticDatum build_datum(const RunConfig& cfg) {
  return AsymptoticDatum::gaussian(parse_datum_modes(cfg.datum_modes), cfg.datum_width);
}

}  // namespace kinscat::app
