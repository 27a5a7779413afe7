#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <kinscat/gevrey.hpp>
#include <kinscat/kinetic.hpp>
#include <kinscat/model.hpp>
#include <kinscat/scattering.hpp>

namespace kinscat::app {

/// Every setting of a run; defaults are the documented desk-scale values.
struct RunConfig {
  // model
  std::string model_preset = "vp";
  double model_beta = -1.0;  // negative keeps the preset value
  int model_h_order = 12;
  // equilibrium
  std::string eq_kind = "maxwellian";
  double eq_v0 = 1.0;
  double eq_width = 1.0;
  double eq_nb = 0.1;
  double eq_vb = 4.5;
  double eq_sigma_b = 0.5;
  double eq_lambda = 4.0;
  // grid
  int grid_kmax = 4;
  double grid_deta = 0.125;
  double grid_hmax = 70.0;
  double grid_dt = 0.05;
  double grid_T = 16.0;
  // weight
  GevreyWeight gevrey;
  // datum: "k:amplitude" entries separated by commas
  std::string datum_modes = "1:1e-3";
  double datum_width = 1.0;
  // penrose
  int penrose_kscan = 8;
  double penrose_omega_max = 50.0;
  int penrose_samples = 2001;
  bool penrose_require_stable = true;
  // kernel
  std::string kernel_modes = "1,2,3";
  double kernel_omega_max = 60.0;
  // damp
  int damp_kmax = 2;
  double damp_T = 30.0;
  double damp_epsilon = 1e-4;
  double damp_fit_start = 5.0;
  double damp_fit_end = 25.0;
  // scatter
  double scatter_tol = 1e-9;
  int scatter_max_iters = 25;
  double scatter_eps_max = 0.05;
  std::string scatter_volterra = "product";
  double scatter_contraction_factor = 0.9;
  double scatter_report_factor = 0.9;
  double scatter_ball_factor = 10.0;
  // poisson
  double poisson_tol = 1e-15;
  int poisson_max_iters = 50;
  double poisson_amplitude = 1e-2;
  // run
  std::string output_dir = ".";
  int threads = 1;
};

/// Reads `key = value` lines; `#` starts a comment. Unknown keys, malformed
/// lines and bad values throw ConfigError naming the line.
RunConfig parse_config_text(std::string_view text, const std::string& origin = "<text>");
RunConfig parse_config(const std::filesystem::path& path);

/// Applies one `key = value` assignment.
void set_key(RunConfig& cfg, const std::string& key, const std::string& value);

/// All keys with their current values, in documentation order.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg);
/// Key list with defaults and one-line descriptions for --help.
std::string config_reference();

/// Collects every hypothesis or grid violation; throws one ConfigError listing them all.
void validate(const RunConfig& cfg);

ModelConfig build_model(const RunConfig& cfg);
Equilibrium build_equilibrium(const RunConfig& cfg);
ScatteringGrids build_grids(const RunConfig& cfg);
AsymptoticDatum build_datum(const RunConfig& cfg);
std::vector<int> parse_mode_list(const std::string& text);

/// Shortest round-trip text for a double.
std::string format_double(double v);

}  // namespace kinscat::app
