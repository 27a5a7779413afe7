#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "kinscat/dispersion.hpp"
#include "kinscat/field.hpp"
#include "kinscat/gevrey.hpp"
#include "kinscat/kinetic.hpp"
#include "kinscat/model.hpp"

namespace kinscat {

/// Discretization shared by all histories of a scattering solve.
struct ScatteringGrids {
  Lattice lattice{4};
  EtaGrid eta = EtaGrid::covering(70.0, 0.125);
  TimeGrid time{0.05, 320};

  /// Throws ConfigError unless hmax >= kmax * T + margin.
  void validate(double margin = 0.0) const;
};

/// How the backward density equation is solved inside the map.
enum class VolterraPath {
  Resolvent,          // rho = S + K * S with tabulated resolvent weights
  DirectConvolution,  // triangular solve with trapezoidal CQ weights
  DirectProduct,      // triangular solve with product-Lagrange weights
};

/// One element of the iteration: profile history and its density and potential.
struct Iterate {
  std::vector<SpectralState> states;  // states[j] at t_j
  DensityHistory density;
  ModeHistory potential;
  WeightedNormReport norms;
  std::size_t truncations = 0;  // trace evaluations beyond the eta grid
};

struct MapOptions {
  /// Keep the E_phi transport term and the source convolution.
  bool nonlinear = true;
  VolterraPath volterra = VolterraPath::DirectProduct;
  /// Required by the Resolvent path.
  const std::map<int, ResolventTable>* tables = nullptr;
  PoissonOptions poisson;
  /// N1 bound on the new iterate; exceeding it throws NoContractionError.
  double ball_limit = std::numeric_limits<double>::infinity();
};

/// Iterate whose profile is the datum at every time (free extension).
Iterate free_extension(const AsymptoticDatum& ginf, const ModelConfig& model, const GevreyWeight& w,
                       const ScatteringGrids& grids, const PoissonOptions& poisson = {});
/// Datum size: sum_{j<=M} || e^{lambda_inf <k,eta>^gamma} <k,eta>^{sigma+b} d^j_eta g_inf ||_2.
double datum_norm(const AsymptoticDatum& ginf, const GevreyWeight& w, const ScatteringGrids& grids);

/// Iterate with zero profile.
Iterate zero_iterate(const ScatteringGrids& grids);
/// Density by trace and nonlinear Poisson per slice, potential and norms.
Iterate complete_iterate(std::vector<SpectralState> states, const ModelConfig& model, const GevreyWeight& w,
                         const TimeGrid& grid, const PoissonOptions& poisson = {});

/// psi = F(phi): source from phi, backward density solve, backward transport
/// with E_psi in the linear and E_phi in the nonlinear term.
Iterate apply_map_F(const Iterate& phi, const AsymptoticDatum& ginf, const ModelConfig& model, const Equilibrium& eq,
                    const GevreyWeight& w, const ScatteringGrids& grids, const MapOptions& opts = {});

/// N1[a - b] + N2[rho_a - rho_b].
double iterate_distance(const Iterate& a, const Iterate& b, const GevreyWeight& w);

struct IterateRecord {
  int iter = 0;
  double n1 = 0.0;
  double n2 = 0.0;
  double distance = 0.0;  // relative to the new iterate's norm
  double ratio = 0.0;     // distance / previous distance (0 for the first)
};

struct ScatteringOptions {
  double tol = 1e-9;  // relative N-distance between successive iterates
  int max_iters = 25;
  /// Contraction is measured with lambda_inf scaled by this factor.
  double contraction_lambda_factor = 0.9;
  /// Reporting radius for the field decay: factor * lambda(0).
  double report_lambda_factor = 0.9;
  double ball_factor = 10.0;  // N1 of every iterate stays below ball_factor * datum_norm
  /// Datum amplitude above which no solve is attempted.
  double eps_max = 0.05;
  int divergence_patience = 3;
  bool zero_start = false;
  MapOptions map;
};

/// Least-squares fit log y = log C - c x.
struct LogLinearFit {
  double C = 0.0;
  double c = 0.0;
  double r2 = 0.0;
  int points = 0;
};

struct ScatteringRun {
  std::vector<IterateRecord> records;
  std::vector<double> contraction_ratios;
  Iterate solution;
  SpectralState g0;
  ModeHistory efield;                                   // E_hat per slice
  std::vector<std::pair<double, double>> efield_decay;  // (t, ||A E(t)||)
  LogLinearFit fitted_decay;  // log ||A E|| against <t>^gamma over [T/4, 3T/4]
  bool converged = false;
  double residual = 0.0;  // last relative distance
  std::size_t truncations = 0;
};

/// Picard iteration phi <- F(phi) from the free extension (or zero).
/// Throws NoContractionError on divergence or a datum above eps_max.
ScatteringRun fixed_point_drive(const AsymptoticDatum& ginf, const ModelConfig& model, const Equilibrium& eq,
                                const GevreyWeight& w, const ScatteringGrids& grids,
                                const ScatteringOptions& opts = {});

/// E = -i k U per slice.
ModeHistory electric_history(const ModeHistory& potential);

/// (t, sqrt(sum_k A(k, k t)^2 |E_k|^2)) with lambda frozen at lambda_bar.
std::vector<std::pair<double, double>> weighted_field_series(const ModeHistory& efield, const GevreyWeight& w,
                                                             double lambda_bar);

LogLinearFit fit_log_linear(const std::vector<double>& x, const std::vector<double>& y);

/// Physical-space sampling used to compare profiles.
struct PhysicalSampling {
  int nx = 16;
  double v_max = 8.0;
  int nv = 161;
};

/// Physical values g(x, v) on the sampling grid (inverse transforms by
/// trapezoid in eta), ordered v-major.
class ProfileSampler {
 public:
  ProfileSampler(const EtaGrid& eta, const PhysicalSampling& sampling = {});
  [[nodiscard]] std::vector<Complex> sample(const SpectralState& g) const;
  /// sup |a - b| over the sampled points.
  [[nodiscard]] double distance(const SpectralState& a, const SpectralState& b) const;

 private:
  EtaGrid eta_;
  PhysicalSampling sampling_;
  CVector phase_;  // e^{i eta_i v_m} * trapezoid weight * deta / 2 pi
};

/// sup over the sampled (x, v) of |g(x, v) - ref(x, v)|; the states may live
/// on different eta grids.
double profile_distance(const SpectralState& g, const SpectralState& ref, const PhysicalSampling& sampling = {});

struct RoundTripReport {
  double sup_error = 0.0;
  std::vector<std::pair<double, double>> profile_error_series;  // (t, distance)
  double final_quarter_increase = 0.0;  // largest step-to-step rise over [3T/4, T]
  double mass_drift = 0.0;
  double reality_defect = 0.0;
};

/// Forward self-consistent flow from g0 and its distance to the datum.
RoundTripReport roundtrip_check(const ScatteringRun& run, const AsymptoticDatum& ginf, const ModelConfig& model,
                                const Equilibrium& eq, const GevreyWeight& w, const ScatteringGrids& grids,
                                const PhysicalSampling& sampling = {});

}  // namespace kinscat
