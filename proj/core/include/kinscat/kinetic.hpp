#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "kinscat/field.hpp"
#include "kinscat/history.hpp"
#include "kinscat/model.hpp"
#include "kinscat/spline.hpp"
#include "kinscat/state.hpp"

namespace kinscat {

/// Final datum g_inf(k, eta) of the scattering problem.
struct AsymptoticDatum {
  std::function<Complex(int, double)> evaluator;
  double amplitude = 0.0;
  bool mean_zero = true;

  /// sum over (k, c) of c e^{-eta^2 / (2 width^2)} at mode k, with the mirrored
  /// mode -k carrying conj(c) so the datum is real. amplitude = max |c|.
  static AsymptoticDatum gaussian(std::vector<std::pair<int, Complex>> modes, double width);
  static AsymptoticDatum zero();

  [[nodiscard]] Complex operator()(int k, double eta) const { return evaluator ? evaluator(k, eta) : Complex{}; }
  /// Samples on the grid; throws ConfigError when mean_zero is claimed but g(0,0) != 0.
  [[nodiscard]] SpectralState sample(const Lattice& lattice, const EtaGrid& eta, double t) const;
  /// Same datum multiplied by s.
  [[nodiscard]] AsymptoticDatum scaled(double s) const;
};

/// Spline value of row k at eta; zero (and a counted truncation) off the grid.
Complex eta_interpolate(const SpectralState& state, int k, double eta, std::size_t* truncated = nullptr);

/// q(k) = g(k, k t) at the state's time stamp.
ModeField density_trace(const EtaSpline& spline, std::size_t* truncated = nullptr);
ModeField density_trace(const SpectralState& state, std::size_t* truncated = nullptr);

/// Trace of every state of a history (states[j] at t_j).
DensityHistory density_trace_history(const std::vector<SpectralState>& states, const TimeGrid& grid,
                                     std::size_t* truncated = nullptr);

struct SourceTerms {
  bool nonlinear = true;  // keep the convolution term
};

/// S_t(k) = g_inf(k, k t_j) - h(U_j)(k)
///          - sum_{l != 0} trapezoid_{s in [t_j, T]} (s - t_j) k l U_s(l) g_s(k - l, k t_j - l s)
/// where U_s(l) = rho_s(l) / (beta + l^2); splines[m] interpolates g at t_m.
ModeField assemble_source(const std::vector<EtaSpline>& splines, const DensityHistory& density,
                          const ModeHistory& potential, const AsymptoticDatum& ginf, const ModelConfig& model, int j,
                          const SourceTerms& terms = {});

/// All slices of the source.
SourceHistory assemble_source_history(const std::vector<EtaSpline>& splines, const DensityHistory& density,
                                      const ModeHistory& potential, const AsymptoticDatum& ginf,
                                      const ModelConfig& model, const SourceTerms& terms = {});

/// -(eta - k t) k U_lin(k) mu_hat(eta - k t) - sum_{l != 0} (eta - k t) l U_nl(l) g(k - l, eta - l t).
/// An empty u_nonlinear (kmax = 0 lattice) drops the convolution term.
SpectralState transport_rhs(const EtaSpline& spline, const ModeField& u_linear, const ModeField& u_nonlinear,
                            const Equilibrium& eq);
SpectralState transport_rhs(const EtaSpline& spline, const FieldSnapshot& linear, const FieldSnapshot& nonlinear,
                            const Equilibrium& eq);

/// Potentials driving the linear and the nonlinear transport terms.
struct FieldPair {
  ModeField linear;
  ModeField nonlinear;
};

/// Field callback evaluated at RK stage times with the stage state.
using FieldProvider = std::function<FieldPair(double t, const EtaSpline& stage)>;

/// Cubic Lagrange interpolation in time of a mode history (exact at nodes).
ModeField interpolate_in_time(const ModeHistory& history, double t);

/// Fields read from prescribed histories; an empty nonlinear history drops that term.
FieldProvider history_fields(ModeHistory u_linear, ModeHistory u_nonlinear);
/// No coupling at all (free profile flow).
FieldProvider zero_fields(const Lattice& lattice);
/// Self-consistent field: trace -> nonlinear Poisson -> U, used in both terms
/// (or only in the linear one when nonlinear = false).
FieldProvider self_consistent_fields(const ModelConfig& model, const GevreyWeight& w, bool nonlinear = true,
                                     const PoissonOptions& poisson = {});

enum class Direction { Forward, Backward };

struct IntegrateOptions {
  bool keep_history = true;
  double boundary_tol = 1e-10;
};

struct IntegrationResult {
  std::vector<SpectralState> states;  // states[j] at t_j (only the final one without history)
  double max_reality_defect = 0.0;    // per step, before re-symmetrization
  double mass_drift = 0.0;            // max |g(0,0) - g_start(0,0)|
  double boundary_max = 0.0;          // max |g| on the outermost eta nodes
  bool boundary_warning = false;
  int steps = 0;
};

/// Classical RK4 over the time grid. Backward runs start at t = T, forward
/// runs at t = 0; each step is re-symmetrized. Throws BlowUpError on
/// non-finite values.
IntegrationResult integrate(const SpectralState& start, const FieldProvider& fields, Direction direction,
                            const TimeGrid& grid, const Equilibrium& eq, const IntegrateOptions& opts = {});

}  // namespace kinscat
