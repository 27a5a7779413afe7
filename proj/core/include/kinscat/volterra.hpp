#pragma once

#include <map>
#include <vector>

#include "kinscat/dispersion.hpp"
#include "kinscat/gevrey.hpp"
#include "kinscat/history.hpp"
#include "kinscat/model.hpp"

namespace kinscat {

/// Convolution-quadrature weights of the coupling kernel
/// a_k (s - t) mu_hat(-k (s - t)) for every nonzero mode.
struct VolterraKernels {
  TimeGrid grid;
  std::map<int, CVector> weights;

  static VolterraKernels build(const ModelConfig& model, const Equilibrium& eq, const Lattice& lattice,
                               const TimeGrid& grid);
  static VolterraKernels from_tables(const std::map<int, ResolventTable>& tables);
};

enum class VolterraScheme {
  ConvolutionQuadrature,  // trapezoidal CQ; exact discrete resolvent identity
  ProductLagrange,        // piecewise degree-8 interpolation of rho, kernel integrated exactly
};

/// rho_t + int_t^T a_k (s-t) mu_hat(-k(s-t)) rho_s ds = S_t, solved backward from T.
DensityHistory solve_direct_backward(const ModelConfig& model, const Equilibrium& eq, const SourceHistory& source,
                                     VolterraScheme scheme = VolterraScheme::ConvolutionQuadrature);
DensityHistory solve_direct_backward(const ModelConfig& model, const VolterraKernels& kernels,
                                     const SourceHistory& source);

/// rho_t = S_t + int_t^T K_k(s - t) S_s ds using the tables' resolvent weights.
DensityHistory solve_resolvent(const ModelConfig& model, const SourceHistory& source,
                               const std::map<int, ResolventTable>& tables);

/// max over modes of ||residual_k||_2 / ||S_k||_2 of the discrete equation.
double volterra_residual(const VolterraKernels& kernels, const SourceHistory& source, const DensityHistory& density);

struct NormTransfer {
  double density_norm = 0.0;
  double source_norm = 0.0;
  double ratio = 1.0;
};

NormTransfer estimate_density_norm_transfer(const SourceHistory& source, const DensityHistory& density,
                                            const GevreyWeight& w);

}  // namespace kinscat
