#include <benchmark/benchmark.h>

#include <cmath>

#include <kinscat/dispersion.hpp>
#include <kinscat/kinetic.hpp>
#include <kinscat/quadrature.hpp>
#include <kinscat/scattering.hpp>
#include <kinscat/volterra.hpp>

using namespace kinscat;

namespace {

SpectralState gaussian_state(int kmax, double hmax, double deta) {
  return AsymptoticDatum::gaussian({{1, Complex(1.0, 0.0)}, {2, Complex(0.5, 0.2)}}, 1.0)
      .sample(Lattice{kmax}, EtaGrid::covering(hmax, deta), 0.5);
}

void BM_LaplaceOneSided(benchmark::State& state) {
  const auto phi = [](double t) { return Complex(std::exp(-0.5 * t * t), 0.0); };
  for (auto _ : state) benchmark::DoNotOptimize(laplace_one_sided(phi, Complex(0.1, 1.5), 1e-12, 1.0));
}
BENCHMARK(BM_LaplaceOneSided);

void BM_DispersionD(benchmark::State& state) {
  const auto model = make_preset("vp");
  const auto eq = Equilibrium::maxwellian();
  for (auto _ : state) benchmark::DoNotOptimize(dispersion_D(model, eq, 1, Complex(-0.5, 2.0)));
}
BENCHMARK(BM_DispersionD);

void BM_ConvolutionQuadratureWeights(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto symbol = [](Complex s) { return 1.0 / (s + 1.0); };
  for (auto _ : state) benchmark::DoNotOptimize(convolution_quadrature_weights(symbol, 0.05, n));
}
BENCHMARK(BM_ConvolutionQuadratureWeights)->Arg(256)->Arg(1024);

void BM_EtaSplineBuild(benchmark::State& state) {
  const SpectralState s = gaussian_state(4, 70.0, 1.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(EtaSpline(s));
}
BENCHMARK(BM_EtaSplineBuild)->Arg(8)->Arg(16);

void BM_EtaSplineEval(benchmark::State& state) {
  const EtaSpline sp(gaussian_state(4, 70.0, 0.0625));
  double eta = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sp.eval(1, eta));
    eta = eta > 3.0 ? -3.0 : eta + 0.013;
  }
}
BENCHMARK(BM_EtaSplineEval);

void BM_TransportRhs(benchmark::State& state) {
  const EtaSpline sp(gaussian_state(4, 70.0, 1.0 / static_cast<double>(state.range(0))));
  const Lattice lat{4};
  ModeField u(lat);
  u[1] = u[-1] = 0.1;
  u[2] = u[-2] = Complex(0.02, 0.01);
  const auto eq = Equilibrium::maxwellian();
  for (auto _ : state) benchmark::DoNotOptimize(transport_rhs(sp, u, u, eq));
}
BENCHMARK(BM_TransportRhs)->Arg(8)->Arg(16);

void BM_VolterraProductLagrange(benchmark::State& state) {
  const TimeGrid grid{0.05, static_cast<int>(state.range(0))};
  const int kmax = 4;
  SourceHistory src(Lattice{kmax}, grid);
  for (int j = 0; j < grid.points(); ++j) {
    const double t = grid.t(j);
    for (int k = 1; k <= kmax; ++k) {
      src.at(j, k) = Complex(std::exp(-0.5 * t * t / k), 0.2 * k * std::exp(-t));
      src.at(j, -k) = std::conj(src.at(j, k));
    }
  }
  const auto model = make_preset("vp");
  const auto eq = Equilibrium::maxwellian();
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_direct_backward(model, eq, src, VolterraScheme::ProductLagrange));
  }
}
BENCHMARK(BM_VolterraProductLagrange)->Arg(160)->Arg(320)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
