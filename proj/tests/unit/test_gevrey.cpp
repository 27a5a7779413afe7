#include <doctest.h>

#include <cmath>
#include <random>

#include <kinscat/errors.hpp>
#include <kinscat/gevrey.hpp>

using namespace kinscat;

namespace {

GevreyWeight reference_weight() {
  GevreyWeight w;
  w.lambda_inf = 0.2;
  w.c_decay = 0.05;
  w.delta = 0.05;
  return w;
}

SpectralState gaussian_state(double deta, double hmax) {
  SpectralState s(Lattice{1}, EtaGrid::covering(hmax, deta), 0.0);
  for (int i = 0; i < s.eta_grid().size(); ++i) {
    const double eta = s.eta_grid().eta(i);
    s(1, i) = std::exp(-0.5 * eta * eta);
  }
  return s;
}

}  // namespace

TEST_SUITE("gevrey") {
  TEST_CASE("lambda of t") {
    const auto w = reference_weight();
    CHECK(lambda_of_t(w, 0.0) == doctest::Approx(0.15).epsilon(1e-15));
    CHECK(lambda_of_t(w, 1.0) == doctest::Approx(0.2 - 0.05 * std::pow(2.0, -0.025)).epsilon(1e-15));
    CHECK(lambda_of_t(w, 1e100) == doctest::Approx(0.2).epsilon(1e-5));
    double prev = lambda_of_t(w, 0.0);
    for (double t = 0.5; t < 1e4; t *= 1.7) {
      const double v = lambda_of_t(w, t);
      CHECK(v > prev);
      CHECK(v < 0.2);
      prev = v;
    }
  }

  TEST_CASE("weight validation") {
    auto w = reference_weight();
    CHECK_NOTHROW(w.validate());
    w.gamma = 1.0;
    CHECK_THROWS_AS(w.validate(), ConfigError);
    w.gamma = 0.3;
    CHECK_THROWS_AS(w.validate(), ConfigError);
    w = reference_weight();
    w.c_decay = 0.3;
    CHECK_THROWS_AS(w.validate(), ConfigError);
    w = reference_weight();
    w.sigma = 10.5;
    CHECK_THROWS_AS(w.validate(), ConfigError);
  }

  TEST_CASE("log weights") {
    const auto w = reference_weight();
    CHECK(log_weight_A(w, 3.0, 0.0, 0.0) == doctest::Approx(lambda_of_t(w, 3.0)).epsilon(1e-15));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> t_dist(0.0, 50.0);
    std::uniform_int_distribution<int> k_dist(0, 20);
    std::uniform_real_distribution<double> eta_dist(0.0, 500.0);
    for (int n = 0; n < 10000; ++n) {
      const double t = t_dist(rng);
      const int k = k_dist(rng);
      const double eta = eta_dist(rng);
      const double a = log_weight_A(w, t, k, eta);
      CHECK(std::abs(log_weight_B(w, t, k, eta) - a - std::log(bracket(k, eta))) <= 1e-12 * std::max(1.0, a));
      CHECK(log_weight_A(w, t + 1.0, k, eta) >= a);
      CHECK(log_weight_A(w, t, k + 1, eta) >= a);
      CHECK(log_weight_A(w, t, k, eta + 1.0) >= a);
      CHECK(log_weight_A(w, t, -k, -eta) == a);
    }
  }

  TEST_CASE("N1 of a Gaussian matches a fine quadrature") {
    auto w = reference_weight();
    w.M = 0;
    const auto s = gaussian_state(0.05, 20.0);
    CHECK(norm_N1({SpectralState(Lattice{1}, s.eta_grid())}, w) == 0.0);
    const double value = norm_N1({s}, w);
    // Composite Simpson at ten times the resolution.
    const double lam = lambda_of_t(w, 0.0);
    const int n = 8000;
    const double h = 40.0 / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double eta = -20.0 + i * h;
      const double br = std::sqrt(2.0 + eta * eta);
      const double f = std::exp(2.0 * lam * std::pow(br, w.gamma)) * std::pow(br, 2.0 * w.sigma + 2.0) *
                       std::exp(-eta * eta);
      sum += f * (i == 0 || i == n ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0));
    }
    const double oracle = std::sqrt(sum * h / 3.0);
    CHECK(value == doctest::Approx(oracle).epsilon(1e-9));
  }

  TEST_CASE("N1 and N2 are homogeneous") {
    const auto w = reference_weight();
    auto s = gaussian_state(0.1, 20.0);
    s.set_time(2.0);
    const double base = norm_N1({s}, w);
    auto scaled = s;
    scaled *= -3.0;
    CHECK(norm_N1({scaled}, w) == doctest::Approx(3.0 * base).epsilon(1e-10));
    CHECK(state_norm(scaled, w) == doctest::Approx(3.0 * state_norm(s, w)).epsilon(1e-10));

    DensityHistory rho(Lattice{2}, TimeGrid{0.1, 50});
    for (int j = 0; j < rho.grid().points(); ++j) {
      rho.at(j, 1) = Complex(std::exp(-rho.grid().t(j)), 0.3);
      rho.at(j, -1) = std::conj(rho.at(j, 1));
    }
    const double n2 = norm_N2(rho, w);
    rho *= 0.25;
    CHECK(norm_N2(rho, w) == doctest::Approx(0.25 * n2).epsilon(1e-10));
  }

  TEST_CASE("N2 single entry and refinement") {
    const auto w = reference_weight();
    const TimeGrid grid{0.2, 20};
    DensityHistory rho(Lattice{3}, grid);
    CHECK(norm_N2(rho, w) == 0.0);
    rho.at(7, 2) = Complex(0.6, 0.8);
    const double t = grid.t(7);
    const double expected = std::sqrt(grid.dt) * std::pow(bracket(t), w.b) * std::exp(log_weight_A(w, t, 2, 2 * t));
    CHECK(norm_N2(rho, w) == doctest::Approx(expected).epsilon(1e-12));

    auto sampled = [&](double dt) {
      const int steps = static_cast<int>(std::lround(12.0 / dt));
      DensityHistory r(Lattice{1}, TimeGrid{dt, steps});
      for (int j = 0; j <= steps; ++j) {
        r.at(j, 1) = std::exp(-3.0 * r.grid().t(j));
        r.at(j, -1) = r.at(j, 1);
      }
      return norm_N2(r, w);
    };
    const double coarse = sampled(0.05);
    const double fine = sampled(0.025);
    CHECK(std::abs(coarse - fine) <= 0.01 * fine);
  }

  TEST_CASE("weighted norm report adds its parts") {
    const auto w = reference_weight();
    auto s = gaussian_state(0.1, 20.0);
    DensityHistory rho(Lattice{1}, TimeGrid{0.1, 0});
    rho.at(0, 1) = 0.5;
    const auto rep = weighted_norms({s}, rho, w);
    CHECK(rep.n_total == rep.n1 + rep.n2);
    CHECK(rep.n1 > 0.0);
    CHECK(rep.n2 > 0.0);
  }

  TEST_CASE("eta differences are fourth order") {
    auto err = [](double deta) {
      const auto g = EtaGrid::covering(10.0, deta);
      CVector row(static_cast<std::size_t>(g.size()));
      for (int i = 0; i < g.size(); ++i) row[static_cast<std::size_t>(i)] = std::sin(g.eta(i));
      const int i = g.center() + static_cast<int>(std::lround(1.0 / deta));
      return std::abs(eta_derivative(row, i, 1, deta).real() - std::cos(1.0));
    };
    CHECK(err(0.1) / err(0.05) == doctest::Approx(16.0).epsilon(0.05));
  }

  TEST_CASE("fractional power inequalities") {
    const auto rep = gevrey_inequality_suite(0.5, 20000, 11);
    CHECK(rep.violations_subadditive == 0);
    CHECK(rep.violations_close == 0);
    CHECK(rep.violations_difference == 0);
    CHECK(rep.margin_subadditive >= 0.0);
    CHECK(rep.constant_comparable < 1.0);
    CHECK(rep.constant_lower > 0.0);
    CHECK_THROWS_AS(gevrey_inequality_suite(1.0, 100), ConfigError);

    // Close-argument case x = 100, y = 75, K = 2, gamma = 1/2 evaluated directly.
    const double g = 0.5, x = 100.0, y = 75.0, K = 2.0;
    const double lhs = std::abs(std::pow(bracket(x), g) - std::pow(bracket(y), g));
    const double rhs = g / std::pow(K - 1.0, 1.0 - g) * std::pow(bracket(x - y), g);
    CHECK(lhs < rhs);
    CHECK(lhs == doctest::Approx(1.3396110782590522).epsilon(1e-12));
  }
}
