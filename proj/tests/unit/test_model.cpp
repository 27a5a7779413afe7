#include <doctest.h>

#include <cmath>
#include <random>

#include <kinscat/errors.hpp>
#include <kinscat/model.hpp>

using namespace kinscat;

TEST_SUITE("model") {
  TEST_CASE("presets carry the documented beta and h") {
    const auto vp = make_preset("vp");
    CHECK(vp.beta == 0.0);
    CHECK(vp.h.is_zero());
    const auto scr = make_preset("screened");
    CHECK(scr.beta == 1.0);
    CHECK(scr.h.is_zero());
    const auto me = make_preset("vpme");
    CHECK(me.beta == 1.0);
    CHECK(me.h.coefficient(2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(me.h.coefficient(3) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(me.h.coefficient(4) == doctest::Approx(1.0 / 24.0).epsilon(1e-15));
    CHECK_THROWS_AS(make_preset("vlasov"), ConfigError);
  }

  TEST_CASE("h series has no constant or linear part") {
    CHECK_THROWS_AS(PowerSeries({0.0, 1.0, 0.5}, 1.0), ConfigError);
    CHECK_THROWS_AS(PowerSeries({0.1, 0.0, 0.5}, 1.0), ConfigError);
    for (const char* name : {"vp", "screened", "vpme"}) {
      const auto m = make_preset(name);
      const double step = 1e-6;
      CHECK(m.h(0.0, m.h_order) == 0.0);
      const double slope = (m.h(step, m.h_order) - m.h(-step, m.h_order)) / (2.0 * step);
      CHECK(std::abs(slope) <= 1e-8);
    }
  }

  TEST_CASE("vpme partial sums obey the Taylor remainder bound") {
    const auto me = make_preset("vpme");
    const int n = 12;
    double fact = 1.0;
    for (int j = 2; j <= n + 1; ++j) fact *= j;
    for (double x = -1.0; x <= 1.0; x += 0.01) {
      const double exact = std::expm1(x) - x;
      const double bound = std::pow(std::abs(x), n + 1) * std::exp(std::abs(x)) / fact;
      CHECK(std::abs(exact - me.h(x, n)) <= bound + 1e-16);
    }
  }

  TEST_CASE("coupling and validation") {
    const auto scr = make_preset("screened");
    CHECK(scr.coupling(0) == 0.0);
    CHECK(scr.coupling(2) == doctest::Approx(0.8));
    auto bad = make_preset("vp");
    bad.beta = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    auto wide = make_preset("vp");
    wide.dimension = 2;
    CHECK_THROWS_AS(wide.validate(), ConfigError);
  }

  TEST_CASE("built-in equilibria are real, unit mass and closed form") {
    const auto mx = Equilibrium::maxwellian();
    CHECK(mx.mu_hat(1.3).real() == doctest::Approx(std::exp(-0.5 * 1.69)).epsilon(1e-15));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-30.0, 30.0);
    for (const auto& eq : {mx, Equilibrium::two_stream(2.0, 0.5), Equilibrium::bump_on_tail(0.1, 4.5, 0.5)}) {
      CHECK(check_H3(eq));
      double worst = 0.0;
      for (int i = 0; i < 10000; ++i) {
        const double eta = dist(rng);
        worst = std::max(worst, std::abs(eq.mu_hat(-eta) - std::conj(eq.mu_hat(eta))));
      }
      CHECK(worst <= 1e-14);
    }
    CHECK_FALSE(check_H3(mx.scaled(0.9)));
  }

  TEST_CASE("closed-form derivatives match finite differences") {
    const auto eq = Equilibrium::two_stream(1.5, 0.7);
    const double h = 1e-4;
    for (double eta : {-1.2, 0.0, 0.4, 2.5}) {
      const Complex fd = (eq.mu_hat(eta + h) - eq.mu_hat(eta - h)) / (2.0 * h);
      CHECK(std::abs(fd - eq.derivative(eta, 1)) <= 1e-7);
      const Complex fd2 = (eq.derivative(eta + h, 1) - eq.derivative(eta - h, 1)) / (2.0 * h);
      CHECK(std::abs(fd2 - eq.derivative(eta, 2)) <= 1e-7);
    }
  }

  TEST_CASE("H1 check") {
    const auto mx = Equilibrium::maxwellian();
    CHECK(check_H1(mx, 0.0, 0, 20.0) == doctest::Approx(1.0).epsilon(1e-15));
    // Oracle: golden-section maximisation of 0.2 <eta> - eta^2 / 2 on [0, 1].
    auto f = [](double e) { return 0.2 * std::sqrt(1.0 + e * e) - 0.5 * e * e; };
    double a = 0.0, b = 1.0;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 200; ++it) {
      const double c = b - g * (b - a), d = a + g * (b - a);
      if (f(c) > f(d)) b = d; else a = c;
    }
    const double oracle = std::exp(f(0.5 * (a + b)));
    CHECK(check_H1(mx, 0.2, 0, 20.0) == doctest::Approx(oracle).epsilon(1e-9));

    const double lam0 = 1.0;
    const Equilibrium cusp([lam0](double eta) { return Complex(std::exp(-lam0 * std::abs(eta))); }, 2.0, 0, "cusp");
    const double inside_small = check_H1(cusp, 0.5, 0, 50.0);
    const double inside_large = check_H1(cusp, 0.5, 0, 200.0);
    CHECK(inside_large == doctest::Approx(inside_small));
    CHECK(check_H1(cusp, 1.5, 0, 200.0) > 1e30 * check_H1(cusp, 1.5, 0, 50.0));
  }
}
