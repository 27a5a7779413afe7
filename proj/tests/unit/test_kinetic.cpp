#include <doctest.h>

#include <cmath>

#include <kinscat/errors.hpp>
#include <kinscat/kinetic.hpp>

using namespace kinscat;

namespace {

SpectralState sampled(const Lattice& lat, const EtaGrid& grid, double t, const std::function<Complex(int, double)>& f) {
  SpectralState s(lat, grid, t);
  for (int k = -lat.kmax; k <= lat.kmax; ++k) {
    for (int i = 0; i < grid.size(); ++i) s(k, i) = f(k, grid.eta(i));
  }
  return s;
}

double max_diff(const SpectralState& a, const SpectralState& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

ModeHistory cosine_potential(const Lattice& lat, const TimeGrid& grid, double amp) {
  ModeHistory u(lat, grid);
  for (int j = 0; j < grid.points(); ++j) {
    u.at(j, 1) = amp * std::cos(grid.t(j));
    u.at(j, -1) = u.at(j, 1);
  }
  return u;
}

}  // namespace

TEST_SUITE("kinetic") {
  TEST_CASE("spline reproduces nodes and cubics") {
    const EtaGrid grid = EtaGrid::covering(5.0, 0.25);
    auto cubic = [](int k, double eta) { return Complex(1.0 + eta - 0.1 * eta * eta + 0.01 * eta * eta * eta, k * eta); };
    const auto s = sampled(Lattice{1}, grid, 0.0, cubic);
    const EtaSpline sp(s);
    for (int i = 0; i < grid.size(); ++i) CHECK(std::abs(sp.eval(1, grid.eta(i)) - s(1, i)) <= 1e-14);
    for (double eta = -4.93; eta < 4.9; eta += 0.137) {
      CHECK(std::abs(sp.eval(1, eta) - cubic(1, eta)) <= 1e-12);
      CHECK(std::abs(sp.eval(-1, eta) - cubic(-1, eta)) <= 1e-12);
    }
    CHECK(sp.truncations() == 0);
    CHECK(sp.eval(0, 5.5) == Complex(0.0));
    CHECK(sp.truncations() == 1);
  }

  TEST_CASE("spline error is fourth order") {
    auto err = [](double deta) {
      const EtaGrid grid = EtaGrid::covering(12.0, deta);
      const auto s = sampled(Lattice{0}, grid, 0.0, [](int, double e) { return Complex(std::exp(-0.5 * e * e)); });
      const EtaSpline sp(s);
      double worst = 0.0;
      for (int i = grid.center() - static_cast<int>(4.0 / deta); i < grid.center() + static_cast<int>(4.0 / deta); ++i) {
        const double eta = grid.eta(i) + 0.5 * deta;
        worst = std::max(worst, std::abs(sp.eval(0, eta) - std::exp(-0.5 * eta * eta)));
      }
      return worst;
    };
    CHECK(err(0.1) / err(0.05) == doctest::Approx(16.0).epsilon(0.1));
  }

  TEST_CASE("shifted evaluation matches pointwise evaluation") {
    const EtaGrid grid = EtaGrid::covering(10.0, 0.1);
    const auto s = sampled(Lattice{1}, grid, 0.0, [](int k, double e) { return Complex(std::exp(-0.5 * e * e), k * e * std::exp(-e * e)); });
    const EtaSpline sp(s);
    CVector out(static_cast<std::size_t>(grid.size()));
    sp.eval_shifted(1, 0.37, out.data());
    for (int i = 0; i < grid.size(); ++i) {
      CHECK(std::abs(out[static_cast<std::size_t>(i)] - sp.eval(1, grid.eta(i) + 0.37)) <= 1e-14);
    }
  }

  TEST_CASE("datum and trace") {
    const auto d = AsymptoticDatum::gaussian({{1, Complex(1.0, 0.5)}}, 1.0);
    CHECK(d.mean_zero);
    CHECK(d.amplitude == doctest::Approx(std::abs(Complex(1.0, 0.5))));
    CHECK(d(-1, 0.3) == std::conj(d(1, 0.3)));
    CHECK(d(2, 0.3) == Complex(0.0));
    const auto lat = Lattice{2};
    const auto grid = EtaGrid::covering(10.0, 0.125);
    const auto state = sampled(lat, grid, 2.0, [](int k, double e) { return Complex(std::abs(k) == 1 ? std::exp(-0.5 * e * e) : 0.0); });
    const auto q = density_trace(state);
    CHECK(std::abs(q[1] - std::exp(-2.0)) <= 1e-15);
    CHECK(std::abs(q[-1] - std::exp(-2.0)) <= 1e-15);
    CHECK(q[0] == Complex(0.0));
    const auto bad = AsymptoticDatum::gaussian({{0, 1.0}}, 1.0);
    CHECK_FALSE(bad.mean_zero);
  }

  TEST_CASE("interpolation in time") {
    const TimeGrid grid{0.5, 8};
    ModeHistory h(Lattice{1}, grid);
    auto p = [](double t) { return Complex(1.0 - t + 0.3 * t * t - 0.05 * t * t * t, t); };
    for (int j = 0; j < grid.points(); ++j) h.at(j, 1) = p(grid.t(j));
    for (int j = 0; j < grid.points(); ++j) CHECK(interpolate_in_time(h, grid.t(j))[1] == h.at(j, 1));
    for (double t = 0.0; t <= 4.0; t += 0.1) CHECK(std::abs(interpolate_in_time(h, t)[1] - p(t)) <= 1e-12);
  }

  TEST_CASE("transport right-hand side") {
    const auto mx = Equilibrium::maxwellian();
    const auto lat = Lattice{2};
    const auto grid = EtaGrid::covering(15.0, 0.125);
    const double t = 1.25;
    SpectralState zero(lat, grid, t);
    ModeField u(lat);
    u[1] = Complex(0.2, 0.1);
    u[-1] = std::conj(u[1]);
    const auto rhs = transport_rhs(EtaSpline(zero), u, ModeField(Lattice{0}), mx);
    for (int i = 0; i < grid.size(); i += 7) {
      const double x = grid.eta(i) - t;
      CHECK(std::abs(rhs(1, i) + x * u[1] * std::exp(-0.5 * x * x)) <= 1e-15);
      CHECK(std::abs(rhs(2, i)) == 0.0);
    }

    // Nonlinear term with shifts on grid nodes: -(eta - k t) l U(l) g(k - l, eta - l t).
    auto g = sampled(lat, grid, t, [](int k, double e) { return Complex(k == 0 ? std::exp(-0.5 * e * e) : 0.0); });
    const auto nl = transport_rhs(EtaSpline(g), ModeField(lat), u, mx);
    for (int i = 20; i < grid.size() - 20; i += 5) {
      const double eta = grid.eta(i);
      const Complex expected = -(eta - t) * 1.0 * u[1] * std::exp(-0.5 * (eta - t) * (eta - t));
      CHECK(std::abs(nl(1, i) - expected) <= 1e-14);
      CHECK(nl(0, grid.center()) == Complex(0.0));
    }
  }

  TEST_CASE("source terms scale with the data") {
    const auto vp = make_preset("vp");
    const auto lat = Lattice{2};
    const auto grid = EtaGrid::covering(20.0, 0.125);
    const TimeGrid time{0.25, 8};
    const auto d = AsymptoticDatum::gaussian({{1, 1e-2}}, 1.0);
    auto build = [&](double s) {
      std::vector<EtaSpline> splines;
      for (int j = 0; j < time.points(); ++j) splines.emplace_back(d.scaled(s).sample(lat, grid, time.t(j)));
      DensityHistory rho(lat, time);
      ModeHistory u(lat, time);
      for (int j = 0; j < time.points(); ++j) {
        rho.at(j, 1) = s * 1e-2 * std::exp(-time.t(j));
        rho.at(j, -1) = rho.at(j, 1);
        u.at(j, 1) = rho.at(j, 1);
        u.at(j, -1) = rho.at(j, -1);
      }
      const auto lin = assemble_source(splines, rho, u, d.scaled(s), vp, 2, SourceTerms{false});
      const auto full = assemble_source(splines, rho, u, d.scaled(s), vp, 2, SourceTerms{true});
      return std::pair{lin, full};
    };
    const auto [lin1, full1] = build(1.0);
    const auto [lin2, full2] = build(2.0);
    CHECK(std::abs(lin1[1] - d(1, time.t(2))) <= 1e-15);
    CHECK(std::abs(lin2[1] - 2.0 * lin1[1]) <= 1e-16);
    const Complex quad1 = full1[2] - lin1[2];
    const Complex quad2 = full2[2] - lin2[2];
    CHECK(std::abs(quad1) > 0.0);
    CHECK(std::abs(quad2 - 4.0 * quad1) <= 1e-12 * std::abs(quad2));
  }

  TEST_CASE("free transport keeps the profile") {
    const auto mx = Equilibrium::maxwellian();
    const auto lat = Lattice{2};
    const auto grid = EtaGrid::covering(10.0, 0.25);
    const auto d = AsymptoticDatum::gaussian({{1, 1e-3}, {2, Complex(0.0, 5e-4)}}, 1.0);
    const TimeGrid time{0.01, 1000};
    const auto start = d.sample(lat, grid, 0.0);
    IntegrateOptions opts;
    opts.keep_history = false;
    const auto res = integrate(start, zero_fields(lat), Direction::Forward, time, mx, opts);
    CHECK(res.steps == 1000);
    CHECK(max_diff(res.states.back(), start) <= 1e-13);
    CHECK(res.mass_drift == 0.0);
    CHECK_THROWS_AS(integrate(start, zero_fields(lat), Direction::Backward, time, mx), ConfigError);
  }

  TEST_CASE("RK4 converges at fourth order") {
    const auto mx = Equilibrium::maxwellian();
    const auto lat = Lattice{2};
    const auto grid = EtaGrid::covering(16.0, 0.1);
    const auto d = AsymptoticDatum::gaussian({{1, 0.5}, {2, Complex(0.1, 0.2)}}, 1.0);
    const double T = 2.0;
    const auto u_lin = cosine_potential(lat, TimeGrid{0.0125, 160}, 0.2);
    const auto u_nl = cosine_potential(lat, TimeGrid{0.0125, 160}, 0.3);
    auto run = [&](double dt) {
      const TimeGrid time{dt, static_cast<int>(std::lround(T / dt))};
      IntegrateOptions opts;
      opts.keep_history = false;
      const auto res = integrate(d.sample(lat, grid, T), history_fields(u_lin, u_nl), Direction::Backward, time, mx, opts);
      CHECK(res.mass_drift <= 1e-15);
      CHECK(res.max_reality_defect <= 1e-12);
      return res.states.back();
    };
    const auto a = run(0.2);
    const auto b = run(0.1);
    const auto c = run(0.05);
    const double ratio = max_diff(a, b) / max_diff(b, c);
    CHECK(ratio == doctest::Approx(16.0).epsilon(0.15));
  }

  TEST_CASE("self-consistent field provider") {
    const auto vp = make_preset("vp");
    const auto lat = Lattice{2};
    const auto grid = EtaGrid::covering(10.0, 0.125);
    const auto d = AsymptoticDatum::gaussian({{1, 1e-3}}, 1.0);
    const auto state = d.sample(lat, grid, 1.0);
    const auto fields = self_consistent_fields(vp, GevreyWeight{});
    const auto f = fields(1.0, EtaSpline(state));
    CHECK(std::abs(f.linear[1] - 1e-3 * std::exp(-0.5)) <= 1e-15);
    CHECK(f.linear[0] == Complex(0.0));
    CHECK(f.nonlinear[1] == f.linear[1]);
  }
}
