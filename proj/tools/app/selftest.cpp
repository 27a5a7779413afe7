#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <kinscat/dispersion.hpp>
#include <kinscat/field.hpp>
#include <kinscat/kinetic.hpp>
#include <kinscat/scattering.hpp>
#include <kinscat/volterra.hpp>

#include "commands.hpp"
#include "config.hpp"

namespace kinscat::app {

namespace {

struct Check {
  std::string name;
  std::function<bool()> run;
};

SpectralState gaussian_state(const Lattice& lat, const EtaGrid& eg, double t) {
  return AsymptoticDatum::gaussian({{1, Complex(1.0, 0.0)}}, 1.0).sample(lat, eg, t);
}

std::vector<Check> checks() {
  const Lattice lat{2};
  const EtaGrid eg = EtaGrid::covering(12.0, 0.125);
  return {
      {"presets", [] {
         const auto vp = make_preset("vp");
         const auto me = make_preset("vpme");
         return vp.beta == 0.0 && vp.h.is_zero() && me.beta == 1.0 && me.h.coefficient(2) == 0.5;
       }},
      {"coupling vanishes at k = 0", [] { return make_preset("screened").coupling(0) == 0.0; }},
      {"maxwellian has unit mass", [] { return check_H3(Equilibrium::maxwellian()); }},
      {"empty config gives defaults", [] {
         const RunConfig c = parse_config_text("# nothing\n");
         return c.grid_kmax == RunConfig{}.grid_kmax && c.model_preset == "vp";
       }},
      {"spline reproduces nodes", [=] {
         const SpectralState s = gaussian_state(lat, eg, 0.0);
         const EtaSpline sp(s);
         for (int i = 0; i < eg.size(); i += 7) {
           if (std::abs(sp.eval(1, eg.eta(i)) - s(1, i)) > 1e-15) return false;
         }
         return true;
       }},
      {"trace at t = 0 is g(k, 0)", [=] {
         const SpectralState s = gaussian_state(lat, eg, 0.0);
         const ModeField q = density_trace(s);
         return q[1] == s(1, eg.center()) && q[0] == s(0, eg.center());
       }},
      {"zero fields give zero rhs", [=] {
         const SpectralState s = gaussian_state(lat, eg, 1.0);
         const SpectralState r = transport_rhs(EtaSpline(s), ModeField(lat), ModeField(lat), Equilibrium::maxwellian());
         return r.sup_norm() == 0.0;
       }},
      {"rhs vanishes at (0, 0)", [=] {
         SpectralState s = gaussian_state(lat, eg, 0.7);
         ModeField u(lat);
         u[1] = u[-1] = 0.3;
         const SpectralState r = transport_rhs(EtaSpline(s), u, u, Equilibrium::maxwellian());
         return r(0, eg.center()) == Complex{};
       }},
      {"source without density is the datum trace", [=] {
         const TimeGrid grid{0.25, 8};
         const auto datum = AsymptoticDatum::gaussian({{1, Complex(1.0, 0.0)}}, 1.0);
         std::vector<EtaSpline> splines;
         for (int j = 0; j < grid.points(); ++j) splines.emplace_back(datum.sample(lat, eg, grid.t(j)));
         const DensityHistory rho(lat, grid);
         const SourceHistory s = assemble_source_history(splines, rho, rho, datum, make_preset("vp"));
         for (int j = 0; j < grid.points(); ++j) {
           if (s.at(j, 1) != datum(1, grid.t(j))) return false;
         }
         return true;
       }},
      {"linear Poisson is exact", [=] {
         ModeField q(lat);
         q[1] = q[-1] = 0.2;
         const FieldSnapshot f = poisson_fixed_point(make_preset("screened"), q, GevreyWeight{}, 0.0);
         return f.rho_hat[1] == q[1] && f.u_hat[1] == q[1] / 2.0;
       }},
      {"zero source gives zero density", [=] {
         const SourceHistory s(lat, TimeGrid{0.1, 10});
         const DensityHistory r = solve_direct_backward(make_preset("vp"), Equilibrium::maxwellian(), s);
         return r.l2_norm() == 0.0;
       }},
      {"free transport keeps the profile", [=] {
         const TimeGrid grid{0.1, 20};
         const SpectralState s = gaussian_state(lat, eg, grid.horizon());
         const auto r = integrate(s, zero_fields(lat), Direction::Backward, grid, Equilibrium::maxwellian());
         SpectralState d = r.states.front();
         d.set_time(s.t());
         d -= s;
         return d.sup_norm() == 0.0;
       }},
      {"zero datum is a fixed point", [] {
         ScatteringGrids g;
         g.lattice = Lattice{1};
         g.eta = EtaGrid::covering(8.0, 0.25);
         g.time = TimeGrid{0.1, 10};
         const auto run = fixed_point_drive(AsymptoticDatum::zero(), make_preset("vp"), Equilibrium::maxwellian(),
                                            GevreyWeight{}, g);
         return run.converged && run.records.size() == 1 && run.g0.sup_norm() == 0.0;
       }},
  };
}

}  // namespace

int run_selftest(std::ostream& log) {
  int failed = 0;
  for (const auto& c : checks()) {
    bool ok = false;
    try {
      ok = c.run();
    } catch (const std::exception& e) {
      log << "  (" << e.what() << ")\n";
    }
    log << (ok ? "PASS " : "FAIL ") << c.name << "\n";
    if (!ok) ++failed;
  }
  log << "selftest: " << failed << " failure(s)\n";
  return failed == 0 ? kExitOk : kExitNumerical;
}

}  // namespace kinscat::app
