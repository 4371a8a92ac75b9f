#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>

#include "orlfb/energy.hpp"
#include "orlfb/errors.hpp"
#include "orlfb/oracle.hpp"
#include "orlfb/solver.hpp"
#include "test_util.hpp"

using namespace orlfb;

namespace {

double sup_error_vs_ramp(const SolveResult& r, const Ramp1D& oracle) {
  const Grid& g = r.field.grid();
  double e = 0.0;
  for (int n = 0; n < g.num_nodes(); ++n)
    e = std::max(e, std::abs(r.field[n] - oracle(g.node_pos(n).x)));
  return e;
}

}  // namespace

TEST_CASE("1d solve recovers the exact ramp, p = 2") {
  const Grid g = Grid::interval(0.0, 1.0, 200, 1.0, 0.0);
  const NFunction nf = make_power(2.0);
  const PenaltyParams pp{1e-3, 0.5};
  SolveConfig cfg;
  const SolveResult r = minimize(g, nf, pp, cfg);
  const Ramp1D oracle = solve_1d_exact(1.0, 0.0, 0.5, nf);

  CHECK(r.converged);
  CHECK(r.energy_monotone);
  CHECK(sup_error_vs_ramp(r, oracle) <= 1e-2);
  CHECK(std::abs(r.breakdown.volume - 0.5) <= g.spacing());
  CHECK(r.lambda_estimate == doctest::Approx(2.0).epsilon(0.05));
  // Dirichlet data intact, maximum principle holds.
  CHECK(r.field[0] == 1.0);
  CHECK(r.field[g.num_nodes() - 1] == 0.0);
  for (int n = 0; n < g.num_nodes(); ++n) {
    CHECK(r.field[n] >= 0.0);
    CHECK(r.field[n] <= 1.0);
  }
}

TEST_CASE("1d solve recovers the same ramp for g = t + t^3") {
  const Grid g = Grid::interval(0.0, 1.0, 200, 1.0, 0.0);
  const NFunction nf = make_sum_powers({{1.0, 2.0}, {1.0, 4.0}});
  const PenaltyParams pp{1e-3, 0.5};
  SolveConfig cfg;
  const SolveResult r = minimize(g, nf, pp, cfg);
  const Ramp1D oracle = solve_1d_exact(1.0, 0.0, 0.5, nf);
  CHECK(r.converged);
  CHECK(sup_error_vs_ramp(r, oracle) <= 1e-2);
  // Solver energy within 1% of the oracle energy 0.5 G(2) = 3.
  CHECK(r.breakdown.dirichlet_energy == doctest::Approx(3.0).epsilon(0.01));
}

TEST_CASE("zero boundary data yields the zero field") {
  const Grid g = Grid::interval(0.0, 1.0, 50, 0.0, 0.0);
  const PenaltyParams pp{0.1, 0.4};
  const SolveResult r = minimize(g, make_power(2.0), pp, SolveConfig{});
  for (int n = 0; n < g.num_nodes(); ++n) CHECK(r.field[n] == 0.0);
  CHECK(r.breakdown.total == doctest::Approx(-pp.eps * pp.alpha));
  CHECK(r.lambda_estimate == 0.0);
}

TEST_CASE("initialize strategies") {
  SUBCASE("gradient-only extension is linear in 1d for p = 2") {
    const Grid g = Grid::interval(0.0, 1.0, 50, 1.0, 0.0);
    SolveConfig cfg;
    const ScalarField u = initialize(g, make_power(2.0), cfg);
    for (int n = 0; n < g.num_nodes(); ++n)
      CHECK(u[n] == doctest::Approx(1.0 - g.node_pos(n).x).epsilon(0.02));
  }
  SUBCASE("constant data extends to the constant") {
    const Grid g = Grid::square(0.0, 1.0, 0.0, 1.0, 12, [](Vec2) { return 0.7; });
    SolveConfig cfg;
    const ScalarField u = initialize(g, make_power(2.0), cfg);
    for (int n = 0; n < g.num_nodes(); ++n)
      if (g.node_kind(n) != NodeKind::Outside) CHECK(u[n] == doctest::Approx(0.7).epsilon(1e-6));
  }
  SUBCASE("disc with unit data stays at one") {
    const Grid g = Grid::disc(1.0, 24, [](Vec2) { return 1.0; });
    SolveConfig cfg;
    const ScalarField u = initialize(g, make_power(3.0), cfg);
    for (int n = 0; n < g.num_nodes(); ++n)
      if (g.node_kind(n) != NodeKind::Outside) CHECK(u[n] == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("linear decay hits the requested support measure") {
    const Grid g = Grid::interval(0.0, 1.0, 100, 1.0, 0.0);
    SolveConfig cfg;
    cfg.init = InitStrategy::LinearDecay;
    const ScalarField u = initialize(g, make_power(2.0), cfg, 0.5);
    CHECK(std::abs(positivity_volume(u, 0.0) - 0.5) <= 2.0 * g.spacing());
    // Distance decay from A = {0} is the oracle ramp itself.
    for (int n = 0; n < g.num_nodes(); ++n)
      CHECK(u[n] == doctest::Approx(std::max(1.0 - 2.0 * g.node_pos(n).x, 0.0)).epsilon(0.08));
  }
}

TEST_CASE("determinism: identical config gives bit-identical results") {
  const Grid g = Grid::interval(0.0, 1.0, 80, 1.0, 0.0);
  const NFunction nf = make_power(3.0);
  const PenaltyParams pp{0.01, 0.5};
  SolveConfig cfg;
  cfg.restarts = 2;
  cfg.rng_seed = 42;
  const SolveResult a = minimize(g, nf, pp, cfg);
  const SolveResult b = minimize(g, nf, pp, cfg);
  REQUIRE(a.field.values().size() == b.field.values().size());
  CHECK(std::memcmp(a.field.values().data(), b.field.values().data(),
                    a.field.values().size() * sizeof(double)) == 0);
  CHECK(a.breakdown.total == b.breakdown.total);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("breakdown recomputes exactly from the returned field") {
  const Grid g = Grid::interval(0.0, 1.0, 64, 1.0, 0.0);
  const NFunction nf = make_power(2.0);
  const PenaltyParams pp{0.05, 0.5};
  SolveConfig cfg;
  const SolveResult r = minimize(g, nf, pp, cfg);
  const double theta = 1e-8 * g.max_dirichlet();
  const EnergyBreakdown again = j_eps(r.field, nf, pp, theta);
  CHECK(again.dirichlet_energy == r.breakdown.dirichlet_energy);
  CHECK(again.volume == r.breakdown.volume);
  CHECK(again.penalty == r.breakdown.penalty);
  CHECK(again.total == r.breakdown.total);
}

TEST_CASE("negative dirichlet data is rejected") {
  const Grid g = Grid::interval(0.0, 1.0, 10, -1.0, 0.0);
  CHECK_THROWS_AS(minimize(g, make_power(2.0), PenaltyParams{0.1, 0.5}, SolveConfig{}),
                  InvalidParameter);
}

TEST_CASE("large eps prefers a wider support in 1d") {
  // For eps = 1 and p = 2 the optimum support is 1/sqrt(2), not alpha.
  const Grid g = Grid::interval(0.0, 1.0, 200, 1.0, 0.0);
  const NFunction nf = make_power(2.0);
  const PenaltyParams pp{1.0, 0.5};
  const SolveResult r = minimize(g, nf, pp, SolveConfig{});
  CHECK(std::abs(r.breakdown.volume - 1.0 / std::sqrt(2.0)) <= 2.0 * g.spacing());
}
