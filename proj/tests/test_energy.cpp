#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "orlfb/energy.hpp"
#include "orlfb/errors.hpp"
#include "test_util.hpp"

using namespace orlfb;

namespace {

std::vector<NFunction> builtins() {
  std::vector<NFunction> v;
  for (double p : {1.5, 2.0, 3.0, 4.0}) v.push_back(make_power(p));
  v.push_back(make_sum_powers({{1.0, 2.0}, {1.0, 4.0}}));
  return v;
}

/// Central finite differences of the smoothed energy, the independent oracle
/// for the analytic gradient.
std::vector<double> fd_gradient(const ScalarField& u, const NFunction& nf, const PenaltyParams& pp,
                                double s_grad, double s_vol, double delta) {
  const Grid& g = u.grid();
  std::vector<double> out(static_cast<size_t>(g.num_nodes()), 0.0);
  ScalarField w = u;
  for (int n = 0; n < g.num_nodes(); ++n) {
    if (g.node_kind(n) != NodeKind::Interior) continue;
    const double keep = w[n];
    w[n] = keep + delta;
    const double fp = j_eps_smoothed(w, nf, pp, s_grad, s_vol);
    w[n] = keep - delta;
    const double fm = j_eps_smoothed(w, nf, pp, s_grad, s_vol);
    w[n] = keep;
    out[static_cast<size_t>(n)] = (fp - fm) / (2.0 * delta);
  }
  return out;
}

double rel_gradient_error(const std::vector<double>& a, const std::vector<double>& b) {
  double scale = 0.0, diff = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    scale = std::max(scale, std::abs(a[i]));
    diff = std::max(diff, std::abs(a[i] - b[i]));
  }
  return diff / std::max(scale, 1e-30);
}

}  // namespace

TEST_CASE("f_eps piecewise values") {
  const PenaltyParams pp{0.1, 1.0};
  CHECK(f_eps(0.5, pp) == doctest::Approx(-0.05));
  CHECK(f_eps(1.0, pp) == doctest::Approx(0.0));
  CHECK(f_eps(1.2, pp) == doctest::Approx(2.0));
}

TEST_CASE("f_eps sandwich: eps (B-A) <= F(B) - F(A) <= (B-A)/eps") {
  const PenaltyParams pp{0.2, 0.6};
  const auto xs = orlfb::test::random_values(200, 0.0, 2.0, 17);
  for (size_t i = 0; i + 1 < xs.size(); i += 2) {
    const double a = std::min(xs[i], xs[i + 1]);
    const double b = std::max(xs[i], xs[i + 1]);
    const double df = f_eps(b, pp) - f_eps(a, pp);
    CHECK(df >= pp.eps * (b - a) - 1e-12);
    CHECK(df <= (b - a) / pp.eps + 1e-12);
  }
}

TEST_CASE("j_eps on the 1d ramp") {
  const Grid g = Grid::interval(0.0, 1.0, 200, 1.0, 0.0);
  ScalarField u(g);
  for (int n = 0; n < g.num_nodes(); ++n) u[n] = std::max(1.0 - 2.0 * g.node_pos(n).x, 0.0);
  const NFunction nf = make_power(2.0);
  const PenaltyParams pp{0.1, 0.5};
  const EnergyBreakdown b = j_eps(u, nf, pp, 1e-8);
  // The ramp has slope 2 on half the interval: J = 0.5 G(2) = 1.
  CHECK(b.dirichlet_energy == doctest::Approx(1.0).epsilon(2.0 * g.spacing()));
  CHECK(std::abs(b.volume - 0.5) <= g.spacing());
  CHECK(b.penalty == doctest::Approx(f_eps(b.volume, pp)));
  CHECK(b.total == b.dirichlet_energy + b.penalty);
}

TEST_CASE("j_eps on the zero field equals -eps alpha") {
  const Grid g = Grid::interval(0.0, 1.0, 50, 0.0, 0.0);
  const ScalarField u(g);
  const PenaltyParams pp{0.25, 0.4};
  const EnergyBreakdown b = j_eps(u, make_power(2.0), pp, 1e-8);
  CHECK(b.dirichlet_energy == 0.0);
  CHECK(b.total == doctest::Approx(-pp.eps * pp.alpha));
}

TEST_CASE("j_eps on a 2d affine field") {
  const Grid g = Grid::square(0.0, 1.0, 0.0, 1.0, 64,
                              [](Vec2 p) { return 3.0 * p.x - 2.0 * p.y; });
  ScalarField u(g);
  for (int n = 0; n < g.num_nodes(); ++n) {
    const Vec2 p = g.node_pos(n);
    u[n] = 3.0 * p.x - 2.0 * p.y;
  }
  const NFunction nf = make_power(2.0);
  const PenaltyParams pp{0.1, 1.0};
  const EnergyBreakdown b = j_eps(u, nf, pp, 0.0);
  CHECK(b.dirichlet_energy == doctest::Approx(nf.G(std::sqrt(13.0))).epsilon(1e-12));
  // {3x > 2y} covers 2/3 of the unit square; cell counting is O(h) accurate.
  CHECK(std::abs(b.volume - 2.0 / 3.0) <= 2.0 * g.spacing());
}

TEST_CASE("smoothed energy reduces to the quadratic case exactly for p = 2") {
  const Grid g = Grid::interval(0.0, 1.0, 32, 1.0, 0.0);
  const NFunction nf = make_power(2.0);
  const ScalarField u = orlfb::test::random_field(g, 0.0, 1.0, 5);
  // G(sqrt(t^2 + s^2)) - G(s) = t^2/2 for the quadratic G, any s.
  const PenaltyParams pp{0.1, 0.5};
  const double a = j_eps_smoothed(u, nf, pp, 0.3, 1e-6);
  const double b = j_eps_smoothed(u, nf, pp, 1.7, 1e-6);
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("smoothed energy approaches the exact energy") {
  const Grid g = Grid::interval(0.0, 1.0, 100, 1.0, 0.0);
  ScalarField u(g);
  for (int n = 0; n < g.num_nodes(); ++n) u[n] = std::max(1.0 - 2.0 * g.node_pos(n).x, 0.0);
  const NFunction nf = make_sum_powers({{1.0, 2.0}, {1.0, 4.0}});
  const PenaltyParams pp{0.1, 0.5};
  const double exact = j_eps(u, nf, pp, 0.0).total;
  double prev = std::abs(j_eps_smoothed(u, nf, pp, 0.5, 0.5) - exact);
  for (double s : {0.1, 0.02, 0.004, 1e-4}) {
    const double err = std::abs(j_eps_smoothed(u, nf, pp, s, s) - exact);
    CHECK(err <= prev + 1e-12);
    prev = err;
  }
  CHECK(prev <= 1e-3);

  ScalarField z(Grid::interval(0.0, 1.0, 20, 0.0, 0.0));
  CHECK(j_eps_smoothed(z, nf, pp, 0.5, 0.5) == doctest::Approx(-pp.eps * pp.alpha));
}

TEST_CASE("analytic gradient matches central differences") {
  const PenaltyParams pp{0.1, 0.3};
  int cases = 0;
  for (const auto& nf : builtins()) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Grid g1 = Grid::interval(0.0, 1.0, 20, 1.0, 0.0);
      ScalarField u1 = orlfb::test::random_field(g1, -0.2, 1.0, seed);
      std::vector<double> grad;
      j_eps_smoothed_with_grad(u1, nf, pp, 0.35, 0.4, grad);
      const auto fd = fd_gradient(u1, nf, pp, 0.35, 0.4, 1e-6);
      CHECK(rel_gradient_error(grad, fd) <= 1e-5);

      const Grid g2 = Grid::square(0.0, 1.0, 0.0, 1.0, 16, [](Vec2) { return 0.7; });
      ScalarField u2 = orlfb::test::random_field(g2, -0.2, 1.0, seed + 100);
      j_eps_smoothed_with_grad(u2, nf, pp, 0.35, 0.4, grad);
      const auto fd2 = fd_gradient(u2, nf, pp, 0.35, 0.4, 1e-6);
      CHECK(rel_gradient_error(grad, fd2) <= 1e-5);
      cases += 2;
    }
  }
  CHECK(cases == 100);
}

TEST_CASE("gradient vanishes on constant fields with constant data") {
  const Grid g = Grid::square(0.0, 1.0, 0.0, 1.0, 12, [](Vec2) { return 0.8; });
  ScalarField u(g);
  for (int n = 0; n < g.num_nodes(); ++n) u[n] = 0.8;
  std::vector<double> grad;
  const PenaltyParams pp{0.1, 0.5};
  j_eps_smoothed_with_grad(u, make_power(3.0), pp, 0.2, 0.3, grad);
  // Only the volume term could push; with u = 0.8 > s_vol every cell is
  // saturated, so the whole gradient vanishes.
  for (double v : grad) CHECK(v == 0.0);
}

TEST_CASE("truncation never increases the exact energy") {
  const PenaltyParams pp{0.15, 0.4};
  for (const auto& nf : builtins()) {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
      const Grid g = seed % 2 == 1
                         ? Grid::interval(0.0, 1.0, 40, 0.9, 0.0)
                         : Grid::square(0.0, 1.0, 0.0, 1.0, 12, [](Vec2 p) { return 0.5 + 0.4 * p.x; });
      ScalarField u = orlfb::test::random_field(g, -0.6, 1.6, seed);
      const double M = g.max_dirichlet();
      const double base = j_eps(u, nf, pp, 1e-8).total;
      ScalarField up = u;
      for (int n = 0; n < g.num_nodes(); ++n)
        if (g.node_kind(n) == NodeKind::Interior) up[n] = std::max(up[n], 0.0);
      CHECK(j_eps(up, nf, pp, 1e-8).total <= base + 1e-12);
      ScalarField down = u;
      for (int n = 0; n < g.num_nodes(); ++n)
        if (g.node_kind(n) == NodeKind::Interior) down[n] = std::min(down[n], M);
      CHECK(j_eps(down, nf, pp, 1e-8).total <= base + 1e-12);
    }
  }
}

TEST_CASE("dirichlet term is convex") {
  for (const auto& nf : builtins()) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Grid g = Grid::square(0.0, 1.0, 0.0, 1.0, 10, [](Vec2) { return 0.0; });
      const ScalarField u = orlfb::test::random_field(g, -1.0, 1.0, seed);
      const ScalarField v = orlfb::test::random_field(g, -1.0, 1.0, seed + 40);
      const double th = 0.3 + 0.05 * static_cast<double>(seed % 7);
      ScalarField mix(g);
      for (int n = 0; n < g.num_nodes(); ++n) mix[n] = th * u[n] + (1.0 - th) * v[n];
      CHECK(dirichlet_energy(mix, nf) <=
            th * dirichlet_energy(u, nf) + (1.0 - th) * dirichlet_energy(v, nf) + 1e-12);
    }
  }
}

TEST_CASE("penalty validation") {
  CHECK_THROWS_AS(validate_penalty(PenaltyParams{0.0, 0.5}, 1.0), InvalidParameter);
  CHECK_THROWS_AS(validate_penalty(PenaltyParams{0.1, 0.0}, 1.0), InvalidParameter);
  CHECK_THROWS_AS(validate_penalty(PenaltyParams{0.1, 1.5}, 1.0), InvalidParameter);
  CHECK_NOTHROW(validate_penalty(PenaltyParams{0.1, 1.0}, 1.0));
  CHECK_NOTHROW(validate_penalty(PenaltyParams{0.1, 0.5}, 1.0));
}
