#include "orlfb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "orlfb/errors.hpp"
#include "orlfb/numerics.hpp"

namespace orlfb {

Ramp1D solve_1d_exact(double phi_left, double phi_right, double alpha, const NFunction& nf) {
  if (!(phi_left > 0.0)) throw InvalidParameter("solve_1d_exact: phi_left must be positive");
  if (phi_right != 0.0) throw InvalidParameter("solve_1d_exact: phi_right must be 0");
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw InvalidParameter("solve_1d_exact: alpha must be in (0, 1)");
  Ramp1D r;
  r.phi_left = phi_left;
  r.alpha = alpha;
  r.lambda = phi_left / alpha;
  r.energy = alpha * nf.G(r.lambda);
  return r;
}

double RadialSolution::u(double r) const {
  if (r <= r_star) return 0.0;
  if (r >= R) return u_tab.back();
  const double f = (r - r_star) / (R - r_star) * (static_cast<double>(r_tab.size()) - 1.0);
  const size_t i = std::min(static_cast<size_t>(f), r_tab.size() - 2);
  const double t = f - static_cast<double>(i);
  return (1.0 - t) * u_tab[i] + t * u_tab[i + 1];
}

double RadialSolution::du(double r) const {
  if (r <= r_star || r > R) return 0.0;
  return g_inverse(nf, flux_C / r);
}

RadialSolution solve_radial(double R, double phi_boundary, double alpha, const NFunction& nf, int N) {
  if (N != 2) throw InvalidParameter("solve_radial: only N = 2 is supported");
  if (!(R > 0.0) || !(phi_boundary > 0.0)) throw InvalidParameter("solve_radial: need R, phi > 0");
  const double pi = std::numbers::pi;
  if (!(alpha > 0.0) || !(alpha < pi * R * R))
    throw InvalidParameter("solve_radial: alpha must be in (0, pi R^2)");

  RadialSolution sol;
  sol.nf = nf;
  sol.R = R;
  sol.phi_boundary = phi_boundary;
  sol.alpha = alpha;
  sol.r_star = std::sqrt(R * R - alpha / pi);

  auto boundary_value = [&](double C) {
    return adaptive_simpson([&](double r) { return g_inverse(nf, C / r); }, sol.r_star, R, 1e-9);
  };

  // Shooting on the flux constant: the boundary value is increasing in C.
  double hi = 1.0;
  int guard = 0;
  while (boundary_value(hi) < phi_boundary) {
    hi *= 2.0;
    if (++guard > 400) throw NumericError("solve_radial: no bracket for the flux constant");
  }
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double v = boundary_value(mid);
    if (std::abs(v - phi_boundary) <= 1e-10 * phi_boundary) {
      lo = hi = mid;
      break;
    }
    if (v < phi_boundary)
      lo = mid;
    else
      hi = mid;
  }
  sol.flux_C = 0.5 * (lo + hi);
  sol.lambda = g_inverse(nf, sol.flux_C / sol.r_star);

  constexpr int m = 2048;
  sol.r_tab.resize(m + 1);
  sol.u_tab.resize(m + 1);
  sol.du_tab.resize(m + 1);
  const double dr = (R - sol.r_star) / m;
  sol.r_tab[0] = sol.r_star;
  sol.u_tab[0] = 0.0;
  sol.du_tab[0] = sol.lambda;
  for (int i = 1; i <= m; ++i) {
    const double a = sol.r_star + (i - 1) * dr;
    const double b = sol.r_star + i * dr;
    sol.r_tab[static_cast<size_t>(i)] = b;
    sol.u_tab[static_cast<size_t>(i)] =
        sol.u_tab[static_cast<size_t>(i - 1)] +
        adaptive_simpson([&](double r) { return g_inverse(nf, sol.flux_C / r); }, a, b, 1e-10);
    sol.du_tab[static_cast<size_t>(i)] = g_inverse(nf, sol.flux_C / b);
  }
  sol.energy = adaptive_simpson(
      [&](double r) { return nf.G(g_inverse(nf, sol.flux_C / r)) * 2.0 * pi * r; }, sol.r_star, R,
      1e-9);
  return sol;
}

ScalarField radial_field(const Grid& grid, const RadialSolution& sol) {
  ScalarField f(grid);
  for (int n = 0; n < grid.num_nodes(); ++n) {
    if (grid.node_kind(n) == NodeKind::Outside) continue;
    const Vec2 p = grid.node_pos(n);
    f[n] = sol.u(std::hypot(p.x, p.y));
  }
  return f;
}

}  // namespace orlfb
