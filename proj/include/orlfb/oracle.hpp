#pragma once

#include <vector>

#include "orlfb/mesh.hpp"
#include "orlfb/orlicz.hpp"

namespace orlfb {

/// Closed-form minimizer of the 1D volume-constrained problem on [0, 1] with
/// u(0) = phi_left > 0, u(1) = 0 and |{u > 0}| = alpha: the linear ramp
/// u(x) = phi_left (1 - x/alpha)^+. By Jensen's inequality (convexity of G is
/// all that is used) no admissible profile with the same support measure has
/// lower energy, for any G.
struct Ramp1D {
  double phi_left = 0.0;
  double alpha = 0.0;
  double lambda = 0.0;  ///< slope magnitude phi_left / alpha
  double energy = 0.0;  ///< alpha * G(lambda)

  double operator()(double x) const {
    const double v = phi_left * (1.0 - x / alpha);
    return v > 0.0 ? v : 0.0;
  }
};

Ramp1D solve_1d_exact(double phi_left, double phi_right, double alpha, const NFunction& nf);

/// Radial solution on the annulus r_star < r < R in the plane: u solves
/// L u = 0 with u(r_star) = 0, u(R) = phi_boundary, and the annulus measure
/// equals alpha. The flux identity g(u'(r)) r = C holds with a constant C
/// found by shooting on the boundary value.
struct RadialSolution {
  double R = 0.0;
  double phi_boundary = 0.0;
  double alpha = 0.0;
  double r_star = 0.0;   ///< free-boundary radius sqrt(R^2 - alpha/pi)
  double flux_C = 0.0;   ///< g(u'(r)) r = C on the annulus
  double lambda = 0.0;   ///< u'(r_star) = g^{-1}(C / r_star)
  double energy = 0.0;   ///< integral of G(u') over the annulus
  std::vector<double> r_tab;   ///< tabulation radii, r_star..R
  std::vector<double> u_tab;   ///< profile values
  std::vector<double> du_tab;  ///< profile slopes g^{-1}(C/r)
  NFunction nf;                ///< the N-function the profile was built for

  /// Profile value at radius r (0 inside the core, linear table interpolation
  /// on the annulus).
  double u(double r) const;
  /// Profile slope at radius r (0 inside the core, exact flux formula on the
  /// annulus).
  double du(double r) const;
};

RadialSolution solve_radial(double R, double phi_boundary, double alpha, const NFunction& nf,
                            int N = 2);

/// Samples a radial profile onto a grid: u(|x|) at domain nodes, boundary
/// nodes included. Useful for residual studies and field diffs.
ScalarField radial_field(const Grid& grid, const RadialSolution& sol);

}  // namespace orlfb
