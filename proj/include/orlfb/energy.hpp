#pragma once

#include <vector>

#include "orlfb/mesh.hpp"
#include "orlfb/orlicz.hpp"

namespace orlfb {

/// Volume penalization parameters: slope eps below the target alpha,
/// slope 1/eps above it.
struct PenaltyParams {
  double eps = 0.0;
  double alpha = 0.0;
};

/// Throws InvalidParameter unless eps > 0 and 0 < alpha <= omega_measure.
void validate_penalty(const PenaltyParams& pp, double omega_measure);

struct EnergyBreakdown {
  double dirichlet_energy = 0.0;  ///< sum of G(|grad u|) * cell measure
  double volume = 0.0;            ///< positivity volume at the reporting threshold
  double penalty = 0.0;           ///< F_eps(volume)
  double total = 0.0;             ///< dirichlet_energy + penalty, exactly
};

/// F_eps(s): eps*(s - alpha) for s < alpha, (s - alpha)/eps otherwise.
/// Continuous, zero at alpha, increasing.
double f_eps(double s, const PenaltyParams& pp);

/// The Dirichlet part alone: sum over active cells of G(|grad u|) * measure.
double dirichlet_energy(const ScalarField& f, const NFunction& nf);

/// Exact (unsmoothed) penalized energy used for reporting and acceptance.
EnergyBreakdown j_eps(const ScalarField& f, const NFunction& nf, const PenaltyParams& pp,
                      double theta_pos);

/// Regularized energy driving the optimizer: the gradient integrand becomes
/// G_s(t) = G(sqrt(t^2 + s_grad^2)) - G(s_grad) (so G_s(0) = 0 and the
/// flux coefficient stays bounded at t = 0) and the volume is replaced by
/// smoothed_volume(u, s_vol). Differentiable in u away from the F_eps kink.
double j_eps_smoothed(const ScalarField& f, const NFunction& nf, const PenaltyParams& pp,
                      double s_grad, double s_vol);

/// Value of j_eps_smoothed together with its exact derivative with respect to
/// interior nodal values (Dirichlet and Outside entries are zero). At the
/// smoothed-volume kink the upper slope 1/eps is used, biasing descent toward
/// satisfying the constraint.
double j_eps_smoothed_with_grad(const ScalarField& f, const NFunction& nf,
                                const PenaltyParams& pp, double s_grad, double s_vol,
                                std::vector<double>& grad);

struct SmoothedParts {
  double energy = 0.0;        ///< regularized Dirichlet term
  double smoothed_vol = 0.0;  ///< smoothed_volume(f, s_vol)
};

/// Decomposed form used by the solver: the Dirichlet-term gradient and the
/// smoothed-volume gradient separately, so a subgradient slope in [eps, 1/eps]
/// can be applied at the penalty kink. The full gradient at slope sigma is
/// e_grad + sigma * v_grad. When `curvature` is non-null it receives a
/// positive diagonal Hessian surrogate of the Dirichlet term (a Jacobi scale
/// for preconditioned descent).
SmoothedParts j_eps_smoothed_parts(const ScalarField& f, const NFunction& nf, double s_grad,
                                   double s_vol, std::vector<double>& e_grad,
                                   std::vector<double>& v_grad,
                                   std::vector<double>* curvature = nullptr);

}  // namespace orlfb
