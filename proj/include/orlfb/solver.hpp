#pragma once

#include <cstdint>

#include "orlfb/energy.hpp"
#include "orlfb/mesh.hpp"
#include "orlfb/orlicz.hpp"

namespace orlfb {

enum class InitStrategy { GEllipticExtend, LinearDecay };

/// Configuration for the continuation / projected-descent minimizer.
/// Negative values request the documented automatic choice.
struct SolveConfig {
  double s_grad_init = -1.0;  ///< auto: max phi0
  double s_vol_init = -1.0;   ///< auto: 0.5 * max phi0
  double continuation_factor = 0.5;
  double s_grad_min = -1.0;  ///< auto: grid spacing h
  double s_vol_min = -1.0;   ///< auto: half a cell measure
  int max_outer = 30;        ///< continuation stages
  int max_inner = 600;       ///< descent iterations per stage
  double armijo_c = 1e-4;
  double grad_tol = 1e-4;  ///< on the preconditioned projected-gradient sup-norm
  InitStrategy init = InitStrategy::GEllipticExtend;
  std::uint64_t rng_seed = 0;
  int restarts = 0;      ///< extra perturbed starts; the best energy wins
  bool polish = true;    ///< exact-energy support polish after continuation
  double theta_pos = -1.0;  ///< reporting threshold; auto: 1e-8 * max phi0
};

struct SolveResult {
  ScalarField field;
  EnergyBreakdown breakdown;
  int iterations = 0;
  bool converged = false;
  double stationarity = 0.0;  ///< final projected-gradient sup-norm
  bool energy_monotone = true;  ///< smoothed energy non-increasing within every stage
  double lambda_estimate = 0.0;  ///< mean |grad u| sampled just inside the free boundary; 0 if none
  double lambda_cv = 0.0;        ///< coefficient of variation of those samples
};

/// Builds the starting field. GEllipticExtend minimizes the Dirichlet term
/// alone (no penalty) for a fixed number of iterations from a boundary-data
/// blend; LinearDecay ramps down linearly with distance from the positive
/// Dirichlet set A, with the decay length calibrated so the initial support
/// measure is close to alpha (pass alpha <= 0 to decay across the full domain).
ScalarField initialize(const Grid& grid, const NFunction& nf, const SolveConfig& cfg,
                       double alpha = -1.0);

/// Minimizes the penalized energy over fields with fixed Dirichlet data by
/// projected gradient descent (Barzilai-Borwein trial steps, Armijo
/// backtracking along the projection arc, truncation to [0, max phi0]) with
/// continuation in both smoothing scales. Deterministic for a fixed config.
SolveResult minimize(const Grid& grid, const NFunction& nf, const PenaltyParams& pp,
                     const SolveConfig& cfg);

/// Same, but starting from the supplied field (its Dirichlet data is re-imposed).
SolveResult minimize_from(const Grid& grid, const NFunction& nf, const PenaltyParams& pp,
                          const SolveConfig& cfg, const ScalarField& initial);

}  // namespace orlfb
