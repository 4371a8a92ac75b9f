#pragma once

#include <optional>
#include <string>
#include <vector>

#include "orlfb/solver.hpp"

namespace orlfb {

struct SweepRow {
  double eps = 0.0;
  double volume = 0.0;
  double lambda_mean = 0.0;  ///< NaN when the solution has no free boundary
  double lambda_cv = 0.0;
  double J = 0.0;      ///< Dirichlet energy of the chosen solution
  double J_eps = 0.0;  ///< penalized total
  bool converged = false;
  int iterations = 0;
  double wall_time = 0.0;  ///< seconds; 0 when timing is disabled
};

struct SweepResult {
  std::vector<SweepRow> rows;  ///< sorted by eps descending
  double alpha = 0.0;
  double vol_tol = 0.0;
  std::optional<double> eps0;
  std::optional<double> penalty_constant;  ///< fitted C with volume <= alpha + C eps above eps0
};

struct SweepOptions {
  std::vector<double> eps_list;
  SolveConfig solver;
  bool warm_start = true;
  /// When the warm-started solve misses the volume tolerance, also try a
  /// fresh constraint-feasible (LinearDecay) start and keep the lower energy.
  /// Guards against the full-support stationary trap of the smoothed flow.
  bool feasible_guard = true;
  bool timing = true;     ///< record wall time per row
  double vol_tol = -1.0;  ///< auto: one cell measure
};

/// One solve per eps, descending, warm-started down the ladder (cold mode
/// solves every row independently from both init strategies). Rows that throw
/// a numeric error are flagged and the sweep continues.
SweepResult run_sweep(const Grid& grid, const NFunction& nf, double alpha,
                      const SweepOptions& opts);

/// Largest eps in the sweep such that every row with eps' <= eps satisfies
/// |volume - alpha| <= vol_tol; empty when no row qualifies.
std::optional<double> detect_eps0(const std::vector<SweepRow>& rows, double alpha, double vol_tol);

/// Smallest C with volume <= alpha + C eps across rows above eps0; empty when
/// no converged row lies above eps0.
std::optional<double> fit_penalty_constant(const std::vector<SweepRow>& rows, double alpha,
                                           std::optional<double> eps0);

/// CSV with the fixed column set
/// eps,volume,lambda_mean,lambda_cv,J,J_eps,converged,iterations,wall_time.
std::string sweep_to_csv(const SweepResult& sweep);

}  // namespace orlfb
