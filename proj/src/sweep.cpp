#include "orlfb/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "orlfb/errors.hpp"

namespace orlfb {

namespace {

SweepRow row_from(const SolveResult& r, double eps, bool has_fb) {
  SweepRow row;
  row.eps = eps;
  row.volume = r.breakdown.volume;
  row.lambda_mean = has_fb ? r.lambda_estimate : std::numeric_limits<double>::quiet_NaN();
  row.lambda_cv = has_fb ? r.lambda_cv : std::numeric_limits<double>::quiet_NaN();
  row.J = r.breakdown.dirichlet_energy;
  row.J_eps = r.breakdown.total;
  row.converged = r.converged;
  row.iterations = r.iterations;
  return row;
}

}  // namespace

SweepResult run_sweep(const Grid& grid, const NFunction& nf, double alpha,
                      const SweepOptions& opts) {
  if (opts.eps_list.size() < 2) throw InvalidParameter("run_sweep: need at least two eps values");
  double emin = opts.eps_list.front(), emax = emin;
  for (double e : opts.eps_list) {
    if (!(e > 0.0)) throw InvalidParameter("run_sweep: eps values must be positive");
    emin = std::min(emin, e);
    emax = std::max(emax, e);
  }
  if (emax / emin < 100.0 * (1.0 - 1e-12))
    throw InvalidParameter("run_sweep: eps list must span at least two decades");

  std::vector<double> eps_sorted = opts.eps_list;
  std::sort(eps_sorted.begin(), eps_sorted.end(), std::greater<double>());

  SweepResult out;
  out.alpha = alpha;
  out.vol_tol = opts.vol_tol > 0.0 ? opts.vol_tol : grid.cell_measure();

  SolveConfig cfg_primary = opts.solver;
  SolveConfig cfg_decay = opts.solver;
  cfg_decay.init = InitStrategy::LinearDecay;

  std::optional<ScalarField> warm;
  for (double eps : eps_sorted) {
    const auto t0 = std::chrono::steady_clock::now();
    const PenaltyParams pp{eps, alpha};
    SweepRow row;
    row.eps = eps;
    try {
      std::optional<SolveResult> best;
      auto consider = [&](SolveResult&& r) {
        if (!best || r.breakdown.total < best->breakdown.total) best = std::move(r);
      };
      if (warm && opts.warm_start) {
        consider(minimize_from(grid, nf, pp, cfg_primary, *warm));
      } else {
        // First row / cold mode: try both starting strategies.
        consider(minimize_from(grid, nf, pp, cfg_primary, initialize(grid, nf, cfg_primary, alpha)));
        if (cfg_primary.init != InitStrategy::LinearDecay)
          consider(minimize_from(grid, nf, pp, cfg_decay, initialize(grid, nf, cfg_decay, alpha)));
      }
      if (opts.feasible_guard && std::abs(best->breakdown.volume - alpha) > out.vol_tol &&
          (warm && opts.warm_start)) {
        consider(minimize_from(grid, nf, pp, cfg_decay, initialize(grid, nf, cfg_decay, alpha)));
      }
      const bool has_fb = best->breakdown.volume > 0.0 &&
                          best->breakdown.volume < grid.omega_measure() &&
                          best->lambda_estimate > 0.0;
      row = row_from(*best, eps, has_fb);
      if (opts.warm_start) warm = best->field;
    } catch (const NumericError&) {
      row.volume = std::numeric_limits<double>::quiet_NaN();
      row.lambda_mean = std::numeric_limits<double>::quiet_NaN();
      row.lambda_cv = std::numeric_limits<double>::quiet_NaN();
      row.J = std::numeric_limits<double>::quiet_NaN();
      row.J_eps = std::numeric_limits<double>::quiet_NaN();
      row.converged = false;
    }
    if (opts.timing) {
      const auto t1 = std::chrono::steady_clock::now();
      row.wall_time = std::chrono::duration<double>(t1 - t0).count();
    }
    out.rows.push_back(row);
  }
  out.eps0 = detect_eps0(out.rows, alpha, out.vol_tol);
  out.penalty_constant = fit_penalty_constant(out.rows, alpha, out.eps0);
  return out;
}

std::optional<double> detect_eps0(const std::vector<SweepRow>& rows, double alpha, double vol_tol) {
  if (rows.empty()) return std::nullopt;
  std::optional<double> eps0;
  // Rows are sorted by eps descending; scan upward from the smallest eps.
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (!std::isfinite(it->volume) || std::abs(it->volume - alpha) > vol_tol) break;
    eps0 = it->eps;
  }
  return eps0;
}

std::optional<double> fit_penalty_constant(const std::vector<SweepRow>& rows, double alpha,
                                           std::optional<double> eps0) {
  std::optional<double> C;
  for (const auto& r : rows) {
    if (eps0 && r.eps <= *eps0) continue;
    if (!std::isfinite(r.volume)) continue;
    const double c = std::max(r.volume - alpha, 0.0) / r.eps;
    if (!C || c > *C) C = c;
  }
  return C;
}

std::string sweep_to_csv(const SweepResult& sweep) {
  std::string out = "eps,volume,lambda_mean,lambda_cv,J,J_eps,converged,iterations,wall_time\n";
  char buf[256];
  for (const auto& r : sweep.rows) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%d,%d,%.3f\n", r.eps,
                  r.volume, r.lambda_mean, r.lambda_cv, r.J, r.J_eps, r.converged ? 1 : 0,
                  r.iterations, r.wall_time);
    out += buf;
  }
  return out;
}

}  // namespace orlfb
