#include "orlfb/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "orlfb/errors.hpp"
#include "orlfb/free_boundary.hpp"

namespace orlfb {

namespace {

struct SmoothedProblem {
  const Grid* grid;
  const NFunction* nf;
  PenaltyParams pp;
  double s_grad;
  double s_vol;
  bool with_penalty;

  double value(const ScalarField& u) const {
    if (with_penalty) return j_eps_smoothed(u, *nf, pp, s_grad, s_vol);
    const double m = grid->cell_measure();
    const double Gs0 = nf->G(s_grad);
    double e = 0.0;
    for (int c = 0; c < grid->num_cells(); ++c) {
      if (!grid->cell_active(c)) continue;
      const Vec2 gr = cell_gradient(u, c);
      e += (nf->G(std::hypot(std::hypot(gr.x, gr.y), s_grad)) - Gs0) * m;
    }
    return e;
  }

  SmoothedParts parts(const ScalarField& u, std::vector<double>& e_grad,
                      std::vector<double>& v_grad, std::vector<double>& curv) const {
    return j_eps_smoothed_parts(u, *nf, s_grad, s_vol, e_grad, v_grad, &curv);
  }

  double active_slope(double svol) const {
    if (!with_penalty) return 0.0;
    return svol < pp.alpha ? pp.eps : 1.0 / pp.eps;
  }

  double total(const SmoothedParts& p) const {
    return with_penalty ? p.energy + f_eps(p.smoothed_vol, pp) : p.energy;
  }
};

struct InnerStats {
  int iterations = 0;
  double f = 0.0;
  double stationarity = 0.0;
  bool monotone = true;
};

/// Projected descent with Barzilai-Borwein trial steps and Armijo
/// backtracking along the projection arc. The preconditioned direction is
/// clipped nodewise so the stiff volume forces near the free boundary cannot
/// starve the interior relaxation of step length. A step is accepted only
/// when it decreases the smoothed objective, so within-stage monotonicity
/// holds by construction. Nodes listed in `frozen` (support endgame) do not
/// move.
InnerStats descend(ScalarField& u, const SmoothedProblem& P, const SolveConfig& cfg, double tol,
                   int max_iter, double ubound, const std::vector<char>* frozen = nullptr) {
  const Grid& g = *P.grid;
  const int nn = g.num_nodes();
  std::vector<double> e_grad, v_grad, curv;
  std::vector<double> dir(static_cast<size_t>(nn), 0.0);
  std::vector<double> grad(static_cast<size_t>(nn), 0.0);
  std::vector<double> prev_u, prev_dir;
  auto movable = [&](int n) {
    return g.node_kind(n) == NodeKind::Interior &&
           (!frozen || !(*frozen)[static_cast<size_t>(n)]);
  };

  InnerStats st;
  SmoothedParts parts = P.parts(u, e_grad, v_grad, curv);
  double f = P.total(parts);
  if (!std::isfinite(f)) throw NumericError("solver: non-finite energy");
  double t_prev = -1.0;

  // Jacobi scaling by the Dirichlet-term Hessian diagonal keeps the step in
  // field units for both the smooth energy forces and the piecewise-constant
  // volume forces.
  auto assemble = [&] {
    const double slope = P.active_slope(parts.smoothed_vol);
    for (int n = 0; n < nn; ++n) {
      if (!movable(n)) {
        grad[static_cast<size_t>(n)] = 0.0;
        dir[static_cast<size_t>(n)] = 0.0;
        continue;
      }
      const double gn = e_grad[static_cast<size_t>(n)] + slope * v_grad[static_cast<size_t>(n)];
      grad[static_cast<size_t>(n)] = gn;
      dir[static_cast<size_t>(n)] = gn / std::max(curv[static_cast<size_t>(n)], 1e-300);
    }
  };

  // Projected-gradient residual with the penalty slope treated as a
  // subgradient: within one cell measure of the volume kink any slope in
  // [eps, 1/eps] is admissible, and the residual is the best over that range.
  auto residual = [&]() {
    auto resid_for = [&](double sigma) {
      double s = 0.0;
      for (int n = 0; n < nn; ++n) {
        if (!movable(n)) continue;
        const double d =
            (e_grad[static_cast<size_t>(n)] + sigma * v_grad[static_cast<size_t>(n)]) /
            std::max(curv[static_cast<size_t>(n)], 1e-300);
        const double un = u[n];
        s = std::max(s, std::abs(un - std::clamp(un - d, 0.0, ubound)));
      }
      return s;
    };
    if (!P.with_penalty) return resid_for(0.0);
    const double near_kink = g.cell_measure();
    if (std::abs(parts.smoothed_vol - P.pp.alpha) > near_kink)
      return resid_for(P.active_slope(parts.smoothed_vol));
    double best = std::numeric_limits<double>::infinity();
    const double lo = P.pp.eps;
    const double hi = 1.0 / P.pp.eps;
    constexpr int n_scan = 17;
    for (int k = 0; k < n_scan; ++k) {
      const double sigma = lo * std::pow(hi / lo, static_cast<double>(k) / (n_scan - 1));
      best = std::min(best, resid_for(sigma));
      if (best <= tol) break;
    }
    return best;
  };

  assemble();
  st.stationarity = residual();
  for (int it = 0; it < max_iter; ++it) {
    if (st.stationarity <= tol) break;

    double t;
    if (!prev_u.empty()) {
      double suu = 0.0, sud = 0.0;
      for (int n = 0; n < nn; ++n) {
        const double du = u[n] - prev_u[static_cast<size_t>(n)];
        const double dd = dir[static_cast<size_t>(n)] - prev_dir[static_cast<size_t>(n)];
        suu += du * du;
        sud += du * dd;
      }
      t = sud > 1e-300 ? suu / sud : (t_prev > 0.0 ? 2.0 * t_prev : 1.0);
    } else {
      t = 1.0;
    }
    t = std::clamp(t, 1e-14, 1e8);

    prev_u = u.values();
    prev_dir = dir;

    ScalarField trial = u;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      double pred = 0.0;
      for (int n = 0; n < nn; ++n) {
        if (!movable(n)) continue;
        const double un = prev_u[static_cast<size_t>(n)];
        const double nu = std::clamp(un - t * dir[static_cast<size_t>(n)], 0.0, ubound);
        trial[n] = nu;
        pred += grad[static_cast<size_t>(n)] * (un - nu);
      }
      if (!(pred > 0.0)) break;
      const double f_trial = P.value(trial);
      if (!std::isfinite(f_trial)) throw NumericError("solver: non-finite energy");
      if (f_trial <= f - cfg.armijo_c * pred) {
        if (f_trial > f) st.monotone = false;
        u = trial;
        f = f_trial;
        accepted = true;
        t_prev = t;
        break;
      }
      t *= 0.5;
    }
    ++st.iterations;
    if (!accepted) break;

    parts = P.parts(u, e_grad, v_grad, curv);
    f = P.total(parts);
    assemble();
    st.stationarity = residual();
  }
  st.f = f;
  return st;
}

/// Inverse-distance blend of the Dirichlet data, the starting point for the
/// gradient-only extension.
ScalarField shepard_blend(const Grid& g) {
  ScalarField u(g);
  const auto& bnodes = g.dirichlet_nodes();
  if (bnodes.empty()) return u;
  for (int n = 0; n < g.num_nodes(); ++n) {
    if (g.node_kind(n) != NodeKind::Interior) continue;
    const Vec2 p = g.node_pos(n);
    double num = 0.0, den = 0.0;
    for (int b : bnodes) {
      const Vec2 q = g.node_pos(b);
      const double d = std::hypot(p.x - q.x, p.y - q.y);
      const double w = 1.0 / std::max(d, 1e-12);
      num += w * g.dirichlet_value(b);
      den += w;
    }
    u[n] = num / den;
  }
  return u;
}

double resolve_theta(const Grid& g, const SolveConfig& cfg) {
  return cfg.theta_pos >= 0.0 ? cfg.theta_pos : 1e-8 * std::max(g.max_dirichlet(), 0.0);
}

}  // namespace

ScalarField initialize(const Grid& grid, const NFunction& nf, const SolveConfig& cfg, double alpha) {
  const double M = std::max(grid.max_dirichlet(), 0.0);
  if (cfg.init == InitStrategy::GEllipticExtend) {
    ScalarField u = shepard_blend(grid);
    const double sg = cfg.s_grad_init > 0.0 ? cfg.s_grad_init : std::max(M, 1e-6);
    SmoothedProblem P{&grid, &nf, PenaltyParams{1.0, 1.0}, sg, 1.0, false};
    descend(u, P, cfg, 0.0, 200, std::max(M, 1e-300));
    return u;
  }

  // LinearDecay: ramp down with distance from the positive Dirichlet set A,
  // decay length chosen so the initial support measure is close to alpha.
  ScalarField u(grid);
  const auto& A = grid.positive_dirichlet_nodes();
  if (A.empty()) return u;
  const int nn = grid.num_nodes();
  std::vector<double> dist(static_cast<size_t>(nn), std::numeric_limits<double>::infinity());
  std::vector<double> phi_near(static_cast<size_t>(nn), 0.0);
  for (int n = 0; n < nn; ++n) {
    if (grid.node_kind(n) == NodeKind::Outside) continue;
    const Vec2 p = grid.node_pos(n);
    for (int b : A) {
      const Vec2 q = grid.node_pos(b);
      const double d = std::hypot(p.x - q.x, p.y - q.y);
      if (d < dist[static_cast<size_t>(n)]) {
        dist[static_cast<size_t>(n)] = d;
        phi_near[static_cast<size_t>(n)] = grid.dirichlet_value(b);
      }
    }
  }
  auto build = [&](double decay) {
    for (int n = 0; n < nn; ++n) {
      if (grid.node_kind(n) != NodeKind::Interior) continue;
      u[n] = phi_near[static_cast<size_t>(n)] *
             std::max(1.0 - dist[static_cast<size_t>(n)] / decay, 0.0);
    }
    u.enforce_boundary();
  };
  const double target = alpha > 0.0 ? std::min(alpha, grid.omega_measure()) : grid.omega_measure();
  double lo = grid.spacing();
  double hi = grid.diameter() * 2.0;
  build(hi);
  if (positivity_volume(u, 0.0) > target) {
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      build(mid);
      if (positivity_volume(u, 0.0) > target)
        hi = mid;
      else
        lo = mid;
    }
    build(hi);
  }
  return u;
}

namespace {

SolveResult solve_single(const Grid& grid, const NFunction& nf, const PenaltyParams& pp,
                         const SolveConfig& cfg, ScalarField u) {
  validate_penalty(pp, grid.omega_measure());
  if (grid.min_dirichlet() < 0.0)
    throw InvalidParameter("minimize: Dirichlet data must be nonnegative");

  const double h = grid.spacing();
  const double M = std::max(grid.max_dirichlet(), 0.0);
  const double theta = resolve_theta(grid, cfg);
  const double sg0 = cfg.s_grad_init > 0.0 ? cfg.s_grad_init : std::max(M, 1e-6);
  const double sv0 = cfg.s_vol_init > 0.0 ? cfg.s_vol_init : std::max(0.5 * M, 1e-9);
  const double sg_min = cfg.s_grad_min > 0.0 ? cfg.s_grad_min : h;
  // Below the slope scale times h the transition band no longer covers the
  // cells straddling the free boundary and the volume term loses its grip,
  // so the smoothing floor stays at that scale; the support endgame below
  // does the sub-cell placement.
  const double sv_min = cfg.s_vol_min > 0.0 ? cfg.s_vol_min : std::max(M, 1e-6) * h;
  const double fac = cfg.continuation_factor;
  if (!(fac > 0.0) || !(fac < 1.0))
    throw InvalidParameter("minimize: continuation_factor must be in (0, 1)");

  u.enforce_boundary();
  SolveResult res{u, {}, 0, false, 0.0, true, 0.0, 0.0};

  // Stage tolerances live in field units (the residual is a projected step
  // length), so they scale with the data amplitude, not with the energy.
  const double u_scale = std::max(M, 1e-12);

  double sg = std::max(sg0, sg_min), sv = std::max(sv0, sv_min);
  InnerStats last;
  for (int stage = 0; stage < cfg.max_outer; ++stage) {
    const bool final_stage = sg <= sg_min * (1.0 + 1e-12) && sv <= sv_min * (1.0 + 1e-12);
    SmoothedProblem P{&grid, &nf, pp, sg, sv, true};
    const double tol = (final_stage ? 1.0 : 10.0) * cfg.grad_tol * u_scale;
    last = descend(res.field, P, cfg, tol, cfg.max_inner, std::max(M, 1e-300));
    res.iterations += last.iterations;
    res.energy_monotone = res.energy_monotone && last.monotone;
    if (final_stage) break;
    sg = std::max(sg * fac, sg_min);
    sv = std::max(sv * fac, sv_min);
  }

  // Support endgame. The smoothed flow places the free boundary only to
  // within its transition band, and the penalty kink makes its stationarity
  // ill-defined there. Alternate two deterministic, exactly-monotone phases:
  //   (a) relax the Dirichlet energy with the dead set frozen (the volume is
  //       then constant, so this is plain smooth descent on the support), and
  //   (b) move the support itself: cut the low band of the profile (retreat)
  //       or extend the ramp into adjacent dead nodes (advance). Cut
  ///      candidates are re-relaxed briefly before comparison, because the
  //       raw cut concentrates the removed drop in one cell layer; a move is
  //       accepted only when the exact penalized energy strictly decreases.
  bool endgame_exhausted = !cfg.polish;
  SmoothedProblem relaxP{&grid, &nf, pp, sg, sv, false};
  const double relax_tol = cfg.grad_tol * u_scale;
  auto frozen_mask = [&](const ScalarField& u0) {
    std::vector<char> mask(static_cast<size_t>(grid.num_nodes()), 0);
    for (int n = 0; n < grid.num_nodes(); ++n)
      if (!(u0[n] > 0.0)) mask[static_cast<size_t>(n)] = 1;
    return mask;
  };
  auto plateau_relax = [&](ScalarField& u0, int iters) {
    const std::vector<char> mask = frozen_mask(u0);
    const InnerStats st = descend(u0, relaxP, cfg, relax_tol, iters, std::max(M, 1e-300), &mask);
    res.iterations += st.iterations;
    res.energy_monotone = res.energy_monotone && st.monotone;
    return st;
  };
  if (cfg.polish) {
    for (int round = 0; round < 48; ++round) {
      last = plateau_relax(res.field, 300);
      const double base = j_eps(res.field, nf, pp, theta).total;
      double best = base;
      ScalarField best_u = res.field;
      bool improved = false;
      auto consider = [&](const ScalarField& cand) {
        const double val = j_eps(cand, nf, pp, theta).total;
        if (val < best - 1e-12 * (1.0 + std::abs(base))) {
          best = val;
          best_u = cand;
          improved = true;
        }
      };

      double lam_hat = 0.0;
      for (int c = 0; c < grid.num_cells(); ++c) {
        if (!grid.cell_active(c)) continue;
        const Vec2 gr = cell_gradient(res.field, c);
        lam_hat = std::max(lam_hat, std::hypot(gr.x, gr.y));
      }
      if (lam_hat > 0.0) {
        // Sub-cell retreat: lower the whole interior profile a little. The
        // kink this puts at the fixed boundary is second order for tau << h.
        for (double frac : {0.02, 0.06, 0.15, 0.4}) {
          const double tau = frac * lam_hat * h;
          ScalarField cand = res.field;
          for (int n = 0; n < grid.num_nodes(); ++n)
            if (grid.node_kind(n) == NodeKind::Interior) cand[n] = std::max(cand[n] - tau, 0.0);
          consider(cand);
        }
        // Multi-cell retreat: zero out the band below tau and re-relax so the
        // comparison sees the settled profile, not the transient cliff.
        for (double cells : {1.0, 4.0, 16.0, 64.0}) {
          const double tau = cells * lam_hat * h;
          if (tau >= M) continue;
          ScalarField cand = res.field;
          bool changed = false;
          for (int n = 0; n < grid.num_nodes(); ++n)
            if (grid.node_kind(n) == NodeKind::Interior && cand[n] > 0.0 && cand[n] <= tau) {
              cand[n] = 0.0;
              changed = true;
            }
          if (!changed) continue;
          plateau_relax(cand, 40);
          consider(cand);
        }
        // Advance: extend the ramp into dead nodes next to the positive phase.
        for (double off_frac : {0.5, 0.8, 0.95}) {
          ScalarField cand = res.field;
          const double offset = off_frac * lam_hat * h;
          bool changed = false;
          const int nyy = grid.dim() == 1 ? 0 : grid.ny();
          for (int iy = 0; iy <= nyy; ++iy)
            for (int ix = 0; ix <= grid.nx(); ++ix) {
              const int n = grid.node_index(ix, iy);
              if (grid.node_kind(n) != NodeKind::Interior || res.field[n] > 0.0) continue;
              double v = 0.0;
              auto look = [&](int jx, int jy) {
                if (jx < 0 || jx > grid.nx() || jy < 0 || (grid.dim() == 2 && jy > grid.ny()))
                  return;
                const int j = grid.node_index(jx, jy);
                if (grid.node_kind(j) == NodeKind::Outside) return;
                v = std::max(v, res.field[j] - offset);
              };
              look(ix - 1, iy);
              look(ix + 1, iy);
              if (grid.dim() == 2) {
                look(ix, iy - 1);
                look(ix, iy + 1);
              }
              if (v > 0.0) {
                cand[n] = std::min(v, M);
                changed = true;
              }
            }
          if (changed) consider(cand);
        }
      }
      if (!improved) {
        endgame_exhausted = true;
        break;
      }
      res.field = best_u;
    }
    last = plateau_relax(res.field, 300);
  }

  res.breakdown = j_eps(res.field, nf, pp, theta);
  res.stationarity = last.stationarity;
  res.converged = endgame_exhausted &&
                  last.stationarity <= cfg.grad_tol * (1.0 + std::abs(res.breakdown.total));
  try {
    const FreeBoundary fb = extract_fb(res.field, theta);
    const LambdaStats ls = estimate_lambda(res.field, fb, 2.0 * h);
    res.lambda_estimate = ls.mean;
    res.lambda_cv = ls.cv;
  } catch (const NoFreeBoundary&) {
    res.lambda_estimate = 0.0;
    res.lambda_cv = 0.0;
  }
  return res;
}

}  // namespace

SolveResult minimize_from(const Grid& grid, const NFunction& nf, const PenaltyParams& pp,
                          const SolveConfig& cfg, const ScalarField& initial) {
  SolveResult best = solve_single(grid, nf, pp, cfg, initial);
  if (cfg.restarts > 0) {
    std::mt19937_64 rng(cfg.rng_seed);
    std::normal_distribution<double> noise(0.0, 0.05 * std::max(grid.max_dirichlet(), 1e-6));
    for (int k = 0; k < cfg.restarts; ++k) {
      ScalarField u = initial;
      for (int n = 0; n < grid.num_nodes(); ++n)
        if (grid.node_kind(n) == NodeKind::Interior)
          u[n] = std::clamp(u[n] + noise(rng), 0.0, std::max(grid.max_dirichlet(), 0.0));
      SolveResult r = solve_single(grid, nf, pp, cfg, u);
      r.iterations += best.iterations;
      if (r.breakdown.total < best.breakdown.total) best = r;
    }
  }
  return best;
}

SolveResult minimize(const Grid& grid, const NFunction& nf, const PenaltyParams& pp,
                     const SolveConfig& cfg) {
  return minimize_from(grid, nf, pp, cfg, initialize(grid, nf, cfg, pp.alpha));
}

}  // namespace orlfb
