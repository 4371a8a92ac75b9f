#include "orlfb/energy.hpp"

#include <cmath>

#include "orlfb/errors.hpp"

namespace orlfb {

void validate_penalty(const PenaltyParams& pp, double omega_measure) {
  if (!(pp.eps > 0.0)) throw InvalidParameter("penalty: eps must be positive");
  if (!(pp.alpha > 0.0) || !(pp.alpha <= omega_measure * (1.0 + 1e-12)))
    throw InvalidParameter("penalty: alpha must lie in (0, |Omega|]");
}

double f_eps(double s, const PenaltyParams& pp) {
  return s < pp.alpha ? pp.eps * (s - pp.alpha) : (s - pp.alpha) / pp.eps;
}

double dirichlet_energy(const ScalarField& f, const NFunction& nf) {
  const Grid& g = f.grid();
  const double m = g.cell_measure();
  double e = 0.0;
  for (int c = 0; c < g.num_cells(); ++c) {
    if (!g.cell_active(c)) continue;
    const Vec2 gr = cell_gradient(f, c);
    e += nf.G(std::hypot(gr.x, gr.y)) * m;
  }
  return e;
}

EnergyBreakdown j_eps(const ScalarField& f, const NFunction& nf, const PenaltyParams& pp,
                      double theta_pos) {
  EnergyBreakdown b;
  b.dirichlet_energy = dirichlet_energy(f, nf);
  b.volume = positivity_volume(f, theta_pos);
  b.penalty = f_eps(b.volume, pp);
  b.total = b.dirichlet_energy + b.penalty;
  return b;
}

double j_eps_smoothed(const ScalarField& f, const NFunction& nf, const PenaltyParams& pp,
                      double s_grad, double s_vol) {
  if (!(s_grad > 0.0) || !(s_vol > 0.0))
    throw InvalidParameter("j_eps_smoothed: smoothing scales must be positive");
  const Grid& g = f.grid();
  const double m = g.cell_measure();
  const double Gs0 = nf.G(s_grad);
  double e = 0.0;
  double svol = 0.0;
  for (int c = 0; c < g.num_cells(); ++c) {
    if (!g.cell_active(c)) continue;
    const Vec2 gr = cell_gradient(f, c);
    const double t = std::hypot(gr.x, gr.y);
    e += (nf.G(std::hypot(t, s_grad)) - Gs0) * m;
    const double cv = cell_center_value(f, c) / s_vol;
    svol += m * std::clamp(cv, 0.0, 1.0);
  }
  return e + f_eps(svol, pp);
}

SmoothedParts j_eps_smoothed_parts(const ScalarField& f, const NFunction& nf, double s_grad,
                                   double s_vol, std::vector<double>& e_grad,
                                   std::vector<double>& v_grad, std::vector<double>* curvature) {
  if (!(s_grad > 0.0) || !(s_vol > 0.0))
    throw InvalidParameter("j_eps_smoothed_parts: smoothing scales must be positive");
  const Grid& g = f.grid();
  const double m = g.cell_measure();
  const double h = g.spacing();
  const double Gs0 = nf.G(s_grad);
  e_grad.assign(static_cast<size_t>(g.num_nodes()), 0.0);
  v_grad.assign(static_cast<size_t>(g.num_nodes()), 0.0);
  if (curvature) curvature->assign(static_cast<size_t>(g.num_nodes()), 0.0);

  SmoothedParts out;
  if (g.dim() == 1) {
    for (int c = 0; c < g.num_cells(); ++c) {
      if (!g.cell_active(c)) continue;
      const double gx = (f[c + 1] - f[c]) / h;
      const double tr = std::hypot(gx, s_grad);
      out.energy += (nf.G(tr) - Gs0) * m;
      const double as = nf.g(tr) / tr;
      const double fe = m * as * gx / h;
      e_grad[static_cast<size_t>(c)] -= fe;
      e_grad[static_cast<size_t>(c + 1)] += fe;
      if (curvature) {
        const double kc = m * (nf.g_prime(tr) + as) / (h * h);
        (*curvature)[static_cast<size_t>(c)] += kc;
        (*curvature)[static_cast<size_t>(c + 1)] += kc;
      }
      const double cv = 0.5 * (f[c] + f[c + 1]);
      out.smoothed_vol += m * std::clamp(cv / s_vol, 0.0, 1.0);
      if (cv > 0.0 && cv < s_vol) {
        const double fv = m * 0.5 / s_vol;
        v_grad[static_cast<size_t>(c)] += fv;
        v_grad[static_cast<size_t>(c + 1)] += fv;
      }
    }
  } else {
    const double inv2h = 1.0 / (2.0 * h);
    for (int cy = 0; cy < g.ny(); ++cy)
      for (int cx = 0; cx < g.nx(); ++cx) {
        const int c = g.cell_index(cx, cy);
        if (!g.cell_active(c)) continue;
        const int n00 = g.node_index(cx, cy);
        const int n10 = g.node_index(cx + 1, cy);
        const int n01 = g.node_index(cx, cy + 1);
        const int n11 = g.node_index(cx + 1, cy + 1);
        const double gx = ((f[n10] + f[n11]) - (f[n00] + f[n01])) * inv2h;
        const double gy = ((f[n01] + f[n11]) - (f[n00] + f[n10])) * inv2h;
        const double tr = std::hypot(std::hypot(gx, gy), s_grad);
        out.energy += (nf.G(tr) - Gs0) * m;
        const double as = nf.g(tr) / tr;  // a_s(t), bounded at t = 0
        const double ax = m * as * gx * inv2h;
        const double ay = m * as * gy * inv2h;
        e_grad[static_cast<size_t>(n00)] += -ax - ay;
        e_grad[static_cast<size_t>(n10)] += ax - ay;
        e_grad[static_cast<size_t>(n01)] += -ax + ay;
        e_grad[static_cast<size_t>(n11)] += ax + ay;
        if (curvature) {
          const double kc = m * (nf.g_prime(tr) + as) * 2.0 * inv2h * inv2h;
          (*curvature)[static_cast<size_t>(n00)] += kc;
          (*curvature)[static_cast<size_t>(n10)] += kc;
          (*curvature)[static_cast<size_t>(n01)] += kc;
          (*curvature)[static_cast<size_t>(n11)] += kc;
        }
        const double cv = 0.25 * (f[n00] + f[n10] + f[n01] + f[n11]);
        out.smoothed_vol += m * std::clamp(cv / s_vol, 0.0, 1.0);
        if (cv > 0.0 && cv < s_vol) {
          const double fv = m * 0.25 / s_vol;
          v_grad[static_cast<size_t>(n00)] += fv;
          v_grad[static_cast<size_t>(n10)] += fv;
          v_grad[static_cast<size_t>(n01)] += fv;
          v_grad[static_cast<size_t>(n11)] += fv;
        }
      }
  }
  for (int n = 0; n < g.num_nodes(); ++n)
    if (g.node_kind(n) != NodeKind::Interior) {
      e_grad[static_cast<size_t>(n)] = 0.0;
      v_grad[static_cast<size_t>(n)] = 0.0;
    }
  return out;
}

double j_eps_smoothed_with_grad(const ScalarField& f, const NFunction& nf,
                                const PenaltyParams& pp, double s_grad, double s_vol,
                                std::vector<double>& grad) {
  std::vector<double> v_grad;
  const SmoothedParts parts = j_eps_smoothed_parts(f, nf, s_grad, s_vol, grad, v_grad);
  const double slope = parts.smoothed_vol < pp.alpha ? pp.eps : 1.0 / pp.eps;
  for (size_t i = 0; i < grad.size(); ++i) grad[i] += slope * v_grad[i];
  return parts.energy + f_eps(parts.smoothed_vol, pp);
}

}  // namespace orlfb
