#include "orlfb/free_boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "orlfb/errors.hpp"

namespace orlfb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sq(double v) { return v * v; }

/// Distance from p to the nearest FB point.
double fb_distance(const FreeBoundary& fb, Vec2 p) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& q : fb.points) d = std::min(d, std::hypot(p.x - q.p.x, p.y - q.p.y));
  return d;
}

}  // namespace

FreeBoundary extract_fb(const ScalarField& f, double theta_pos) {
  const Grid& g = f.grid();
  const double vol = positivity_volume(f, theta_pos);
  if (vol <= 0.0) throw NoFreeBoundary("extract_fb: positivity set is empty");
  if (vol >= g.omega_measure()) throw NoFreeBoundary("extract_fb: positivity set fills the domain");

  FreeBoundary fb;
  if (g.dim() == 1) {
    for (int c = 0; c < g.num_cells(); ++c) {
      if (!g.cell_active(c)) continue;
      const double v0 = f[c] - theta_pos;
      const double v1 = f[c + 1] - theta_pos;
      if ((v0 > 0.0) == (v1 > 0.0)) continue;
      const double t = v0 / (v0 - v1);
      const double x = g.node_pos(c).x + t * g.spacing();
      fb.points.push_back({{x, 0.0}, {v0 > 0.0 ? -1.0 : 1.0, 0.0}});
    }
    if (fb.points.empty()) throw NoFreeBoundary("extract_fb: no sign change found");
    return fb;
  }

  const double h = g.spacing();
  for (int cy = 0; cy < g.ny(); ++cy)
    for (int cx = 0; cx < g.nx(); ++cx) {
      const int c = g.cell_index(cx, cy);
      if (!g.cell_active(c)) continue;
      const Vec2 o = g.node_pos(g.node_index(cx, cy));
      const double v[4] = {f[g.node_index(cx, cy)] - theta_pos,
                           f[g.node_index(cx + 1, cy)] - theta_pos,
                           f[g.node_index(cx + 1, cy + 1)] - theta_pos,
                           f[g.node_index(cx, cy + 1)] - theta_pos};
      // Corner coordinates in cell-local units, edges in ccw order.
      static constexpr double px[4] = {0, 1, 1, 0};
      static constexpr double py[4] = {0, 0, 1, 1};
      Vec2 cross[4];
      int ncross = 0;
      for (int e = 0; e < 4; ++e) {
        const int a = e, b = (e + 1) % 4;
        if ((v[a] > 0.0) == (v[b] > 0.0)) continue;
        const double t = v[a] / (v[a] - v[b]);
        cross[ncross++] = {o.x + h * (px[a] + t * (px[b] - px[a])),
                           o.y + h * (py[a] + t * (py[b] - py[a]))};
      }
      for (int k = 0; k + 1 < ncross; k += 2) {
        const Vec2 mid{0.5 * (cross[k].x + cross[k + 1].x), 0.5 * (cross[k].y + cross[k + 1].y)};
        Vec2 grad = gradient_at(f, mid);
        double gn = std::hypot(grad.x, grad.y);
        if (gn < 1e-14) {
          // Degenerate gradient: orient the segment normal toward the positive corners.
          const double tx = cross[k + 1].x - cross[k].x;
          const double ty = cross[k + 1].y - cross[k].y;
          Vec2 n{-ty, tx};
          double score = 0.0;
          for (int q = 0; q < 4; ++q)
            score += v[q] * ((o.x + h * px[q] - mid.x) * n.x + (o.y + h * py[q] - mid.y) * n.y);
          if (score < 0.0) n = {ty, -tx};
          gn = std::hypot(n.x, n.y);
          grad = gn > 0.0 ? Vec2{n.x / gn, n.y / gn} : Vec2{1.0, 0.0};
          fb.points.push_back({mid, grad});
        } else {
          fb.points.push_back({mid, {grad.x / gn, grad.y / gn}});
        }
      }
    }
  if (fb.points.empty()) throw NoFreeBoundary("extract_fb: no sign change found");
  return fb;
}

LambdaStats estimate_lambda(const ScalarField& f, const FreeBoundary& fb, double d) {
  const Grid& g = f.grid();
  const double h = g.spacing();
  if (!(d >= h * (1.0 - 1e-12)) || !(d <= 5.0 * h * (1.0 + 1e-12)))
    throw InvalidParameter("estimate_lambda: offset d must lie in [h, 5h]");
  LambdaStats st;
  for (const auto& q : fb.points) {
    const Vec2 s{q.p.x + d * q.nu.x, q.p.y + d * q.nu.y};
    if (!g.point_in_domain(s)) {
      ++st.skipped;
      continue;
    }
    const Vec2 gr = gradient_at(f, s);
    st.samples.push_back(std::hypot(gr.x, gr.y));
  }
  if (st.samples.empty()) return st;
  double sum = 0.0;
  for (double v : st.samples) sum += v;
  st.mean = sum / static_cast<double>(st.samples.size());
  double var = 0.0;
  for (double v : st.samples) var += sq(v - st.mean);
  var /= static_cast<double>(st.samples.size());
  st.cv = st.mean > 0.0 ? std::sqrt(var) / st.mean : 0.0;
  return st;
}

namespace {

/// Sums cell measures over active cells with centers in the ball; reports
/// whether any lattice cell center inside the ball is inactive or missing
/// (the ball then leaves the domain).
struct BallScan {
  double measure_all = 0.0;
  double measure_pos = 0.0;
  double power_sum = 0.0;  // sum of (value^gamma) * measure over all cells
  bool exits_domain = false;
};

BallScan scan_ball(const ScalarField& f, Vec2 p, double r, double theta_pos, double gamma) {
  const Grid& g = f.grid();
  const double h = g.spacing();
  const double m = g.cell_measure();
  BallScan out;
  if (g.dim() == 1) {
    if (p.x - r < g.origin_x() - 1e-12 || p.x + r > g.origin_x() + h * g.nx() + 1e-12)
      out.exits_domain = true;
    const int c0 = std::max(0, static_cast<int>(std::floor((p.x - r - g.origin_x()) / h)));
    const int c1 = std::min(g.num_cells() - 1, static_cast<int>(std::ceil((p.x + r - g.origin_x()) / h)));
    for (int c = c0; c <= c1; ++c) {
      const Vec2 cc = g.cell_center(c);
      if (std::abs(cc.x - p.x) > r) continue;
      if (!g.cell_active(c)) {
        out.exits_domain = true;
        continue;
      }
      const double v = cell_center_value(f, c);
      out.measure_all += m;
      if (v > theta_pos) out.measure_pos += m;
      out.power_sum += std::pow(std::max(v, 0.0), gamma) * m;
    }
    return out;
  }
  const int cx0 = std::max(0, static_cast<int>(std::floor((p.x - r - g.origin_x()) / h)));
  const int cx1 = std::min(g.nx() - 1, static_cast<int>(std::ceil((p.x + r - g.origin_x()) / h)));
  const int cy0 = std::max(0, static_cast<int>(std::floor((p.y - r - g.origin_y()) / h)));
  const int cy1 = std::min(g.ny() - 1, static_cast<int>(std::ceil((p.y + r - g.origin_y()) / h)));
  // A ball touching the lattice hull has left the domain.
  if (p.x - r < g.origin_x() - 1e-12 || p.x + r > g.origin_x() + h * g.nx() + 1e-12 ||
      p.y - r < g.origin_y() - 1e-12 || p.y + r > g.origin_y() + h * g.ny() + 1e-12)
    out.exits_domain = true;
  for (int cy = cy0; cy <= cy1; ++cy)
    for (int cx = cx0; cx <= cx1; ++cx) {
      const int c = g.cell_index(cx, cy);
      const Vec2 cc = g.cell_center(c);
      if (sq(cc.x - p.x) + sq(cc.y - p.y) > r * r) continue;
      if (!g.cell_active(c)) {
        out.exits_domain = true;
        continue;
      }
      const double v = cell_center_value(f, c);
      out.measure_all += m;
      if (v > theta_pos) out.measure_pos += m;
      out.power_sum += std::pow(std::max(v, 0.0), gamma) * m;
    }
  return out;
}

}  // namespace

std::vector<double> density_ratios(const ScalarField& f, Vec2 point,
                                   const std::vector<double>& radii, double theta_pos) {
  std::vector<double> out;
  out.reserve(radii.size());
  for (double r : radii) {
    const BallScan b = scan_ball(f, point, r, theta_pos, 1.0);
    out.push_back(b.exits_domain || b.measure_all <= 0.0 ? kNaN : b.measure_pos / b.measure_all);
  }
  return out;
}

std::vector<double> nondegeneracy(const ScalarField& f, Vec2 point,
                                  const std::vector<double>& radii, double gamma) {
  if (!(gamma >= 1.0)) throw InvalidParameter("nondegeneracy: gamma must be >= 1");
  std::vector<double> out;
  out.reserve(radii.size());
  for (double r : radii) {
    const BallScan b = scan_ball(f, point, r, 0.0, gamma);
    if (b.exits_domain || b.measure_all <= 0.0) {
      out.push_back(kNaN);
      continue;
    }
    out.push_back(std::pow(b.power_sum / b.measure_all, 1.0 / gamma) / r);
  }
  return out;
}

GrowthStats linear_growth(const ScalarField& f, const FreeBoundary& fb, double theta_pos) {
  if (fb.points.empty()) throw InvalidParameter("linear_growth: empty free boundary");
  const Grid& g = f.grid();
  std::vector<double> ratios;
  for (int n = 0; n < g.num_nodes(); ++n) {
    if (g.node_kind(n) == NodeKind::Outside) continue;
    if (!(f[n] > theta_pos)) continue;
    const double d = fb_distance(fb, g.node_pos(n));
    if (!(d > 0.0)) continue;
    ratios.push_back(f[n] / d);
  }
  GrowthStats st;
  st.count = static_cast<int>(ratios.size());
  if (ratios.empty()) return st;
  std::sort(ratios.begin(), ratios.end());
  st.min = ratios.front();
  st.max = ratios.back();
  double sum = 0.0;
  for (double v : ratios) sum += v;
  st.mean = sum / static_cast<double>(ratios.size());
  st.deciles.resize(11);
  for (int k = 0; k <= 10; ++k) {
    const size_t i = std::min(ratios.size() - 1, static_cast<size_t>(k * (ratios.size() - 1) / 10));
    st.deciles[static_cast<size_t>(k)] = ratios[i];
  }
  return st;
}

namespace {

/// Unit-ball stencil offsets for the blow-up fit.
std::vector<Vec2> blowup_stencil(int dim) {
  std::vector<Vec2> offs;
  if (dim == 1) {
    for (double s : {-1.0, -0.75, -0.5, -0.25, 0.25, 0.5, 0.75, 1.0}) offs.push_back({s, 0.0});
    return offs;
  }
  constexpr int n_ang = 16;
  for (int k = 0; k < n_ang; ++k) {
    const double a = 2.0 * std::numbers::pi * k / n_ang;
    for (double rr : {0.25, 0.5, 0.75, 1.0}) offs.push_back({rr * std::cos(a), rr * std::sin(a)});
  }
  return offs;
}

/// Given samples w_j at offsets x_j and a candidate inward direction m, the
/// optimal slope is closed-form; returns the mean-square misfit.
double fit_direction(const std::vector<Vec2>& xs, const std::vector<double>& ws, Vec2 m,
                     double& lambda_out) {
  double num = 0.0, den = 0.0;
  for (size_t j = 0; j < xs.size(); ++j) {
    const double ph = std::max(xs[j].x * m.x + xs[j].y * m.y, 0.0);
    num += ws[j] * ph;
    den += ph * ph;
  }
  const double lambda = den > 0.0 ? std::max(num / den, 0.0) : 0.0;
  double mis = 0.0;
  for (size_t j = 0; j < xs.size(); ++j) {
    const double ph = std::max(xs[j].x * m.x + xs[j].y * m.y, 0.0);
    mis += sq(ws[j] - lambda * ph);
  }
  lambda_out = lambda;
  return mis / static_cast<double>(xs.size());
}

}  // namespace

std::vector<BlowupFit> blowup_fit(const ScalarField& f, Vec2 point,
                                  const std::vector<double>& rho_list) {
  const Grid& g = f.grid();
  const auto stencil = blowup_stencil(g.dim());
  std::vector<BlowupFit> fits;
  fits.reserve(rho_list.size());
  for (double rho : rho_list) {
    if (!(rho > 0.0)) throw InvalidParameter("blowup_fit: rho must be positive");
    std::vector<Vec2> xs;
    std::vector<double> ws;
    for (const Vec2& o : stencil) {
      const Vec2 s{point.x + rho * o.x, point.y + rho * o.y};
      if (!g.point_in_domain(s)) continue;  // shrink the stencil at the domain edge
      xs.push_back(o);
      ws.push_back(value_at(f, s) / rho);
    }
    BlowupFit fit;
    fit.rho = rho;
    fit.stencil_total = static_cast<int>(stencil.size());
    fit.stencil_used = static_cast<int>(xs.size());
    if (xs.size() < 3) {
      fit.residual = kNaN;
      fits.push_back(fit);
      continue;
    }
    if (g.dim() == 1) {
      double lp = 0.0, lm = 0.0;
      const double mp = fit_direction(xs, ws, {1.0, 0.0}, lp);
      const double mm = fit_direction(xs, ws, {-1.0, 0.0}, lm);
      if (mp <= mm) {
        fit.nu = {1.0, 0.0};
        fit.lambda = lp;
        fit.residual = std::sqrt(mp);
      } else {
        fit.nu = {-1.0, 0.0};
        fit.lambda = lm;
        fit.residual = std::sqrt(mm);
      }
    } else {
      // Coarse angular sweep, then golden-section refinement around the best.
      constexpr int n_coarse = 180;
      double best_a = 0.0, best_mis = std::numeric_limits<double>::infinity(), best_l = 0.0;
      for (int k = 0; k < n_coarse; ++k) {
        const double a = 2.0 * std::numbers::pi * k / n_coarse;
        double l = 0.0;
        const double mis = fit_direction(xs, ws, {std::cos(a), std::sin(a)}, l);
        if (mis < best_mis) {
          best_mis = mis;
          best_a = a;
          best_l = l;
        }
      }
      const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
      double a_lo = best_a - 2.0 * std::numbers::pi / n_coarse;
      double a_hi = best_a + 2.0 * std::numbers::pi / n_coarse;
      for (int it = 0; it < 40; ++it) {
        const double a1 = a_hi - gr * (a_hi - a_lo);
        const double a2 = a_lo + gr * (a_hi - a_lo);
        double l1 = 0.0, l2 = 0.0;
        const double m1 = fit_direction(xs, ws, {std::cos(a1), std::sin(a1)}, l1);
        const double m2 = fit_direction(xs, ws, {std::cos(a2), std::sin(a2)}, l2);
        if (m1 <= m2) {
          a_hi = a2;
          if (m1 < best_mis) {
            best_mis = m1;
            best_a = a1;
            best_l = l1;
          }
        } else {
          a_lo = a1;
          if (m2 < best_mis) {
            best_mis = m2;
            best_a = a2;
            best_l = l2;
          }
        }
      }
      fit.nu = {std::cos(best_a), std::sin(best_a)};
      fit.lambda = best_l;
      fit.residual = std::sqrt(best_mis);
    }
    fits.push_back(fit);
  }
  return fits;
}

std::vector<double> phi_average(const ScalarField& f, const NFunction& nf, Vec2 point,
                                const std::vector<double>& radii, double lambda_ref,
                                double theta_pos) {
  const Grid& g = f.grid();
  const double h = g.spacing();
  const double m = g.cell_measure();
  const double phi_ref = phi(nf, std::max(lambda_ref, 0.0));
  std::vector<double> out;
  out.reserve(radii.size());
  for (double r : radii) {
    double sum = 0.0, meas = 0.0;
    const int cx0 = std::max(0, static_cast<int>(std::floor((point.x - r - g.origin_x()) / h)));
    const int cx1 = std::min((g.dim() == 1 ? g.num_cells() : g.nx()) - 1,
                             static_cast<int>(std::ceil((point.x + r - g.origin_x()) / h)));
    const int cy0 = g.dim() == 1 ? 0
                                 : std::max(0, static_cast<int>(std::floor((point.y - r - g.origin_y()) / h)));
    const int cy1 = g.dim() == 1 ? 0
                                 : std::min(g.ny() - 1,
                                            static_cast<int>(std::ceil((point.y + r - g.origin_y()) / h)));
    for (int cy = cy0; cy <= cy1; ++cy)
      for (int cx = cx0; cx <= cx1; ++cx) {
        const int c = g.dim() == 1 ? cx : g.cell_index(cx, cy);
        if (!g.cell_active(c)) continue;
        const Vec2 cc = g.cell_center(c);
        if (sq(cc.x - point.x) + sq(cc.y - point.y) > r * r) continue;
        if (!(cell_center_value(f, c) > theta_pos)) continue;
        const Vec2 gr = cell_gradient(f, c);
        sum += std::max(phi_ref - phi(nf, std::hypot(gr.x, gr.y)), 0.0) * m;
        meas += m;
      }
    out.push_back(meas > 0.0 ? sum / meas : 0.0);
  }
  return out;
}

ResidualReport l_residual(const ScalarField& f, const NFunction& nf, double theta_pos) {
  const Grid& g = f.grid();
  const double h = g.spacing();
  const double m = g.cell_measure();
  const int nn = g.num_nodes();
  ResidualReport rep;
  rep.values.assign(static_cast<size_t>(nn), kNaN);

  FreeBoundary fb;
  bool has_fb = true;
  try {
    fb = extract_fb(f, theta_pos);
  } catch (const NoFreeBoundary&) {
    has_fb = false;  // a one-phase field: every positive node qualifies
  }

  // Flux per cell with the exact coefficient a(t) = g(t)/t (flux -> 0 as t -> 0).
  const int nc = g.num_cells();
  std::vector<Vec2> flux(static_cast<size_t>(nc), Vec2{0.0, 0.0});
  std::vector<char> cell_pos(static_cast<size_t>(nc), 0);
  for (int c = 0; c < nc; ++c) {
    if (!g.cell_active(c)) continue;
    const Vec2 gr = cell_gradient(f, c);
    const double t = std::hypot(gr.x, gr.y);
    if (t > 1e-300) {
      const double a = nf.g(t) / t;
      flux[static_cast<size_t>(c)] = {a * gr.x, a * gr.y};
    }
    bool pos = true;
    if (g.dim() == 1) {
      pos = f[c] > theta_pos && f[c + 1] > theta_pos;
    } else {
      const int cx = c % g.nx();
      const int cy = c / g.nx();
      pos = f[g.node_index(cx, cy)] > theta_pos && f[g.node_index(cx + 1, cy)] > theta_pos &&
            f[g.node_index(cx, cy + 1)] > theta_pos && f[g.node_index(cx + 1, cy + 1)] > theta_pos;
    }
    cell_pos[static_cast<size_t>(c)] = pos;
  }

  auto eligible = [&](int ix, int iy) {
    const int n = g.node_index(ix, iy);
    if (g.node_kind(n) != NodeKind::Interior) return false;
    if (!(f[n] > theta_pos)) return false;
    for (int dy = (g.dim() == 2 ? -1 : 0); dy <= 0; ++dy)
      for (int dx = -1; dx <= 0; ++dx) {
        const int cx = ix + dx, cy = iy + dy;
        if (cx < 0 || cx >= g.nx() || (g.dim() == 2 && (cy < 0 || cy >= g.ny()))) return false;
        const int c = g.dim() == 1 ? cx : g.cell_index(cx, cy);
        if (!g.cell_active(c) || !cell_pos[static_cast<size_t>(c)]) return false;
      }
    if (has_fb && fb_distance(fb, g.node_pos(n)) <= 3.0 * h) return false;
    return true;
  };

  const int nyy = g.dim() == 1 ? 0 : g.ny();
  for (int iy = 0; iy <= nyy; ++iy)
    for (int ix = 0; ix <= g.nx(); ++ix) {
      if (!eligible(ix, iy)) continue;
      const int n = g.node_index(ix, iy);
      double r = 0.0;
      if (g.dim() == 1) {
        r = (m / h) * (flux[static_cast<size_t>(ix - 1)].x - flux[static_cast<size_t>(ix)].x);
      } else {
        const double inv2h = 1.0 / (2.0 * h);
        // Corner roles of node (ix,iy) in its four incident cells.
        const int cll = g.cell_index(ix - 1, iy - 1);  // node is corner (1,1)
        const int clr = g.cell_index(ix, iy - 1);      // corner (0,1)
        const int cul = g.cell_index(ix - 1, iy);      // corner (1,0)
        const int cur = g.cell_index(ix, iy);          // corner (0,0)
        r += m * inv2h * (flux[static_cast<size_t>(cll)].x + flux[static_cast<size_t>(cll)].y);
        r += m * inv2h * (-flux[static_cast<size_t>(clr)].x + flux[static_cast<size_t>(clr)].y);
        r += m * inv2h * (flux[static_cast<size_t>(cul)].x - flux[static_cast<size_t>(cul)].y);
        r += m * inv2h * (-flux[static_cast<size_t>(cur)].x - flux[static_cast<size_t>(cur)].y);
      }
      const double w = g.node_weight(n);
      const double val = w > 0.0 ? r / w : 0.0;
      rep.values[static_cast<size_t>(n)] = val;
      rep.sup = std::max(rep.sup, std::abs(val));
      ++rep.count;
    }
  return rep;
}

FBReport analyze(const ScalarField& f, const NFunction& nf, double theta_pos, AnalyzeOptions opts) {
  const Grid& g = f.grid();
  const double h = g.spacing();
  if (opts.d < 0.0) opts.d = 2.0 * h;
  if (opts.radii.empty()) opts.radii = {4.0 * h, 8.0 * h, 16.0 * h};
  if (opts.rho_list.empty()) opts.rho_list = {8.0 * h, 4.0 * h, 2.0 * h};

  FBReport rep;
  rep.theta_pos = theta_pos;
  rep.radii = opts.radii;
  const FreeBoundary fb = extract_fb(f, theta_pos);
  rep.fb = fb.points;
  rep.lambda = estimate_lambda(f, fb, opts.d);
  rep.lambda_d_h = estimate_lambda(f, fb, h).mean;
  rep.lambda_d_3h = estimate_lambda(f, fb, 3.0 * h).mean;
  rep.q_u_mean = nf.g(rep.lambda.mean);

  rep.density.reserve(fb.points.size());
  rep.nondegeneracy.reserve(fb.points.size());
  for (const auto& q : fb.points) {
    rep.density.push_back(density_ratios(f, q.p, opts.radii, theta_pos));
    rep.nondegeneracy.push_back(nondegeneracy(f, q.p, opts.radii, opts.gamma));
  }

  const int stride = std::max(1, static_cast<int>(fb.points.size()) / std::max(1, opts.subsample));
  std::vector<double> phi_sum(opts.radii.size(), 0.0);
  int phi_n = 0;
  for (size_t i = 0; i < fb.points.size(); i += static_cast<size_t>(stride)) {
    rep.blowup_points.push_back(static_cast<int>(i));
    rep.blowup.push_back(blowup_fit(f, fb.points[i].p, opts.rho_list));
    const auto pa = phi_average(f, nf, fb.points[i].p, opts.radii, rep.lambda.mean, theta_pos);
    for (size_t k = 0; k < pa.size(); ++k) phi_sum[k] += pa[k];
    ++phi_n;
  }
  rep.phi_avg.resize(opts.radii.size(), 0.0);
  if (phi_n > 0)
    for (size_t k = 0; k < phi_sum.size(); ++k) rep.phi_avg[k] = phi_sum[k] / phi_n;
  return rep;
}

}  // namespace orlfb
