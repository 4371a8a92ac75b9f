#include "orlfb/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "orlfb/errors.hpp"

namespace orlfb {

namespace {
constexpr double kPhiTol = 0.0;  // A-set membership threshold: phi0 > 0
}

Grid Grid::interval(double x0, double x1, int n_cells, double phi_left, double phi_right) {
  if (!(x1 > x0) || n_cells < 2) throw InvalidParameter("Grid::interval: need x1 > x0 and n >= 2");
  if (!std::isfinite(phi_left) || !std::isfinite(phi_right))
    throw InvalidParameter("Grid::interval: non-finite Dirichlet data");
  Grid g;
  g.dim_ = 1;
  g.nx_ = n_cells;
  g.h_ = (x1 - x0) / n_cells;
  g.x0_ = x0;
  g.domain_ = Domain::Interval;
  g.kind_.assign(static_cast<size_t>(n_cells + 1), NodeKind::Interior);
  g.kind_.front() = NodeKind::Dirichlet;
  g.kind_.back() = NodeKind::Dirichlet;
  g.cell_active_.assign(static_cast<size_t>(n_cells), 1);
  g.dirichlet_.assign(static_cast<size_t>(n_cells + 1), 0.0);
  g.dirichlet_.front() = phi_left;
  g.dirichlet_.back() = phi_right;
  g.finalize();
  return g;
}

Grid Grid::square(double x0, double x1, double y0, double y1, int n_cells,
                  const std::function<double(Vec2)>& phi0) {
  if (!(x1 > x0) || !(y1 > y0) || n_cells < 2)
    throw InvalidParameter("Grid::square: need a nonempty box and n >= 2");
  const double hx = (x1 - x0) / n_cells;
  const double hy = (y1 - y0) / n_cells;
  if (std::abs(hx - hy) > 1e-12 * hx)
    throw InvalidParameter("Grid::square: cells must be square (equal extents)");
  Grid g;
  g.dim_ = 2;
  g.nx_ = g.ny_ = n_cells;
  g.h_ = hx;
  g.x0_ = x0;
  g.y0_ = y0;
  g.domain_ = Domain::Square;
  const int nn = (n_cells + 1) * (n_cells + 1);
  g.kind_.assign(static_cast<size_t>(nn), NodeKind::Interior);
  g.cell_active_.assign(static_cast<size_t>(n_cells * n_cells), 1);
  g.dirichlet_.assign(static_cast<size_t>(nn), 0.0);
  for (int iy = 0; iy <= n_cells; ++iy)
    for (int ix = 0; ix <= n_cells; ++ix) {
      if (ix == 0 || iy == 0 || ix == n_cells || iy == n_cells) {
        const int n = g.node_index(ix, iy);
        g.kind_[static_cast<size_t>(n)] = NodeKind::Dirichlet;
        const double v = phi0(g.node_pos(n));
        if (!std::isfinite(v)) throw InvalidParameter("Grid::square: non-finite Dirichlet data");
        g.dirichlet_[static_cast<size_t>(n)] = v;
      }
    }
  g.finalize();
  return g;
}

Grid Grid::disc(double radius, int n_cells, const std::function<double(Vec2)>& phi0) {
  if (!(radius > 0.0) || n_cells < 4) throw InvalidParameter("Grid::disc: need radius > 0, n >= 4");
  Grid g;
  g.dim_ = 2;
  g.nx_ = g.ny_ = n_cells;
  g.h_ = 2.0 * radius / n_cells;
  g.x0_ = -radius;
  g.y0_ = -radius;
  g.domain_ = Domain::Disc;
  g.radius_ = radius;
  const int nn = (n_cells + 1) * (n_cells + 1);
  g.kind_.assign(static_cast<size_t>(nn), NodeKind::Outside);
  g.cell_active_.assign(static_cast<size_t>(n_cells * n_cells), 0);
  g.dirichlet_.assign(static_cast<size_t>(nn), 0.0);
  for (int cy = 0; cy < n_cells; ++cy)
    for (int cx = 0; cx < n_cells; ++cx) {
      const Vec2 c = g.cell_center(g.cell_index(cx, cy));
      if (std::hypot(c.x, c.y) < radius) g.cell_active_[static_cast<size_t>(g.cell_index(cx, cy))] = 1;
    }
  for (int iy = 0; iy <= n_cells; ++iy)
    for (int ix = 0; ix <= n_cells; ++ix) {
      bool any = false, all = true;
      for (int dy = -1; dy <= 0; ++dy)
        for (int dx = -1; dx <= 0; ++dx) {
          const int cx = ix + dx, cy = iy + dy;
          const bool exists = cx >= 0 && cy >= 0 && cx < n_cells && cy < n_cells;
          const bool act = exists && g.cell_active_[static_cast<size_t>(g.cell_index(cx, cy))] != 0;
          any = any || act;
          all = all && act;
        }
      if (!any) continue;
      const int n = g.node_index(ix, iy);
      if (all) {
        g.kind_[static_cast<size_t>(n)] = NodeKind::Interior;
      } else {
        g.kind_[static_cast<size_t>(n)] = NodeKind::Dirichlet;
        Vec2 p = g.node_pos(n);
        const double r = std::hypot(p.x, p.y);
        // Staircase boundary value: radial projection of phi0 onto the circle.
        const Vec2 proj = r > 1e-14 ? Vec2{p.x / r * radius, p.y / r * radius} : Vec2{radius, 0.0};
        const double v = phi0(proj);
        if (!std::isfinite(v)) throw InvalidParameter("Grid::disc: non-finite Dirichlet data");
        g.dirichlet_[static_cast<size_t>(n)] = v;
      }
    }
  g.finalize();
  return g;
}

Grid Grid::from_points(const std::vector<Vec2>& pts, int dim, const std::vector<double>* values) {
  if (pts.size() < 3) throw InvalidParameter("Grid::from_points: need at least 3 nodes");
  if (dim != 1 && dim != 2) throw InvalidParameter("Grid::from_points: dim must be 1 or 2");
  auto unique_sorted = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v)
      if (out.empty() || x - out.back() > 1e-9 * std::max(1.0, std::abs(x))) out.push_back(x);
    return out;
  };
  std::vector<double> xs, ys;
  xs.reserve(pts.size());
  ys.reserve(pts.size());
  for (const auto& p : pts) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  xs = unique_sorted(xs);
  ys = unique_sorted(ys);
  double h = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < xs.size(); ++i) h = std::min(h, xs[i] - xs[i - 1]);
  if (dim == 2)
    for (size_t i = 1; i < ys.size(); ++i) h = std::min(h, ys[i] - ys[i - 1]);
  if (!std::isfinite(h) || !(h > 0.0)) throw InvalidParameter("Grid::from_points: cannot infer spacing");

  Grid g;
  g.dim_ = dim;
  g.h_ = h;
  g.x0_ = xs.front();
  g.nx_ = static_cast<int>(std::lround((xs.back() - xs.front()) / h));
  if (dim == 1) {
    g.ny_ = 0;
    g.domain_ = Domain::Interval;
  } else {
    g.y0_ = ys.front();
    g.ny_ = static_cast<int>(std::lround((ys.back() - ys.front()) / h));
    g.domain_ = Domain::Square;  // mask distinguishes disc-like domains
  }
  const int nn = g.num_nodes();
  std::vector<char> present(static_cast<size_t>(nn), 0);
  std::vector<double> nodal(static_cast<size_t>(nn), 0.0);
  for (size_t k = 0; k < pts.size(); ++k) {
    const double fx = (pts[k].x - g.x0_) / h;
    const int ix = static_cast<int>(std::lround(fx));
    int iy = 0;
    if (dim == 2) iy = static_cast<int>(std::lround((pts[k].y - g.y0_) / h));
    if (ix < 0 || ix > g.nx_ || iy < 0 || (dim == 2 && iy > g.ny_) ||
        std::abs(fx - ix) > 1e-5 * std::max(1.0, std::abs(fx)))
      throw InvalidParameter("Grid::from_points: point off the lattice");
    present[static_cast<size_t>(g.node_index(ix, iy))] = 1;
    if (values) nodal[static_cast<size_t>(g.node_index(ix, iy))] = (*values)[k];
  }
  g.cell_active_.assign(static_cast<size_t>(g.num_cells()), 0);
  if (dim == 1) {
    for (int c = 0; c < g.nx_; ++c)
      g.cell_active_[static_cast<size_t>(c)] = present[static_cast<size_t>(c)] && present[static_cast<size_t>(c + 1)];
  } else {
    for (int cy = 0; cy < g.ny_; ++cy)
      for (int cx = 0; cx < g.nx_; ++cx) {
        const bool act = present[static_cast<size_t>(g.node_index(cx, cy))] &&
                         present[static_cast<size_t>(g.node_index(cx + 1, cy))] &&
                         present[static_cast<size_t>(g.node_index(cx, cy + 1))] &&
                         present[static_cast<size_t>(g.node_index(cx + 1, cy + 1))];
        g.cell_active_[static_cast<size_t>(g.cell_index(cx, cy))] = act;
      }
  }
  g.kind_.assign(static_cast<size_t>(nn), NodeKind::Outside);
  g.dirichlet_.assign(static_cast<size_t>(nn), 0.0);
  const int nyy = dim == 1 ? 0 : g.ny_;
  for (int iy = 0; iy <= nyy; ++iy)
    for (int ix = 0; ix <= g.nx_; ++ix) {
      const int n = g.node_index(ix, iy);
      bool any = false, all = true;
      for (int dy = (dim == 2 ? -1 : 0); dy <= 0; ++dy)
        for (int dx = -1; dx <= 0; ++dx) {
          const int cx = ix + dx, cy = iy + dy;
          const bool exists = cx >= 0 && cy >= 0 && cx < g.nx_ && (dim == 1 || cy < g.ny_);
          const bool act = exists && g.cell_active_[static_cast<size_t>(g.cell_index(cx, cy))] != 0;
          any = any || act;
          all = all && act;
        }
      if (!any) continue;
      g.kind_[static_cast<size_t>(n)] = all ? NodeKind::Interior : NodeKind::Dirichlet;
      if (!all && values) g.dirichlet_[static_cast<size_t>(n)] = nodal[static_cast<size_t>(n)];
    }
  g.finalize();
  return g;
}

void Grid::finalize() {
  const int nn = num_nodes();
  weight_.assign(static_cast<size_t>(nn), 0.0);
  omega_ = 0.0;
  const double m = cell_measure();
  const double share = dim_ == 1 ? 0.5 * m : 0.25 * m;
  if (dim_ == 1) {
    for (int c = 0; c < nx_; ++c) {
      if (!cell_active(c)) continue;
      omega_ += m;
      weight_[static_cast<size_t>(c)] += share;
      weight_[static_cast<size_t>(c + 1)] += share;
    }
  } else {
    for (int cy = 0; cy < ny_; ++cy)
      for (int cx = 0; cx < nx_; ++cx) {
        if (!cell_active(cell_index(cx, cy))) continue;
        omega_ += m;
        weight_[static_cast<size_t>(node_index(cx, cy))] += share;
        weight_[static_cast<size_t>(node_index(cx + 1, cy))] += share;
        weight_[static_cast<size_t>(node_index(cx, cy + 1))] += share;
        weight_[static_cast<size_t>(node_index(cx + 1, cy + 1))] += share;
      }
  }
  dirichlet_nodes_.clear();
  positive_dirichlet_.clear();
  max_phi_ = 0.0;
  min_phi_ = std::numeric_limits<double>::infinity();
  for (int n = 0; n < nn; ++n) {
    if (kind_[static_cast<size_t>(n)] != NodeKind::Dirichlet) continue;
    dirichlet_nodes_.push_back(n);
    const double v = dirichlet_[static_cast<size_t>(n)];
    max_phi_ = std::max(max_phi_, v);
    min_phi_ = std::min(min_phi_, v);
    if (v > kPhiTol) positive_dirichlet_.push_back(n);
  }
  if (dirichlet_nodes_.empty()) min_phi_ = 0.0;
}

Vec2 Grid::node_pos(int node) const {
  if (dim_ == 1) return {x0_ + h_ * node, 0.0};
  const int ix = node % (nx_ + 1);
  const int iy = node / (nx_ + 1);
  return {x0_ + h_ * ix, y0_ + h_ * iy};
}

Vec2 Grid::cell_center(int cell) const {
  if (dim_ == 1) return {x0_ + h_ * (cell + 0.5), 0.0};
  const int cx = cell % nx_;
  const int cy = cell / nx_;
  return {x0_ + h_ * (cx + 0.5), y0_ + h_ * (cy + 0.5)};
}

double Grid::diameter() const {
  if (dim_ == 1) return h_ * nx_;
  if (domain_ == Domain::Disc) return 2.0 * radius_;
  return std::hypot(h_ * nx_, h_ * ny_);
}

int Grid::locate(Vec2 p, double& lx, double& ly) const {
  int cx = static_cast<int>(std::floor((p.x - x0_) / h_));
  cx = std::clamp(cx, 0, nx_ - 1);
  lx = std::clamp((p.x - (x0_ + cx * h_)) / h_, 0.0, 1.0);
  if (dim_ == 1) {
    ly = 0.0;
    return cx;
  }
  int cy = static_cast<int>(std::floor((p.y - y0_) / h_));
  cy = std::clamp(cy, 0, ny_ - 1);
  ly = std::clamp((p.y - (y0_ + cy * h_)) / h_, 0.0, 1.0);
  return cell_index(cx, cy);
}

bool Grid::point_in_domain(Vec2 p) const {
  if (p.x < x0_ || p.x > x0_ + h_ * nx_) return false;
  if (dim_ == 2 && (p.y < y0_ || p.y > y0_ + h_ * ny_)) return false;
  double lx, ly;
  return cell_active(locate(p, lx, ly));
}

ScalarField::ScalarField(const Grid& grid) : grid_(&grid), v_(static_cast<size_t>(grid.num_nodes()), 0.0) {
  enforce_boundary();
}

void ScalarField::enforce_boundary() {
  for (int n = 0; n < grid_->num_nodes(); ++n) {
    const NodeKind k = grid_->node_kind(n);
    if (k == NodeKind::Dirichlet)
      v_[static_cast<size_t>(n)] = grid_->dirichlet_value(n);
    else if (k == NodeKind::Outside)
      v_[static_cast<size_t>(n)] = 0.0;
  }
}

double cell_center_value(const ScalarField& f, int cell) {
  const Grid& g = f.grid();
  if (g.dim() == 1) return 0.5 * (f[cell] + f[cell + 1]);
  const int cx = cell % g.nx();
  const int cy = cell / g.nx();
  return 0.25 * (f[g.node_index(cx, cy)] + f[g.node_index(cx + 1, cy)] +
                 f[g.node_index(cx, cy + 1)] + f[g.node_index(cx + 1, cy + 1)]);
}

Vec2 cell_gradient(const ScalarField& f, int cell) {
  const Grid& g = f.grid();
  const double h = g.spacing();
  if (g.dim() == 1) return {(f[cell + 1] - f[cell]) / h, 0.0};
  const int cx = cell % g.nx();
  const int cy = cell / g.nx();
  const double u00 = f[g.node_index(cx, cy)];
  const double u10 = f[g.node_index(cx + 1, cy)];
  const double u01 = f[g.node_index(cx, cy + 1)];
  const double u11 = f[g.node_index(cx + 1, cy + 1)];
  return {((u10 + u11) - (u00 + u01)) / (2.0 * h), ((u01 + u11) - (u00 + u10)) / (2.0 * h)};
}

std::vector<Vec2> gradient_cells(const ScalarField& f) {
  const Grid& g = f.grid();
  std::vector<Vec2> out(static_cast<size_t>(g.num_cells()));
  for (int c = 0; c < g.num_cells(); ++c)
    if (g.cell_active(c)) out[static_cast<size_t>(c)] = cell_gradient(f, c);
  return out;
}

double positivity_volume(const ScalarField& f, double theta_pos) {
  if (!(theta_pos >= 0.0)) throw InvalidParameter("positivity_volume: theta_pos must be >= 0");
  const Grid& g = f.grid();
  const double m = g.cell_measure();
  double vol = 0.0;
  for (int c = 0; c < g.num_cells(); ++c)
    if (g.cell_active(c) && cell_center_value(f, c) > theta_pos) vol += m;
  return vol;
}

double smoothed_volume(const ScalarField& f, double s) {
  if (!(s > 0.0)) throw InvalidParameter("smoothed_volume: s must be > 0");
  const Grid& g = f.grid();
  const double m = g.cell_measure();
  double vol = 0.0;
  for (int c = 0; c < g.num_cells(); ++c) {
    if (!g.cell_active(c)) continue;
    const double v = cell_center_value(f, c) / s;
    vol += m * std::clamp(v, 0.0, 1.0);
  }
  return vol;
}

double value_at(const ScalarField& f, Vec2 p) {
  const Grid& g = f.grid();
  double lx, ly;
  const int cell = g.locate(p, lx, ly);
  if (g.dim() == 1) return (1.0 - lx) * f[cell] + lx * f[cell + 1];
  const int cx = cell % g.nx();
  const int cy = cell / g.nx();
  const double u00 = f[g.node_index(cx, cy)];
  const double u10 = f[g.node_index(cx + 1, cy)];
  const double u01 = f[g.node_index(cx, cy + 1)];
  const double u11 = f[g.node_index(cx + 1, cy + 1)];
  return u00 * (1 - lx) * (1 - ly) + u10 * lx * (1 - ly) + u01 * (1 - lx) * ly + u11 * lx * ly;
}

Vec2 gradient_at(const ScalarField& f, Vec2 p) {
  const Grid& g = f.grid();
  const double h = g.spacing();
  double lx, ly;
  const int cell = g.locate(p, lx, ly);
  if (g.dim() == 1) return {(f[cell + 1] - f[cell]) / h, 0.0};
  const int cx = cell % g.nx();
  const int cy = cell / g.nx();
  const double u00 = f[g.node_index(cx, cy)];
  const double u10 = f[g.node_index(cx + 1, cy)];
  const double u01 = f[g.node_index(cx, cy + 1)];
  const double u11 = f[g.node_index(cx + 1, cy + 1)];
  return {((u10 - u00) * (1 - ly) + (u11 - u01) * ly) / h,
          ((u01 - u00) * (1 - lx) + (u11 - u10) * lx) / h};
}

std::string field_to_csv(const ScalarField& f) {
  const Grid& g = f.grid();
  std::string out;
  char buf[96];
  if (g.dim() == 1) {
    out += "x,u\n";
    for (int n = 0; n < g.num_nodes(); ++n) {
      std::snprintf(buf, sizeof buf, "%.10g,%.17g\n", g.node_pos(n).x, f[n]);
      out += buf;
    }
  } else {
    out += "x,y,u\n";
    for (int n = 0; n < g.num_nodes(); ++n) {
      if (g.node_kind(n) == NodeKind::Outside) continue;
      const Vec2 p = g.node_pos(n);
      std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.17g\n", p.x, p.y, f[n]);
      out += buf;
    }
  }
  return out;
}

LoadedField field_from_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidParameter("field_from_csv: empty input");
  int dim = 0;
  if (line == "x,u")
    dim = 1;
  else if (line == "x,y,u")
    dim = 2;
  else
    throw InvalidParameter("field_from_csv: unrecognized header '" + line + "'");
  std::vector<Vec2> pts;
  std::vector<double> vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Vec2 p;
    double u = 0.0;
    if (dim == 1) {
      if (std::sscanf(line.c_str(), "%lf,%lf", &p.x, &u) != 2)
        throw InvalidParameter("field_from_csv: bad row '" + line + "'");
    } else {
      if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &p.x, &p.y, &u) != 3)
        throw InvalidParameter("field_from_csv: bad row '" + line + "'");
    }
    pts.push_back(p);
    vals.push_back(u);
  }
  LoadedField lf{Grid::from_points(pts, dim, &vals), {}};
  lf.values.assign(static_cast<size_t>(lf.grid.num_nodes()), 0.0);
  for (size_t k = 0; k < pts.size(); ++k) {
    const double fx = (pts[k].x - lf.grid.origin_x()) / lf.grid.spacing();
    const int ix = static_cast<int>(std::lround(fx));
    int iy = 0;
    if (dim == 2) iy = static_cast<int>(std::lround((pts[k].y - lf.grid.origin_y()) / lf.grid.spacing()));
    lf.values[static_cast<size_t>(lf.grid.node_index(ix, iy))] = vals[k];
  }
  return lf;
}

}  // namespace orlfb
