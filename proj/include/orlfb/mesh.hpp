#pragma once

#include <functional>
#include <string>
#include <vector>

namespace orlfb {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

enum class NodeKind : unsigned char { Outside, Interior, Dirichlet };

/// A uniform lattice over an interval, a rectangle, or a disc (via a cell
/// mask). Cells are intervals (1D) or squares (2D) of side h; a node belongs
/// to the domain when at least one incident cell is active, and is a
/// Dirichlet node when it touches the lattice hull or an inactive cell.
///
/// Immutable after construction; fields reference it read-only.
class Grid {
 public:
  enum class Domain { Interval, Square, Disc };

  /// 1D interval [x0, x1] with n cells and endpoint Dirichlet data.
  static Grid interval(double x0, double x1, int n_cells, double phi_left, double phi_right);

  /// Axis-aligned rectangle with n cells per side; phi0 sampled on boundary nodes.
  static Grid square(double x0, double x1, double y0, double y1, int n_cells,
                     const std::function<double(Vec2)>& phi0);

  /// Disc of the given radius centered at the origin, masked out of the
  /// bounding square [-R, R]^2 with n cells per side. Cells whose centers lie
  /// inside the circle are active; staircase boundary nodes take phi0 at
  /// their radial projection onto the circle.
  static Grid disc(double radius, int n_cells, const std::function<double(Vec2)>& phi0);

  /// Rebuilds a grid from scattered lattice nodes (as read from a field CSV).
  /// Nodes absent from the set are Outside. When nodal values are supplied,
  /// boundary nodes adopt them as their Dirichlet data.
  static Grid from_points(const std::vector<Vec2>& pts, int dim,
                          const std::vector<double>* values = nullptr);

  int dim() const { return dim_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double spacing() const { return h_; }
  double cell_measure() const { return dim_ == 1 ? h_ : h_ * h_; }
  double origin_x() const { return x0_; }
  double origin_y() const { return y0_; }
  Domain domain() const { return domain_; }
  double radius() const { return radius_; }

  int num_nodes() const { return dim_ == 1 ? nx_ + 1 : (nx_ + 1) * (ny_ + 1); }
  int num_cells() const { return dim_ == 1 ? nx_ : nx_ * ny_; }
  int node_index(int ix, int iy = 0) const { return dim_ == 1 ? ix : iy * (nx_ + 1) + ix; }
  int cell_index(int cx, int cy = 0) const { return dim_ == 1 ? cx : cy * nx_ + cx; }

  bool cell_active(int cell) const { return cell_active_[static_cast<size_t>(cell)] != 0; }
  NodeKind node_kind(int node) const { return kind_[static_cast<size_t>(node)]; }
  Vec2 node_pos(int node) const;
  Vec2 cell_center(int cell) const;

  double dirichlet_value(int node) const { return dirichlet_[static_cast<size_t>(node)]; }
  double node_weight(int node) const { return weight_[static_cast<size_t>(node)]; }
  double omega_measure() const { return omega_; }
  double max_dirichlet() const { return max_phi_; }
  double min_dirichlet() const { return min_phi_; }
  double diameter() const;

  const std::vector<int>& dirichlet_nodes() const { return dirichlet_nodes_; }
  /// The set A: Dirichlet nodes with phi0 > 0. May be empty (then only the
  /// trivial zero minimizer exists).
  const std::vector<int>& positive_dirichlet_nodes() const { return positive_dirichlet_; }

  /// Cell containing p, clamped to the lattice. Returns the flat cell index
  /// and local coordinates in [0, 1]^dim.
  int locate(Vec2 p, double& lx, double& ly) const;
  /// True when p lies in an active cell.
  bool point_in_domain(Vec2 p) const;

 private:
  Grid() = default;
  void finalize();

  int dim_ = 1;
  int nx_ = 0, ny_ = 0;
  double h_ = 0.0;
  double x0_ = 0.0, y0_ = 0.0;
  Domain domain_ = Domain::Interval;
  double radius_ = 0.0;
  std::vector<NodeKind> kind_;
  std::vector<char> cell_active_;
  std::vector<double> dirichlet_;
  std::vector<double> weight_;
  double omega_ = 0.0;
  double max_phi_ = 0.0;
  double min_phi_ = 0.0;
  std::vector<int> dirichlet_nodes_;
  std::vector<int> positive_dirichlet_;
};

/// Nodal scalar field over a Grid. Dirichlet nodes carry exactly phi0;
/// Outside nodes stay at zero.
class ScalarField {
 public:
  explicit ScalarField(const Grid& grid);

  const Grid& grid() const { return *grid_; }
  double operator[](int node) const { return v_[static_cast<size_t>(node)]; }
  double& operator[](int node) { return v_[static_cast<size_t>(node)]; }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

  /// Resets Dirichlet nodes to phi0 and Outside nodes to zero.
  void enforce_boundary();

 private:
  const Grid* grid_;
  std::vector<double> v_;
};

/// Mean of the cell's corner values (the multilinear interpolant at the center).
double cell_center_value(const ScalarField& f, int cell);

/// Gradient of the multilinear interpolant at the cell center. 1D: forward
/// difference over the cell; 2D: exact for affine fields.
Vec2 cell_gradient(const ScalarField& f, int cell);

/// Per-cell gradients, aligned with cell indices; inactive cells hold zeros.
std::vector<Vec2> gradient_cells(const ScalarField& f);

/// Measure of cells whose center-interpolated value exceeds theta_pos.
double positivity_volume(const ScalarField& f, double theta_pos);

/// Differentiable volume surrogate: sum over active cells of
/// clamp(center_value/s, 0, 1) * cell measure. Converges to
/// positivity_volume(f, 0) as s -> 0 on fields with nondegenerate slope.
double smoothed_volume(const ScalarField& f, double s);

/// Multilinear interpolation of the field at p (lattice-clamped).
double value_at(const ScalarField& f, Vec2 p);

/// Gradient of the multilinear interpolant at p (lattice-clamped).
Vec2 gradient_at(const ScalarField& f, Vec2 p);

/// CSV dump, header "x,u" or "x,y,u", row-major over domain nodes.
std::string field_to_csv(const ScalarField& f);

struct LoadedField {
  Grid grid;
  std::vector<double> values;  ///< aligned with grid node indices
};

/// Parses a field CSV produced by field_to_csv, rebuilding the lattice.
LoadedField field_from_csv(const std::string& csv_text);

}  // namespace orlfb
