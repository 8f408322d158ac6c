#pragma once

#include <Eigen/Core>

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string_view>
#include <vector>

namespace sparse_rom {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

enum class GeometryModel {
  NarrowingWidth,  // symmetric straight-edged wedges, gap width mu
  CurvedWalls,     // quadratic upstream faces, fixed tips, curvature in [0,1]
  StraightChannel  // no obstruction; used for analytic checks
};

std::string_view to_string(GeometryModel model);
GeometryModel parse_geometry_model(std::string_view name);

/// Channel geometry. All channels span y in [0, channel_height] and are
/// symmetric about the centerline.
struct GeometrySpec {
  GeometryModel model = GeometryModel::NarrowingWidth;
  double mu = 1.0;         // open gap width, narrowing model
  double curvature = 0.0;  // 0 straight faces, 1 maximal curvature
  double channel_height = 3.0;
  double channel_length = 9.0;

  static GeometrySpec narrowing(double mu);
  static GeometrySpec curved(double curvature);
  static GeometrySpec straight(double length = 9.0);

  /// Throws GeometryError on parameters outside the admissible ranges.
  void validate() const;
};

/// Mapped structured Q2 mesh. Nodes form a (2nx+1) x (2ny+1) lattice stored
/// row by row; the lattice and its connectivity are parameter independent.
class Mesh {
 public:
  Mesh(GeometrySpec spec, int nx, int ny, std::vector<Vec2> nodes);

  const GeometrySpec& spec() const noexcept { return spec_; }
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  int lattice_width() const noexcept { return 2 * nx_ + 1; }
  int lattice_height() const noexcept { return 2 * ny_ + 1; }

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t cell_count() const noexcept { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }
  std::size_t velocity_dofs() const noexcept { return 2 * nodes_.size(); }
  std::size_t pressure_dofs() const noexcept {
    return static_cast<std::size_t>(nx_ + 1) * static_cast<std::size_t>(ny_ + 1);
  }

  const std::vector<Vec2>& nodes() const noexcept { return nodes_; }
  const Vec2& node(int i, int j) const { return nodes_[static_cast<std::size_t>(node_id(i, j))]; }
  int node_id(int i, int j) const noexcept { return j * lattice_width() + i; }

  /// Q2 nodes of cell c, tensor order: local (a, b) -> b * 3 + a.
  std::array<int, 9> cell_nodes(std::size_t c) const;
  /// Q1 pressure nodes of cell c, order (0,0),(1,0),(0,1),(1,1).
  std::array<int, 4> cell_pressure(std::size_t c) const;

  /// Connectivity of all cells; identical for every parameter value.
  std::vector<std::array<int, 9>> connectivity() const;

  void write_nodes_csv(std::ostream& os) const;
  void write_cells_csv(std::ostream& os) const;

 private:
  GeometrySpec spec_;
  int nx_;
  int ny_;
  std::vector<Vec2> nodes_;
};

/// Builds the mapped mesh. Throws GeometryError on degenerate geometry.
std::shared_ptr<const Mesh> build_mesh(const GeometrySpec& spec, int nx, int ny);

/// Velocity (blocked: all u_x then all u_y, per Q2 node) and Q1 pressure.
struct Field {
  std::shared_ptr<const Mesh> mesh;
  Eigen::VectorXd velocity;
  Eigen::VectorXd pressure;

  static Field zero(std::shared_ptr<const Mesh> mesh);
  /// Nodal interpolation of an analytic velocity; pressure zero.
  static Field interpolate(std::shared_ptr<const Mesh> mesh, const std::function<Vec2(double, double)>& u);
};

struct FlowConfig {
  double nu_visc = 1.0;
  /// Body force f(x, y); empty means zero.
  std::function<Vec2(double, double)> body_force;
  /// Inflow u_x(y) at x = 0; empty means y (H - y).
  std::function<double(double)> inflow;
  /// Stress-free outlet at x = L. When false the outlet carries the inflow
  /// profile as Dirichlet data and one pressure dof is pinned.
  bool stress_free_outlet = true;
  double characteristic_velocity = 2.25;
  double characteristic_length = 3.0;

  double oseen_tol = 1e-10;
  int oseen_max_iter = 200;
  double relaxation = 1.0;
  /// Drop to fallback_relaxation once the iterate difference stops decreasing.
  bool adaptive_relaxation = true;
  double fallback_relaxation = 0.5;

  /// Constant force added during the first bias_iterations steps, ramped
  /// linearly to zero. Convergence is only tested once it is off.
  Vec2 bias_force{};
  int bias_iterations = 0;

  /// Throws DomainError on invalid settings.
  void validate() const;
};

/// One linearized step with advection frozen at u_k.
Field oseen_step(const Mesh& mesh, const FlowConfig& cfg, const Field& u_k);

struct OseenResult {
  Field field;
  /// Relative L2 difference between successive iterates.
  std::vector<double> trace;
  int iterations = 0;
};

/// Fixed-point iteration of oseen_step. Throws DivergenceError with the
/// trace when oseen_max_iter is reached.
OseenResult oseen_solve(const Mesh& mesh, const FlowConfig& cfg, const Field& u_init);

/// Velocity dof vector in the shared reference numbering.
Eigen::VectorXd pullback(const Field& field);
/// As above, checking the length against a reference dof count.
Eigen::VectorXd pullback(const Field& field, std::size_t reference_dofs);

/// Re = U L / nu.
double reynolds(double U, double L, double nu);

/// Lumped (row-sum) velocity mass, one weight per velocity dof.
Eigen::VectorXd lumped_velocity_mass(const Mesh& mesh);

/// sqrt(sum w (a-b)^2) / sqrt(sum w b^2); absolute when b vanishes.
double weighted_relative_difference(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& w);

/// ||B u|| / || |B| |u| || for the weak divergence operator B.
double divergence_residual(const Mesh& mesh, const Eigen::VectorXd& velocity);

/// Pressure evaluated at every Q2 node (bilinear interpolation).
Eigen::VectorXd pressure_at_nodes(const Mesh& mesh, const Eigen::VectorXd& pressure);

/// CSV with header x,y,u_x,u_y,p, one row per velocity node.
void write_field_csv(std::ostream& os, const Field& field);

}  // namespace sparse_rom
