#ifndef VEM_FEMSTOKES_HPP
#define VEM_FEMSTOKES_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <functional>
#include <memory>
#include <vector>

#include "vem/geometry.hpp"
#include "vem/polynomials.hpp"

namespace vem {

using Field2 = std::function<Eigen::Vector2d(const Vec2&)>;
using Field1 = std::function<double(const Vec2&)>;

/// One boundary velocity node with its parent polygon edge parameterization.
struct BoundaryNode {
  int node = -1;         // P2 node index
  int parent_edge = -1;  // polygon edge
  double t = 0.0;        // parameter in [0,1] along the parent edge
};

class FemField;

/// Taylor-Hood (P2 velocity / P1 pressure) space on a subtriangulation, with a
/// scalar multiplier enforcing zero mean pressure. The saddle matrix is
/// factored once and shared across right-hand sides.
class FemSpace {
 public:
  FemSpace(const Polygon& polygon, const TriMesh& mesh);

  const Polygon& polygon() const { return polygon_; }
  const TriMesh& mesh() const { return mesh_; }
  int num_p2_nodes() const { return num_nodes_; }
  int velocity_dim() const { return 2 * num_nodes_; }
  int pressure_dim() const { return static_cast<int>(mesh_.points.size()); }
  const std::vector<BoundaryNode>& boundary_nodes() const { return boundary_nodes_; }
  const Vec2& node_point(int n) const { return node_points_[n]; }

  /// Solve -lap(u) - grad(s) = f, div u = g, u = trace on the boundary.
  /// trace holds one velocity per boundary node, ordered as boundary_nodes().
  /// f/g may be null for zero data; *_degree bounds the quadrature order.
  FemField solve_stokes(const Field2& f, int f_degree, const Field1& g, int g_degree,
                        const std::vector<Eigen::Vector2d>& trace) const;

  /// Boundary data from per-edge velocity polynomials (continuity checked at
  /// the shared vertices).
  std::vector<Eigen::Vector2d> dirichlet_trace_from_edge_polys(
      const std::vector<std::function<Eigen::Vector2d(double)>>& edge_polys) const;

  /// Outward boundary flux of the piecewise-quadratic interpolant of the given
  /// trace (one velocity per boundary node, ordered as boundary_nodes()).
  /// A divergence datum with matching integral is discretely compatible.
  double trace_flux(const std::vector<Eigen::Vector2d>& trace) const;

  double h1_semi_inner(const FemField& u, const FemField& v) const;
  double l2_inner(const FemField& u, const FemField& v) const;
  double boundary_l2_inner(const FemField& u, const FemField& v,
                           const std::vector<int>& edge_subset) const;

  /// int_K u . w for a polynomial (or smooth) vector field w.
  double moment(const FemField& u, const Field2& w, int w_degree) const;
  /// int_K (div u) m for a scalar field m.
  double div_moment(const FemField& u, const Field1& m, int m_degree) const;

  /// P2 nodal interpolant of a closed-form field (velocity only).
  FemField interpolate_velocity(const Field2& u) const;

  /// H1 seminorm / L2 norm of (u_h - u) against a closed-form reference.
  double h1_semi_error(const FemField& uh, const Field2& grad_u_row0,
                       const Field2& grad_u_row1) const;
  double l2_error(const FemField& uh, const Field2& u) const;

 private:
  const Polygon& polygon_;
  TriMesh mesh_;
  int num_nodes_ = 0;  // P2 nodes: vertices + edge midpoints
  std::vector<Vec2> node_points_;
  std::vector<Eigen::Matrix<int, 6, 1>> tri_nodes_;  // per-triangle P2 nodes
  std::vector<BoundaryNode> boundary_nodes_;
  std::vector<char> is_boundary_vdof_;  // per velocity dof
  int system_dim_ = 0;

  Eigen::SparseMatrix<double> system_;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;

  void build_nodes();
  void assemble();
  friend class FemField;
};

/// Discrete velocity/pressure pair with the mean-pressure multiplier value.
class FemField {
 public:
  FemField() = default;
  FemField(const FemSpace& space, Eigen::VectorXd velocity, Eigen::VectorXd pressure,
           double multiplier)
      : space_(&space), velocity_(std::move(velocity)), pressure_(std::move(pressure)),
        multiplier_(multiplier) {}

  const FemSpace& space() const { return *space_; }
  const Eigen::VectorXd& velocity() const { return velocity_; }
  const Eigen::VectorXd& pressure() const { return pressure_; }
  double multiplier() const { return multiplier_; }
  double last_residual() const { return residual_; }

  Eigen::Vector2d velocity_at_node(int n) const {
    return {velocity_(2 * n), velocity_(2 * n + 1)};
  }

  /// a*u + b*v in the same space.
  static FemField combine(double a, const FemField& u, double b, const FemField& v);

  friend class FemSpace;

 private:
  const FemSpace* space_ = nullptr;
  Eigen::VectorXd velocity_;
  Eigen::VectorXd pressure_;
  double multiplier_ = 0.0;
  double residual_ = 0.0;
};

}  // namespace vem

#endif
