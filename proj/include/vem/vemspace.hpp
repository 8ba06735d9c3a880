#ifndef VEM_VEMSPACE_HPP
#define VEM_VEMSPACE_HPP

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "vem/geometry.hpp"
#include "vem/polynomials.hpp"

namespace vem {

/// Which realization of the boundary term enters the projection stabilization:
/// the exact edge integral h_K^{-1}(u,v)_{0,dK} or the boundary-DoF sum.
enum class BoundaryTerm { integral, dofsum };

enum class StabKind { projection, dofi };

/// DoF ordering: per-vertex values (components interleaved), per-edge internal
/// Gauss-Lobatto values (edge by edge, node by node along the edge, components
/// interleaved), orthogonal moments in graded-lex order, divergence moments in
/// graded-lex order.
class DofLayout {
 public:
  DofLayout(const Polygon& polygon, int p);

  const Polygon& polygon() const { return polygon_; }
  const PolygonIntegrator& integrator() const { return *integ_; }
  int degree() const { return p_; }
  int num_edges() const { return polygon_.num_edges(); }

  int num_boundary_dofs() const { return 2 * p_ * num_edges(); }
  int num_perp_dofs() const { return p_ >= 3 ? Monomials::dim(p_ - 3) : 0; }
  int num_div_dofs() const { return Monomials::dim(p_ - 1) - 1; }
  int num_dofs() const { return num_boundary_dofs() + num_perp_dofs() + num_div_dofs(); }

  int vertex_dof(int v, int comp) const { return 2 * v + comp; }
  int edge_dof(int e, int node, int comp) const {
    return 2 * num_edges() + 2 * ((p_ - 1) * e + node) + comp;
  }
  int perp_dof(int a) const { return num_boundary_dofs() + a; }
  int div_dof(int g) const { return num_boundary_dofs() + num_perp_dofs() + g; }

  const Eigen::VectorXd& gl_nodes() const { return gl_nodes_; }  // p+1 on [-1,1]
  /// q_a members of x_perp P_{p-3} (the Dv3 test basis).
  const VectorBasis& perp_basis() const { return perp_basis_; }
  /// Zero-mean scaled monomials of P_{p-1} \ R (the Dv4 test basis).
  const ScalarBasis& div_basis() const { return div_basis_; }

  /// Trace of the virtual function on edge e at parameter xi in [-1,1].
  Eigen::Vector2d edge_trace(const Eigen::VectorXd& dofs, int e, double xi) const;
  /// Lagrange values of the p+1 edge nodes at xi.
  Eigen::VectorXd edge_lagrange(double xi) const;
  /// DoF index of the k-th Gauss-Lobatto node (k = 0..p) on edge e.
  int edge_node_dof(int e, int k, int comp) const;

  Eigen::VectorXd dofs_of_polynomial(const VectorPoly& q) const;

  /// Row over DoFs of int_dK (v.n) m for a scalar polynomial m.
  Eigen::RowVectorXd boundary_normal_moment(const ScaledPoly& m) const;
  /// Row over DoFs of int_dK w . v for a vector polynomial w.
  Eigen::RowVectorXd boundary_vector_moment(const VectorPoly& w) const;
  /// Row over DoFs of the boundary flux int_dK v.n.
  const Eigen::RowVectorXd& flux_row() const { return flux_row_; }
  /// DoF-indexed boundary mass matrix int_dK u.v (zero on moment DoFs).
  const Eigen::MatrixXd& boundary_mass() const { return boundary_mass_; }

  /// Coefficients of div(v) over the raw scaled monomials of P_{p-1}.
  Eigen::VectorXd divergence_from_dofs(const Eigen::VectorXd& dofs) const;
  ScaledPoly divergence_poly(const Eigen::VectorXd& dofs) const;
  const Eigen::MatrixXd& divergence_coefficient_map() const { return div_coef_map_; }

  /// Moments int_K v . m_hat for the full [P_{p-2}]^2 monomial basis,
  /// via the splitting [P_{p-2}]^2 = grad P_{p-1} + x_perp P_{p-3}.
  Eigen::VectorXd interior_moments_pminus2(const Eigen::VectorXd& dofs) const;
  const Eigen::MatrixXd& interior_moment_matrix() const { return mom2_; }

  const Eigen::MatrixXd& perp_mass() const { return perp_mass_; }
  const Eigen::MatrixXd& div_mass() const { return div_mass_; }  // zero-mean basis

 private:
  const Polygon& polygon_;
  int p_;
  std::shared_ptr<PolygonIntegrator> integ_;
  Eigen::VectorXd gl_nodes_;
  Eigen::VectorXd gl_bary_w_;  // barycentric weights for the GL Lagrange basis
  VectorBasis perp_basis_;
  ScalarBasis div_basis_;
  Eigen::MatrixXd perp_mass_;
  Eigen::MatrixXd div_mass_;
  Eigen::RowVectorXd flux_row_;
  Eigen::MatrixXd boundary_mass_;
  Eigen::MatrixXd div_coef_map_;  // DoFs -> div coefficients (raw monomials)
  Eigen::MatrixXd mom2_;          // DoFs -> [P_{p-2}]^2 monomial moments

  void build_divergence_map();
  void build_interior_moments();
};

/// Computable projectors assembled as dense DoF-indexed matrices.
struct ProjectorPack {
  Eigen::MatrixXd pi_nabla;      // DoFs -> [P_p]^2 coefficients (full basis)
  Eigen::MatrixXd pi_nabla_dof;  // DoFs -> DoFs of the projection
  Eigen::MatrixXd pi0_pm2;       // DoFs -> [P_{p-2}]^2 coefficients
  Eigen::MatrixXd pi0_perp;      // DoFs -> x_perp P_{p-3} coefficients
  Eigen::MatrixXd div_map;       // DoFs -> P_{p-1} coefficients of div
  Eigen::MatrixXd poly_stiffness;  // Gram (grad m_A, grad m_B) of [P_p]^2
  double condition_estimate = 0.0;
};

ProjectorPack projector_pack(const DofLayout& layout);

/// Projection stabilization S^K as a DoF-indexed symmetric matrix
/// (not yet composed with I - Pi_nabla).
Eigen::MatrixXd stab_projection_matrix(const DofLayout& layout, BoundaryTerm bterm);
/// dofi-dofi stabilization: the identity matrix.
Eigen::MatrixXd stab_dofi_matrix(const DofLayout& layout);

/// A = consistency + (I-Pi)^T S (I-Pi), symmetric PSD with the two constant
/// fields in its kernel.
Eigen::MatrixXd discrete_form_A(const DofLayout& layout, const ProjectorPack& pack,
                                StabKind stab, BoundaryTerm bterm = BoundaryTerm::integral);
/// The consistency term alone, (grad Pi u, grad Pi v).
Eigen::MatrixXd consistency_matrix(const DofLayout& layout, const ProjectorPack& pack);

/// Matrix dump helpers (regression snapshots): row-major binary of doubles
/// plus a JSON sidecar with shape/ordering/element hash.
void dump_matrix(const Eigen::MatrixXd& m, const std::string& path_prefix,
                 const DofLayout& layout, const std::string& name);

}  // namespace vem

#endif
