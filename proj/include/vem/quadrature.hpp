#ifndef VEM_QUADRATURE_HPP
#define VEM_QUADRATURE_HPP

#include <Eigen/Dense>

namespace vem {

/// Points and weights on a reference domain ([-1,1] for edges, the unit
/// triangle (0,0)-(1,0)-(0,1) for triangles), together with the polynomial
/// degree the rule integrates exactly.
struct QuadRule {
  Eigen::MatrixXd points;   // n x 1 (edge) or n x 2 (triangle)
  Eigen::VectorXd weights;  // sums to the reference measure
  int exactness = 0;
};

/// Gauss-Legendre rule on [-1,1], exact for polynomials of degree 2n-1.
QuadRule edge_gauss_legendre(int n_points);

/// Smallest Gauss-Legendre rule exact for the given degree on [-1,1].
QuadRule edge_rule_for_degree(int degree);

/// Gauss-Lobatto nodes on [-1,1] for degree p: p+1 points including the
/// endpoints, with the p-1 interior points at the roots of P_p'.
Eigen::VectorXd gauss_lobatto_nodes(int p);

/// Gauss-Lobatto weights matching gauss_lobatto_nodes(p); they sum to 2.
Eigen::VectorXd gauss_lobatto_weights(int p);

/// Collapsed-coordinate (Duffy) tensor rule on the unit triangle, exact for
/// bivariate polynomials of total degree <= degree.
QuadRule triangle_rule(int degree);

}  // namespace vem

#endif
