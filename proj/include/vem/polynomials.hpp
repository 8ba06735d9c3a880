#ifndef VEM_POLYNOMIALS_HPP
#define VEM_POLYNOMIALS_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "vem/geometry.hpp"

namespace vem {

/// Graded-lexicographic enumeration of bivariate multi-indices:
/// (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
struct Monomials {
  static int dim(int degree) { return (degree + 1) * (degree + 2) / 2; }
  static int index(int a, int b) {
    int d = a + b;
    return d * (d + 1) / 2 + b;
  }
  static std::pair<int, int> exponents(int idx);
};

/// Polynomial in the scaled monomial basis m_(a,b)(x) = ((x-c)/h)^(a,b).
class ScaledPoly {
 public:
  ScaledPoly() = default;
  ScaledPoly(const Vec2& center, double scale, int degree)
      : center_(center), scale_(scale), coef_(Eigen::VectorXd::Zero(Monomials::dim(degree))) {}

  const Vec2& center() const { return center_; }
  double scale() const { return scale_; }
  int degree() const;
  Eigen::VectorXd& coef() { return coef_; }
  const Eigen::VectorXd& coef() const { return coef_; }

  double eval(const Vec2& x) const;
  Eigen::Vector2d eval_grad(const Vec2& x) const;

 private:
  Vec2 center_ = Vec2::Zero();
  double scale_ = 1.0;
  Eigen::VectorXd coef_;
};

ScaledPoly poly_mul(const ScaledPoly& a, const ScaledPoly& b);
ScaledPoly poly_dx(const ScaledPoly& a);
ScaledPoly poly_dy(const ScaledPoly& a);
ScaledPoly poly_laplacian(const ScaledPoly& a);

/// Two-component polynomial field.
struct VectorPoly {
  ScaledPoly x, y;
  Eigen::Vector2d eval(const Vec2& p) const { return {x.eval(p), y.eval(p)}; }
};

/// Exact integrals of scaled monomials over a polygon, via the homogeneous
/// function identity int_K f = 1/(q+2) sum_e dist(x_K, e) int_e f for f
/// homogeneous of degree q about x_K. Entries memoized.
class PolygonIntegrator {
 public:
  explicit PolygonIntegrator(const Polygon& polygon);

  double monomial(int a, int b) const;
  double integrate(const ScaledPoly& p) const;
  double inner(const ScaledPoly& a, const ScaledPoly& b) const;
  double inner(const VectorPoly& a, const VectorPoly& b) const;

  const Polygon& polygon() const { return polygon_; }

 private:
  const Polygon& polygon_;
  mutable std::vector<double> table_;  // indexed by Monomials::index
  mutable int table_degree_ = -1;
  void ensure(int degree) const;
};

/// Scaled monomial basis of P_degree(K); with zero_mean the constant member is
/// dropped and every other member is mean-subtracted.
class ScalarBasis {
 public:
  ScalarBasis(const Polygon& polygon, const PolygonIntegrator& integ, int degree, bool zero_mean);

  int size() const { return zero_mean_ ? Monomials::dim(degree_) - 1 : Monomials::dim(degree_); }
  int degree() const { return degree_; }
  bool zero_mean() const { return zero_mean_; }
  ScaledPoly member(int i) const;

 private:
  Vec2 center_;
  double scale_;
  int degree_;
  bool zero_mean_;
  Eigen::VectorXd means_;  // mean of each raw monomial over K
};

enum class VectorBasisKind { full, perp, grad };

/// Vector polynomial families used by the DoF definitions:
///   full: [P_l]^2, components interleaved per scalar member;
///   perp: q_a = ((x-x_K)/h_K)^perp m_a over a basis of P_{l} (l = p-3);
///   grad: gradients of the non-constant scaled monomials of P_{l} (l = p-1).
class VectorBasis {
 public:
  VectorBasis(const Polygon& polygon, VectorBasisKind kind, int scalar_degree);

  int size() const;
  VectorBasisKind kind() const { return kind_; }
  int scalar_degree() const { return scalar_degree_; }
  VectorPoly member(int i) const;

 private:
  Vec2 center_;
  double scale_;
  VectorBasisKind kind_;
  int scalar_degree_;  // degree of the underlying scalar space
};

/// Exact Gram matrix int_K a_i . b_j over the polygon.
Eigen::MatrixXd mass_matrix(const VectorBasis& a, const VectorBasis& b,
                            const PolygonIntegrator& integ);
Eigen::MatrixXd mass_matrix(const ScalarBasis& a, const ScalarBasis& b,
                            const PolygonIntegrator& integ);

}  // namespace vem

#endif
