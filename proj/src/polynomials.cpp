#include "vem/polynomials.hpp"

#include <cmath>

#include "vem/errors.hpp"
#include "vem/quadrature.hpp"

namespace vem {

std::pair<int, int> Monomials::exponents(int idx) {
  int d = 0;
  while ((d + 1) * (d + 2) / 2 <= idx) ++d;
  int b = idx - d * (d + 1) / 2;
  return {d - b, b};
}

int ScaledPoly::degree() const {
  int n = static_cast<int>(coef_.size());
  int d = 0;
  while (Monomials::dim(d) < n) ++d;
  return d;
}

double ScaledPoly::eval(const Vec2& x) const {
  double u = (x.x() - center_.x()) / scale_;
  double v = (x.y() - center_.y()) / scale_;
  double r = 0.0;
  for (int i = 0; i < coef_.size(); ++i) {
    if (coef_(i) == 0.0) continue;
    auto [a, b] = Monomials::exponents(i);
    r += coef_(i) * std::pow(u, a) * std::pow(v, b);
  }
  return r;
}

Eigen::Vector2d ScaledPoly::eval_grad(const Vec2& x) const {
  return {poly_dx(*this).eval(x), poly_dy(*this).eval(x)};
}

ScaledPoly poly_mul(const ScaledPoly& a, const ScaledPoly& b) {
  ScaledPoly r(a.center(), a.scale(), a.degree() + b.degree());
  for (int i = 0; i < a.coef().size(); ++i) {
    if (a.coef()(i) == 0.0) continue;
    auto [ai, bi] = Monomials::exponents(i);
    for (int j = 0; j < b.coef().size(); ++j) {
      if (b.coef()(j) == 0.0) continue;
      auto [aj, bj] = Monomials::exponents(j);
      r.coef()(Monomials::index(ai + aj, bi + bj)) += a.coef()(i) * b.coef()(j);
    }
  }
  return r;
}

ScaledPoly poly_dx(const ScaledPoly& a) {
  int d = a.degree();
  ScaledPoly r(a.center(), a.scale(), std::max(d - 1, 0));
  for (int i = 0; i < a.coef().size(); ++i) {
    auto [ai, bi] = Monomials::exponents(i);
    if (ai > 0 && a.coef()(i) != 0.0)
      r.coef()(Monomials::index(ai - 1, bi)) += a.coef()(i) * ai / a.scale();
  }
  return r;
}

ScaledPoly poly_dy(const ScaledPoly& a) {
  int d = a.degree();
  ScaledPoly r(a.center(), a.scale(), std::max(d - 1, 0));
  for (int i = 0; i < a.coef().size(); ++i) {
    auto [ai, bi] = Monomials::exponents(i);
    if (bi > 0 && a.coef()(i) != 0.0)
      r.coef()(Monomials::index(ai, bi - 1)) += a.coef()(i) * bi / a.scale();
  }
  return r;
}

ScaledPoly poly_laplacian(const ScaledPoly& a) {
  ScaledPoly dxx = poly_dx(poly_dx(a));
  ScaledPoly dyy = poly_dy(poly_dy(a));
  ScaledPoly r(a.center(), a.scale(), std::max(a.degree() - 2, 0));
  r.coef().head(dxx.coef().size()) += dxx.coef();
  r.coef().head(dyy.coef().size()) += dyy.coef();
  return r;
}

PolygonIntegrator::PolygonIntegrator(const Polygon& polygon) : polygon_(polygon) {}

void PolygonIntegrator::ensure(int degree) const {
  if (degree <= table_degree_) return;
  table_.assign(Monomials::dim(degree), 0.0);
  const Vec2 c = polygon_.centroid();
  const double h = polygon_.diameter();
  QuadRule rule = edge_rule_for_degree(degree);
  for (int e = 0; e < polygon_.num_edges(); ++e) {
    Vec2 a = polygon_.edge_start(e), b = polygon_.edge_end(e);
    double dist = polygon_.edge_normal(e).dot(a - c);
    double half_len = 0.5 * polygon_.edge_length(e);
    for (int g = 0; g < rule.weights.size(); ++g) {
      double t = rule.points(g, 0);
      Vec2 x = a + 0.5 * (t + 1.0) * (b - a);
      double u = (x.x() - c.x()) / h, v = (x.y() - c.y()) / h;
      double w = rule.weights(g) * half_len * dist;
      double pu = 1.0;
      for (int ai = 0; ai <= degree; ++ai) {
        double pv = 1.0;
        for (int bi = 0; ai + bi <= degree; ++bi) {
          table_[Monomials::index(ai, bi)] += w * pu * pv / (ai + bi + 2.0);
          pv *= v;
        }
        pu *= u;
      }
    }
  }
  table_degree_ = degree;
}

double PolygonIntegrator::monomial(int a, int b) const {
  ensure(a + b);
  return table_[Monomials::index(a, b)];
}

double PolygonIntegrator::integrate(const ScaledPoly& p) const {
  ensure(p.degree());
  double r = 0.0;
  for (int i = 0; i < p.coef().size(); ++i)
    if (p.coef()(i) != 0.0) r += p.coef()(i) * table_[i];
  return r;
}

double PolygonIntegrator::inner(const ScaledPoly& a, const ScaledPoly& b) const {
  return integrate(poly_mul(a, b));
}

double PolygonIntegrator::inner(const VectorPoly& a, const VectorPoly& b) const {
  return inner(a.x, b.x) + inner(a.y, b.y);
}

ScalarBasis::ScalarBasis(const Polygon& polygon, const PolygonIntegrator& integ, int degree,
                         bool zero_mean)
    : center_(polygon.centroid()), scale_(polygon.diameter()), degree_(degree),
      zero_mean_(zero_mean) {
  if (degree < 0) throw InvalidArgument("ScalarBasis: negative degree");
  if (zero_mean_) {
    int n = Monomials::dim(degree);
    means_.resize(n);
    for (int i = 0; i < n; ++i) {
      auto [a, b] = Monomials::exponents(i);
      means_(i) = integ.monomial(a, b) / polygon.area();
    }
  }
}

ScaledPoly ScalarBasis::member(int i) const {
  int raw = zero_mean_ ? i + 1 : i;
  ScaledPoly p(center_, scale_, degree_);
  p.coef()(raw) = 1.0;
  if (zero_mean_) p.coef()(0) -= means_(raw);
  return p;
}

VectorBasis::VectorBasis(const Polygon& polygon, VectorBasisKind kind, int scalar_degree)
    : center_(polygon.centroid()), scale_(polygon.diameter()), kind_(kind),
      scalar_degree_(scalar_degree) {}

int VectorBasis::size() const {
  if (scalar_degree_ < 0) return 0;
  switch (kind_) {
    case VectorBasisKind::full:
      return 2 * Monomials::dim(scalar_degree_);
    case VectorBasisKind::perp:
      return Monomials::dim(scalar_degree_);
    case VectorBasisKind::grad:
      return Monomials::dim(scalar_degree_) - 1;
  }
  return 0;
}

VectorPoly VectorBasis::member(int i) const {
  VectorPoly r;
  if (kind_ == VectorBasisKind::full) {
    int scalar = i / 2;
    ScaledPoly m(center_, scale_, scalar_degree_);
    m.coef()(scalar) = 1.0;
    ScaledPoly zero(center_, scale_, scalar_degree_);
    r.x = (i % 2 == 0) ? m : zero;
    r.y = (i % 2 == 0) ? zero : m;
  } else if (kind_ == VectorBasisKind::perp) {
    // (x-c)^perp m_i = ((y-c2) * m_i, -(x-c1) * m_i); the perp factor is
    // recentered but kept at physical length scale, only m_i is scaled.
    ScaledPoly m(center_, scale_, scalar_degree_);
    m.coef()(i) = 1.0;
    ScaledPoly xt(center_, scale_, 1), yt(center_, scale_, 1);
    xt.coef()(Monomials::index(1, 0)) = scale_;
    yt.coef()(Monomials::index(0, 1)) = scale_;
    r.x = poly_mul(yt, m);
    r.y = poly_mul(xt, m);
    r.y.coef() *= -1.0;
  } else {  // grad of non-constant monomial i+1 of P_{scalar_degree}
    ScaledPoly m(center_, scale_, scalar_degree_);
    m.coef()(i + 1) = 1.0;
    r.x = poly_dx(m);
    r.y = poly_dy(m);
  }
  return r;
}

Eigen::MatrixXd mass_matrix(const VectorBasis& a, const VectorBasis& b,
                            const PolygonIntegrator& integ) {
  Eigen::MatrixXd M(a.size(), b.size());
  for (int i = 0; i < a.size(); ++i) {
    VectorPoly ai = a.member(i);
    for (int j = 0; j < b.size(); ++j) M(i, j) = integ.inner(ai, b.member(j));
  }
  return M;
}

Eigen::MatrixXd mass_matrix(const ScalarBasis& a, const ScalarBasis& b,
                            const PolygonIntegrator& integ) {
  Eigen::MatrixXd M(a.size(), b.size());
  for (int i = 0; i < a.size(); ++i) {
    ScaledPoly ai = a.member(i);
    for (int j = 0; j < b.size(); ++j) M(i, j) = integ.inner(ai, b.member(j));
  }
  return M;
}

}  // namespace vem
