#include "vem/vemspace.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>

#include "vem/errors.hpp"
#include "vem/quadrature.hpp"

namespace vem {

namespace {

Eigen::VectorXd barycentric_weights(const Eigen::VectorXd& nodes) {
  int n = static_cast<int>(nodes.size());
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i) w(i) /= (nodes(i) - nodes(j));
  return w;
}

Eigen::VectorXd lagrange_values(const Eigen::VectorXd& nodes, const Eigen::VectorXd& bw,
                                double xi) {
  int n = static_cast<int>(nodes.size());
  Eigen::VectorXd L = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (std::abs(xi - nodes(i)) < 1e-14) {
      L(i) = 1.0;
      return L;
    }
  }
  double denom = 0.0;
  for (int i = 0; i < n; ++i) denom += bw(i) / (xi - nodes(i));
  for (int i = 0; i < n; ++i) L(i) = (bw(i) / (xi - nodes(i))) / denom;
  return L;
}

}  // namespace

DofLayout::DofLayout(const Polygon& polygon, int p)
    : polygon_(polygon), p_(p), integ_(std::make_shared<PolygonIntegrator>(polygon)),
      gl_nodes_(gauss_lobatto_nodes(p)),
      perp_basis_(polygon, VectorBasisKind::perp, p - 3),
      div_basis_(polygon, *integ_, p - 1, true) {
  if (p < 2) throw InvalidArgument("DofLayout: p >= 2 required");
  gl_bary_w_ = barycentric_weights(gl_nodes_);

  if (num_perp_dofs() > 0) perp_mass_ = mass_matrix(perp_basis_, perp_basis_, *integ_);
  div_mass_ = mass_matrix(div_basis_, div_basis_, *integ_);

  // Boundary flux row and boundary mass matrix over the GL Lagrange traces.
  const int N = num_dofs();
  flux_row_ = Eigen::RowVectorXd::Zero(N);
  boundary_mass_ = Eigen::MatrixXd::Zero(N, N);
  QuadRule rule = edge_rule_for_degree(2 * p_ + 1);
  for (int e = 0; e < num_edges(); ++e) {
    Vec2 nrm = polygon_.edge_normal(e);
    double half = 0.5 * polygon_.edge_length(e);
    for (int g = 0; g < rule.weights.size(); ++g) {
      Eigen::VectorXd L = lagrange_values(gl_nodes_, gl_bary_w_, rule.points(g, 0));
      double w = rule.weights(g) * half;
      for (int k = 0; k <= p_; ++k) {
        for (int c = 0; c < 2; ++c) {
          int dk = edge_node_dof(e, k, c);
          flux_row_(dk) += w * L(k) * nrm(c);
          for (int l = 0; l <= p_; ++l)
            boundary_mass_(dk, edge_node_dof(e, l, c)) += w * L(k) * L(l);
        }
      }
    }
  }

  build_divergence_map();
  build_interior_moments();
}

int DofLayout::edge_node_dof(int e, int k, int comp) const {
  if (k == 0) return vertex_dof(e, comp);
  if (k == p_) return vertex_dof((e + 1) % num_edges(), comp);
  return edge_dof(e, k - 1, comp);
}

Eigen::VectorXd DofLayout::edge_lagrange(double xi) const {
  return lagrange_values(gl_nodes_, gl_bary_w_, xi);
}

Eigen::Vector2d DofLayout::edge_trace(const Eigen::VectorXd& dofs, int e, double xi) const {
  Eigen::VectorXd L = edge_lagrange(xi);
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  for (int k = 0; k <= p_; ++k)
    for (int c = 0; c < 2; ++c) v(c) += L(k) * dofs(edge_node_dof(e, k, c));
  return v;
}

Eigen::VectorXd DofLayout::dofs_of_polynomial(const VectorPoly& q) const {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(num_dofs());
  for (int v = 0; v < num_edges(); ++v) {
    Eigen::Vector2d val = q.eval(polygon_.vertices()[v]);
    d(vertex_dof(v, 0)) = val.x();
    d(vertex_dof(v, 1)) = val.y();
  }
  for (int e = 0; e < num_edges(); ++e) {
    Vec2 a = polygon_.edge_start(e), b = polygon_.edge_end(e);
    for (int k = 1; k < p_; ++k) {
      Vec2 x = a + 0.5 * (gl_nodes_(k) + 1.0) * (b - a);
      Eigen::Vector2d val = q.eval(x);
      d(edge_dof(e, k - 1, 0)) = val.x();
      d(edge_dof(e, k - 1, 1)) = val.y();
    }
  }
  double area = polygon_.area();
  for (int a = 0; a < num_perp_dofs(); ++a)
    d(perp_dof(a)) = integ_->inner(q, perp_basis_.member(a)) / area;
  ScaledPoly div = poly_dx(q.x);
  {
    ScaledPoly dy = poly_dy(q.y);
    ScaledPoly sum(div.center(), div.scale(), std::max(div.degree(), dy.degree()));
    sum.coef().head(div.coef().size()) += div.coef();
    sum.coef().head(dy.coef().size()) += dy.coef();
    div = sum;
  }
  double hk = polygon_.diameter();
  for (int g = 0; g < num_div_dofs(); ++g)
    d(div_dof(g)) = hk / area * integ_->inner(div, div_basis_.member(g));
  return d;
}

Eigen::RowVectorXd DofLayout::boundary_normal_moment(const ScaledPoly& m) const {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(num_dofs());
  QuadRule rule = edge_rule_for_degree(p_ + m.degree() + 1);
  for (int e = 0; e < num_edges(); ++e) {
    Vec2 a = polygon_.edge_start(e), b = polygon_.edge_end(e);
    Vec2 nrm = polygon_.edge_normal(e);
    double half = 0.5 * polygon_.edge_length(e);
    for (int g = 0; g < rule.weights.size(); ++g) {
      Vec2 x = a + 0.5 * (rule.points(g, 0) + 1.0) * (b - a);
      double w = rule.weights(g) * half * m.eval(x);
      Eigen::VectorXd L = lagrange_values(gl_nodes_, gl_bary_w_, rule.points(g, 0));
      for (int k = 0; k <= p_; ++k)
        for (int c = 0; c < 2; ++c) row(edge_node_dof(e, k, c)) += w * L(k) * nrm(c);
    }
  }
  return row;
}

Eigen::RowVectorXd DofLayout::boundary_vector_moment(const VectorPoly& w) const {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(num_dofs());
  int wdeg = std::max(w.x.degree(), w.y.degree());
  QuadRule rule = edge_rule_for_degree(p_ + wdeg + 1);
  for (int e = 0; e < num_edges(); ++e) {
    Vec2 a = polygon_.edge_start(e), b = polygon_.edge_end(e);
    double half = 0.5 * polygon_.edge_length(e);
    for (int g = 0; g < rule.weights.size(); ++g) {
      Vec2 x = a + 0.5 * (rule.points(g, 0) + 1.0) * (b - a);
      Eigen::Vector2d wx = w.eval(x);
      double wq = rule.weights(g) * half;
      Eigen::VectorXd L = lagrange_values(gl_nodes_, gl_bary_w_, rule.points(g, 0));
      for (int k = 0; k <= p_; ++k)
        for (int c = 0; c < 2; ++c) row(edge_node_dof(e, k, c)) += wq * L(k) * wx(c);
    }
  }
  return row;
}

void DofLayout::build_divergence_map() {
  // div v = c0 + sum_g d_g mbar_g; the zero-mean moments come straight from
  // the Dv4 DoFs, the mean from the boundary flux.
  const int N = num_dofs();
  const int nd = num_div_dofs();
  div_coef_map_ = Eigen::MatrixXd::Zero(Monomials::dim(p_ - 1), N);
  double area = polygon_.area(), hk = polygon_.diameter();

  Eigen::MatrixXd sel = Eigen::MatrixXd::Zero(nd, N);
  for (int g = 0; g < nd; ++g) sel(g, div_dof(g)) = 1.0;
  Eigen::MatrixXd dzm = div_mass_.ldlt().solve((area / hk) * sel);

  // Expand the zero-mean basis into raw monomial coefficients.
  for (int g = 0; g < nd; ++g) {
    ScaledPoly m = div_basis_.member(g);
    for (int i = 0; i < m.coef().size(); ++i)
      if (m.coef()(i) != 0.0) div_coef_map_.row(i) += m.coef()(i) * dzm.row(g);
  }
  div_coef_map_.row(0) += flux_row_ / area;
}

Eigen::VectorXd DofLayout::divergence_from_dofs(const Eigen::VectorXd& dofs) const {
  return div_coef_map_ * dofs;
}

ScaledPoly DofLayout::divergence_poly(const Eigen::VectorXd& dofs) const {
  ScaledPoly d(polygon_.centroid(), polygon_.diameter(), p_ - 1);
  d.coef() = divergence_from_dofs(dofs);
  return d;
}

void DofLayout::build_interior_moments() {
  const int N = num_dofs();
  const int dim_s = Monomials::dim(p_ - 2);  // scalar P_{p-2}
  const int dim_v = 2 * dim_s;
  VectorBasis grad(polygon_, VectorBasisKind::grad, p_ - 1);
  const int ng = grad.size();
  const int np = num_perp_dofs();
  if (ng + np != dim_v) throw DecompositionError("grad+perp dimension mismatch");

  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(dim_v, ng + np);
  auto pack_coef = [&](const VectorPoly& w, int col) {
    for (int i = 0; i < w.x.coef().size(); ++i) E(2 * i, col) += w.x.coef()(i);
    for (int i = 0; i < w.y.coef().size(); ++i) E(2 * i + 1, col) += w.y.coef()(i);
  };
  for (int k = 0; k < ng; ++k) pack_coef(grad.member(k), k);
  for (int a = 0; a < np; ++a) pack_coef(perp_basis_.member(a), ng + a);

  // Moment rows of v against each family member.
  Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(ng + np, N);
  for (int k = 0; k < ng; ++k) {
    // int v . grad(m) = -int (div v) m + int_dK (v.n) m, with m the raw
    // non-constant monomial k+1 of P_{p-1}.
    ScaledPoly m(polygon_.centroid(), polygon_.diameter(), p_ - 1);
    m.coef()(k + 1) = 1.0;
    Eigen::RowVectorXd row = boundary_normal_moment(m);
    // -(div v, m): expand through the divergence coefficient map.
    for (int i = 0; i < Monomials::dim(p_ - 1); ++i) {
      auto [a, b] = Monomials::exponents(i);
      auto [am, bm] = Monomials::exponents(k + 1);
      row -= integ_->monomial(a + am, b + bm) * div_coef_map_.row(i);
    }
    mu.row(k) = row;
  }
  for (int a = 0; a < np; ++a) mu.row(ng + a) = polygon_.area() * Eigen::RowVectorXd::Unit(N, perp_dof(a));

  Eigen::FullPivLU<Eigen::MatrixXd> lu(E.transpose());
  if (!lu.isInvertible()) throw DecompositionError("grad+perp splitting is rank deficient");
  mom2_ = lu.solve(mu);
}

Eigen::VectorXd DofLayout::interior_moments_pminus2(const Eigen::VectorXd& dofs) const {
  return mom2_ * dofs;
}

ProjectorPack projector_pack(const DofLayout& layout) {
  const Polygon& poly = layout.polygon();
  const PolygonIntegrator& integ = layout.integrator();
  const int p = layout.degree();
  const int N = layout.num_dofs();
  const int dim_sp = Monomials::dim(p);
  const int dim_v = 2 * dim_sp;

  ProjectorPack pack;

  // Stiffness Gram of the interleaved [P_p]^2 monomial basis; components do
  // not couple.
  Eigen::MatrixXd gs = Eigen::MatrixXd::Zero(dim_sp, dim_sp);
  std::vector<ScaledPoly> mono(dim_sp);
  for (int i = 0; i < dim_sp; ++i) {
    mono[i] = ScaledPoly(poly.centroid(), poly.diameter(), p);
    mono[i].coef()(i) = 1.0;
  }
  std::vector<ScaledPoly> mdx(dim_sp), mdy(dim_sp);
  for (int i = 0; i < dim_sp; ++i) {
    mdx[i] = poly_dx(mono[i]);
    mdy[i] = poly_dy(mono[i]);
  }
  for (int i = 0; i < dim_sp; ++i)
    for (int j = 0; j < dim_sp; ++j)
      gs(i, j) = integ.inner(mdx[i], mdx[j]) + integ.inner(mdy[i], mdy[j]);
  pack.poly_stiffness = Eigen::MatrixXd::Zero(dim_v, dim_v);
  for (int i = 0; i < dim_sp; ++i)
    for (int j = 0; j < dim_sp; ++j) {
      pack.poly_stiffness(2 * i, 2 * j) = gs(i, j);
      pack.poly_stiffness(2 * i + 1, 2 * j + 1) = gs(i, j);
    }

  // H1 projector: G pi = B with the constant rows replaced by the boundary
  // average condition int_dK (v - pi v) = 0.
  Eigen::MatrixXd G = pack.poly_stiffness;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(dim_v, N);
  const Eigen::MatrixXd& mom2 = layout.interior_moment_matrix();
  for (int i = 0; i < dim_sp; ++i) {
    ScaledPoly lap = poly_laplacian(mono[i]);
    Eigen::RowVectorXd bulk_x = Eigen::RowVectorXd::Zero(N);
    Eigen::RowVectorXd bulk_y = Eigen::RowVectorXd::Zero(N);
    if (p >= 2) {
      for (int k = 0; k < lap.coef().size(); ++k) {
        if (lap.coef()(k) == 0.0) continue;
        bulk_x += lap.coef()(k) * mom2.row(2 * k);
        bulk_y += lap.coef()(k) * mom2.row(2 * k + 1);
      }
    }
    // Boundary term int_dK (grad m . n) v_c, edge by edge.
    Eigen::RowVectorXd bnd_x = Eigen::RowVectorXd::Zero(N);
    Eigen::RowVectorXd bnd_y = Eigen::RowVectorXd::Zero(N);
    for (int e = 0; e < poly.num_edges(); ++e) {
      Vec2 nrm = poly.edge_normal(e);
      ScaledPoly dn(poly.centroid(), poly.diameter(), std::max(p - 1, 0));
      dn.coef().head(mdx[i].coef().size()) += nrm.x() * mdx[i].coef();
      dn.coef().head(mdy[i].coef().size()) += nrm.y() * mdy[i].coef();
      // Edge-restricted scalar moment of one velocity component.
      QuadRule rule = edge_rule_for_degree(p + dn.degree() + 1);
      Vec2 a = poly.edge_start(e), b = poly.edge_end(e);
      double half = 0.5 * poly.edge_length(e);
      for (int g = 0; g < rule.weights.size(); ++g) {
        Vec2 x = a + 0.5 * (rule.points(g, 0) + 1.0) * (b - a);
        double w = rule.weights(g) * half * dn.eval(x);
        Eigen::VectorXd L = layout.edge_lagrange(rule.points(g, 0));
        for (int k = 0; k <= p; ++k) {
          bnd_x(layout.edge_node_dof(e, k, 0)) += w * L(k);
          bnd_y(layout.edge_node_dof(e, k, 1)) += w * L(k);
        }
      }
    }
    B.row(2 * i) = bnd_x - bulk_x;
    B.row(2 * i + 1) = bnd_y - bulk_y;
  }
  // Constant rows: boundary averages.
  {
    Eigen::RowVectorXd bavg_x = Eigen::RowVectorXd::Zero(N);
    Eigen::RowVectorXd bavg_y = Eigen::RowVectorXd::Zero(N);
    double per = 0.0;
    QuadRule rule = edge_rule_for_degree(p + 1);
    for (int e = 0; e < poly.num_edges(); ++e) {
      per += poly.edge_length(e);
      double half = 0.5 * poly.edge_length(e);
      for (int g = 0; g < rule.weights.size(); ++g) {
        Eigen::VectorXd L = layout.edge_lagrange(rule.points(g, 0));
        for (int k = 0; k <= p; ++k) {
          bavg_x(layout.edge_node_dof(e, k, 0)) += rule.weights(g) * half * L(k);
          bavg_y(layout.edge_node_dof(e, k, 1)) += rule.weights(g) * half * L(k);
        }
      }
    }
    for (int j = 0; j < dim_sp; ++j) {
      // int_dK (monomial j) per component.
      double bint = 0.0;
      QuadRule r2 = edge_rule_for_degree(p + 1);
      for (int e = 0; e < poly.num_edges(); ++e) {
        Vec2 a = poly.edge_start(e), b = poly.edge_end(e);
        double half = 0.5 * poly.edge_length(e);
        for (int g = 0; g < r2.weights.size(); ++g) {
          Vec2 x = a + 0.5 * (r2.points(g, 0) + 1.0) * (b - a);
          bint += r2.weights(g) * half * mono[j].eval(x);
        }
      }
      G(0, 2 * j) = bint;
      G(0, 2 * j + 1) = 0.0;
      G(1, 2 * j) = 0.0;
      G(1, 2 * j + 1) = bint;
    }
    B.row(0) = bavg_x;
    B.row(1) = bavg_y;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
  if (!lu.isInvertible())
    throw ConditioningError("H1 projector Gram is singular (rcond " +
                            std::to_string(lu.rcond()) + ")");
  pack.condition_estimate = 1.0 / std::max(lu.rcond(), 1e-300);
  pack.pi_nabla = lu.solve(B);

  // DoF matrix of the projection.
  VectorBasis full(poly, VectorBasisKind::full, p);
  Eigen::MatrixXd dof_of_poly(N, dim_v);
  for (int j = 0; j < dim_v; ++j) dof_of_poly.col(j) = layout.dofs_of_polynomial(full.member(j));
  pack.pi_nabla_dof = dof_of_poly * pack.pi_nabla;

  // L2 projectors.
  if (p >= 2) {
    VectorBasis vb2(poly, VectorBasisKind::full, p - 2);
    Eigen::MatrixXd M2 = mass_matrix(vb2, vb2, integ);
    pack.pi0_pm2 = M2.ldlt().solve(layout.interior_moment_matrix());
  }
  if (layout.num_perp_dofs() > 0) {
    Eigen::MatrixXd sel = Eigen::MatrixXd::Zero(layout.num_perp_dofs(), N);
    for (int a = 0; a < layout.num_perp_dofs(); ++a) sel(a, layout.perp_dof(a)) = 1.0;
    pack.pi0_perp = layout.perp_mass().ldlt().solve(poly.area() * sel);
  } else {
    pack.pi0_perp = Eigen::MatrixXd::Zero(0, N);
  }
  pack.div_map = layout.divergence_coefficient_map();

  return pack;
}

Eigen::MatrixXd stab_projection_matrix(const DofLayout& layout, BoundaryTerm bterm) {
  const Polygon& poly = layout.polygon();
  const int N = layout.num_dofs();
  const double hk = poly.diameter();
  const double area = poly.area();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(N, N);

  // h^-2 (Pi_perp u, Pi_perp v): with int v.q_a = |K| Dv3_a, this collapses to
  // |K|^2 h^-2 Sel^T Mperp^-1 Sel.
  if (layout.num_perp_dofs() > 0) {
    Eigen::MatrixXd sel = Eigen::MatrixXd::Zero(layout.num_perp_dofs(), N);
    for (int a = 0; a < layout.num_perp_dofs(); ++a) sel(a, layout.perp_dof(a)) = 1.0;
    Eigen::MatrixXd Minv_sel = layout.perp_mass().ldlt().solve(sel);
    S += (area * area / (hk * hk)) * sel.transpose() * Minv_sel;
  }
  // (div u, div v) = |K| c0(u) c0(v) + zero-mean part through the Dv4 Gram.
  {
    Eigen::RowVectorXd c0 = layout.flux_row() / area;
    S += area * c0.transpose() * c0;
    int nd = layout.num_div_dofs();
    Eigen::MatrixXd sel = Eigen::MatrixXd::Zero(nd, N);
    for (int g = 0; g < nd; ++g) sel(g, layout.div_dof(g)) = 1.0;
    double s = area / hk;
    S += s * s * sel.transpose() * layout.div_mass().ldlt().solve(sel);
  }
  if (bterm == BoundaryTerm::integral) {
    S += layout.boundary_mass() / hk;
  } else {
    for (int j = 0; j < layout.num_boundary_dofs(); ++j) S(j, j) += 1.0;
  }
  return S;
}

Eigen::MatrixXd stab_dofi_matrix(const DofLayout& layout) {
  return Eigen::MatrixXd::Identity(layout.num_dofs(), layout.num_dofs());
}

Eigen::MatrixXd consistency_matrix(const DofLayout& layout, const ProjectorPack& pack) {
  (void)layout;
  return pack.pi_nabla.transpose() * pack.poly_stiffness * pack.pi_nabla;
}

Eigen::MatrixXd discrete_form_A(const DofLayout& layout, const ProjectorPack& pack,
                                StabKind stab, BoundaryTerm bterm) {
  Eigen::MatrixXd S = (stab == StabKind::projection) ? stab_projection_matrix(layout, bterm)
                                                     : stab_dofi_matrix(layout);
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(layout.num_dofs(), layout.num_dofs());
  Eigen::MatrixXd IP = I - pack.pi_nabla_dof;
  Eigen::MatrixXd A = consistency_matrix(layout, pack) + IP.transpose() * S * IP;
  double asym = (A - A.transpose()).norm();
  if (asym > 1e-10 * std::max(A.norm(), 1e-30))
    throw AssemblyError("discrete form is not symmetric");
  A = 0.5 * (A + A.transpose());
  return A;
}

void dump_matrix(const Eigen::MatrixXd& m, const std::string& path_prefix,
                 const DofLayout& layout, const std::string& name) {
  std::ofstream bin(path_prefix + ".bin", std::ios::binary);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      double v = m(i, j);
      bin.write(reinterpret_cast<const char*>(&v), sizeof(double));
    }
  nlohmann::json j;
  j["name"] = name;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["ordering"] = "Dv1 by vertex, Dv2 by edge/node, Dv3 graded-lex, Dv4 graded-lex; "
                  "x/y interleaved on boundary dofs";
  size_t h = 1469598103934665603ull;
  for (const auto& v : layout.polygon().vertices()) {
    for (double c : {v.x(), v.y()}) {
      const auto* bytes = reinterpret_cast<const unsigned char*>(&c);
      for (size_t b = 0; b < sizeof(double); ++b) h = (h ^ bytes[b]) * 1099511628211ull;
    }
  }
  j["element_hash"] = h;
  j["p"] = layout.degree();
  std::ofstream side(path_prefix + ".json");
  side << j.dump(2);
}

}  // namespace vem
