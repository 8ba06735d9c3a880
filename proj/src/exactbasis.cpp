#include "vem/exactbasis.hpp"

#include <cmath>

#include "vem/errors.hpp"
#include "vem/quadrature.hpp"

namespace vem {

namespace {

// Quadrature of a smooth scalar over the subtriangulation.
double mesh_integral(const TriMesh& mesh, const Field1& f, int degree) {
  QuadRule rule = triangle_rule(degree);
  double total = 0.0;
  for (const auto& tri : mesh.triangles) {
    const Vec2& a = mesh.points[tri(0)];
    const Vec2& b = mesh.points[tri(1)];
    const Vec2& c = mesh.points[tri(2)];
    double jac = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
    for (int g = 0; g < rule.weights.size(); ++g) {
      Vec2 x = a + rule.points(g, 0) * (b - a) + rule.points(g, 1) * (c - a);
      total += rule.weights(g) * jac * f(x);
    }
  }
  return total;
}

Field2 as_field(const VectorPoly& w) {
  return [w](const Vec2& x) { return w.eval(x); };
}

}  // namespace

PsiFamily solve_psi_family(const DofLayout& layout, const FemSpace& space) {
  PsiFamily psi;
  psi.space = &space;
  psi.n_boundary = layout.num_boundary_dofs();
  psi.n_perp = layout.num_perp_dofs();
  psi.n_div = layout.num_div_dofs();
  psi.fields.resize(layout.num_dofs());

  const Polygon& poly = layout.polygon();
  const int p = layout.degree();
  const double area = poly.area();

  // Boundary family: canonical Lagrange trace at one edge node, constant
  // divergence absorbing the boundary flux.
  for (int i = 0; i < psi.n_boundary; ++i) {
    std::vector<std::function<Eigen::Vector2d(double)>> edge_polys(poly.num_edges());
    for (int e = 0; e < poly.num_edges(); ++e) {
      int local = -1, comp = -1;
      for (int k = 0; k <= p && local < 0; ++k)
        for (int c = 0; c < 2; ++c)
          if (layout.edge_node_dof(e, k, c) == i) {
            local = k;
            comp = c;
          }
      if (local < 0) {
        edge_polys[e] = [](double) { return Eigen::Vector2d::Zero().eval(); };
      } else {
        edge_polys[e] = [&layout, local, comp](double t) {
          Eigen::Vector2d v = Eigen::Vector2d::Zero();
          v(comp) = layout.edge_lagrange(2.0 * t - 1.0)(local);
          return v;
        };
      }
    }
    // Use the flux of the sampled trace rather than the exact polynomial flux:
    // for edge traces of degree > 2 the two differ by the trace interpolation
    // error, and the constant divergence datum must balance the flux the
    // discrete problem actually sees.
    std::vector<Eigen::Vector2d> trace = space.dirichlet_trace_from_edge_polys(edge_polys);
    double gval = space.trace_flux(trace) / area;
    Field1 g = [gval](const Vec2&) { return gval; };
    psi.fields[i] = space.solve_stokes(nullptr, 0, g, 0, trace);
  }

  // Forced family: zero trace, divergence free, unit orthogonal load.
  for (int a = 0; a < psi.n_perp; ++a) {
    Field2 f = as_field(layout.perp_basis().member(a));
    std::vector<Eigen::Vector2d> zero_trace(space.boundary_nodes().size(),
                                            Eigen::Vector2d::Zero());
    psi.fields[layout.perp_dof(a)] =
        space.solve_stokes(f, p - 2, nullptr, 0, zero_trace);
  }

  // Divergence family: zero trace, prescribed zero-mean divergence.
  for (int g = 0; g < psi.n_div; ++g) {
    ScaledPoly m = layout.div_basis().member(g);
    Field1 gf = [m](const Vec2& x) { return m.eval(x); };
    std::vector<Eigen::Vector2d> zero_trace(space.boundary_nodes().size(),
                                            Eigen::Vector2d::Zero());
    psi.fields[layout.div_dof(g)] =
        space.solve_stokes(nullptr, 0, gf, p - 1, zero_trace);
  }
  return psi;
}

Eigen::MatrixXd change_of_basis(const DofLayout& layout, const PsiFamily& psi) {
  const int N = layout.num_dofs();
  const int np = psi.n_perp, nd = psi.n_div, nb = psi.n_boundary;
  const FemSpace& space = *psi.space;
  const double area = layout.polygon().area();
  const double hk = layout.polygon().diameter();
  const int p = layout.degree();

  Eigen::MatrixXd C = Eigen::MatrixXd::Identity(N, N);

  Eigen::MatrixXd P(np, np);       // orthogonal moments of the forced family
  Eigen::MatrixXd R(np, nb);       // ... of the boundary family
  Eigen::MatrixXd Q(np, nd);       // ... of the divergence family
  for (int bt = 0; bt < np; ++bt) {
    Field2 q = as_field(layout.perp_basis().member(bt));
    int qdeg = p - 2;
    for (int b = 0; b < np; ++b)
      P(bt, b) = space.moment(psi.fields[layout.perp_dof(b)], q, qdeg);
    for (int i = 0; i < nb; ++i) R(bt, i) = space.moment(psi.fields[i], q, qdeg);
    for (int g = 0; g < nd; ++g)
      Q(bt, g) = space.moment(psi.fields[layout.div_dof(g)], q, qdeg);
  }

  Eigen::FullPivLU<Eigen::MatrixXd> plu(P);
  if (np > 0 && !plu.isInvertible())
    throw ExpansionError("orthogonal-moment system of the forced family is singular");

  // Dual to the divergence moments first: divergence part from the zero-mean
  // Gram, then cancel the induced orthogonal moments.
  Eigen::MatrixXd Cdiv =
      (area / hk) * layout.div_mass().ldlt().solve(Eigen::MatrixXd::Identity(nd, nd));
  for (int g = 0; g < nd; ++g) {
    C.block(layout.div_dof(0), layout.div_dof(g), nd, 1) = Cdiv.col(g);
    if (np > 0)
      C.block(layout.perp_dof(0), layout.div_dof(g), np, 1) = -plu.solve(Q * Cdiv.col(g));
  }
  if (np > 0) {
    // Dual to the orthogonal moments.
    Eigen::MatrixXd Cperp = plu.solve(area * Eigen::MatrixXd::Identity(np, np));
    for (int a = 0; a < np; ++a)
      C.block(layout.perp_dof(0), layout.perp_dof(a), np, 1) = Cperp.col(a);
    // Boundary duals: keep the canonical trace, cancel orthogonal moments.
    for (int i = 0; i < nb; ++i)
      C.block(layout.perp_dof(0), i, np, 1) = -plu.solve(R.col(i));
  }
  return C;
}

Eigen::MatrixXd exact_stiffness(const DofLayout& layout, const PsiFamily& psi) {
  const int N = layout.num_dofs();
  Eigen::MatrixXd G(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      G(i, j) = psi.space->h1_semi_inner(psi.fields[i], psi.fields[j]);
      G(j, i) = G(i, j);
    }
  Eigen::MatrixXd C = change_of_basis(layout, psi);
  Eigen::MatrixXd B = C.transpose() * G * C;
  return 0.5 * (B + B.transpose());
}

Eigen::VectorXd interpolation_dofs(const DofLayout& layout, const TriMesh& mesh,
                                   const Field2& u, const Field2& grad_row0,
                                   const Field2& grad_row1, int quad_degree) {
  const Polygon& poly = layout.polygon();
  const int p = layout.degree();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(layout.num_dofs());
  for (int v = 0; v < poly.num_edges(); ++v) {
    Eigen::Vector2d val = u(poly.vertices()[v]);
    d(layout.vertex_dof(v, 0)) = val.x();
    d(layout.vertex_dof(v, 1)) = val.y();
  }
  const Eigen::VectorXd& gl = layout.gl_nodes();
  for (int e = 0; e < poly.num_edges(); ++e) {
    Vec2 a = poly.edge_start(e), b = poly.edge_end(e);
    for (int k = 1; k < p; ++k) {
      Eigen::Vector2d val = u(a + 0.5 * (gl(k) + 1.0) * (b - a));
      d(layout.edge_dof(e, k - 1, 0)) = val.x();
      d(layout.edge_dof(e, k - 1, 1)) = val.y();
    }
  }
  double area = poly.area(), hk = poly.diameter();
  for (int a = 0; a < layout.num_perp_dofs(); ++a) {
    VectorPoly q = layout.perp_basis().member(a);
    Field1 integrand = [&u, &q](const Vec2& x) { return u(x).dot(q.eval(x)); };
    d(layout.perp_dof(a)) = mesh_integral(mesh, integrand, quad_degree + p - 2) / area;
  }
  Field1 divu = [&grad_row0, &grad_row1](const Vec2& x) {
    return grad_row0(x).x() + grad_row1(x).y();
  };
  for (int g = 0; g < layout.num_div_dofs(); ++g) {
    ScaledPoly m = layout.div_basis().member(g);
    Field1 integrand = [&divu, m](const Vec2& x) { return divu(x) * m.eval(x); };
    d(layout.div_dof(g)) = hk / area * mesh_integral(mesh, integrand, quad_degree + p - 1);
  }
  return d;
}

FemField realize_virtual_function(const DofLayout& layout, const PsiFamily& psi,
                                  const Eigen::MatrixXd& basis_coefs,
                                  const Eigen::VectorXd& dofs) {
  (void)layout;
  Eigen::VectorXd c = basis_coefs * dofs;
  const FemSpace& space = *psi.space;
  Eigen::VectorXd vel = Eigen::VectorXd::Zero(space.velocity_dim());
  Eigen::VectorXd pres = Eigen::VectorXd::Zero(space.pressure_dim());
  double mult = 0.0;
  for (int i = 0; i < c.size(); ++i) {
    if (c(i) == 0.0) continue;
    vel += c(i) * psi.fields[i].velocity();
    pres += c(i) * psi.fields[i].pressure();
    mult += c(i) * psi.fields[i].multiplier();
  }
  return FemField(space, std::move(vel), std::move(pres), mult);
}

}  // namespace vem
