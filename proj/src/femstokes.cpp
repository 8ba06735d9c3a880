#include "vem/femstokes.hpp"

#include <cmath>
#include <map>

#include "vem/errors.hpp"
#include "vem/quadrature.hpp"

namespace vem {

namespace {

// P2 shape functions and reference gradients, nodes (v0,v1,v2,m01,m12,m20).
void p2_shapes(double xi, double eta, Eigen::Matrix<double, 6, 1>& N,
               Eigen::Matrix<double, 6, 2>& dN) {
  double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
  N << l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1), 4 * l0 * l1, 4 * l1 * l2,
      4 * l2 * l0;
  // d/dxi, d/deta with dl0 = (-1,-1), dl1 = (1,0), dl2 = (0,1).
  dN << 1 - 4 * l0, 1 - 4 * l0,
        4 * l1 - 1, 0,
        0, 4 * l2 - 1,
        4 * (l0 - l1), -4 * l1,
        4 * l2, 4 * l1,
        -4 * l2, 4 * (l0 - l2);
}

void p1_shapes(double xi, double eta, Eigen::Vector3d& N) {
  N << 1.0 - xi - eta, xi, eta;
}

}  // namespace

FemSpace::FemSpace(const Polygon& polygon, const TriMesh& mesh)
    : polygon_(polygon), mesh_(mesh) {
  build_nodes();
  assemble();
}

void FemSpace::build_nodes() {
  const int nv = static_cast<int>(mesh_.points.size());
  node_points_ = mesh_.points;
  std::map<std::pair<int, int>, int> edge_node;
  auto mid_node = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = edge_node.find(key);
    if (it != edge_node.end()) return it->second;
    int id = static_cast<int>(node_points_.size());
    node_points_.push_back(0.5 * (mesh_.points[a] + mesh_.points[b]));
    edge_node[key] = id;
    return id;
  };
  tri_nodes_.reserve(mesh_.triangles.size());
  for (const auto& t : mesh_.triangles) {
    Eigen::Matrix<int, 6, 1> n;
    n << t(0), t(1), t(2), mid_node(t(0), t(1)), mid_node(t(1), t(2)), mid_node(t(2), t(0));
    tri_nodes_.push_back(n);
  }
  num_nodes_ = static_cast<int>(node_points_.size());
  (void)nv;

  std::vector<char> seen(num_nodes_, 0);
  auto param_on_edge = [&](const Vec2& x, int e) {
    Vec2 a = polygon_.edge_start(e), b = polygon_.edge_end(e);
    return (x - a).dot(b - a) / (b - a).squaredNorm();
  };
  for (const auto& be : mesh_.boundary_edges) {
    int m = edge_node[std::minmax(be(0), be(1))];
    for (int n : {be(0), be(1), m}) {
      if (seen[n]) continue;
      seen[n] = 1;
      boundary_nodes_.push_back({n, be(2), param_on_edge(node_points_[n], be(2))});
    }
  }
  is_boundary_vdof_.assign(2 * num_nodes_, 0);
  for (const auto& bn : boundary_nodes_) {
    is_boundary_vdof_[2 * bn.node] = 1;
    is_boundary_vdof_[2 * bn.node + 1] = 1;
  }
}

void FemSpace::assemble() {
  const int nu = 2 * num_nodes_;
  const int np = pressure_dim();
  system_dim_ = nu + np + 1;
  std::vector<Eigen::Triplet<double>> trip;
  QuadRule rule = triangle_rule(4);

  for (size_t ti = 0; ti < mesh_.triangles.size(); ++ti) {
    const auto& tn = tri_nodes_[ti];
    Vec2 p0 = node_points_[tn(0)], p1 = node_points_[tn(1)], p2 = node_points_[tn(2)];
    Eigen::Matrix2d J;
    J.col(0) = p1 - p0;
    J.col(1) = p2 - p0;
    double detJ = J.determinant();
    Eigen::Matrix2d JinvT = J.inverse().transpose();

    Eigen::Matrix<double, 6, 6> Ke = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 3, 12> De = Eigen::Matrix<double, 3, 12>::Zero();
    Eigen::Vector3d ce = Eigen::Vector3d::Zero();
    for (int g = 0; g < rule.weights.size(); ++g) {
      Eigen::Matrix<double, 6, 1> N;
      Eigen::Matrix<double, 6, 2> dN;
      p2_shapes(rule.points(g, 0), rule.points(g, 1), N, dN);
      Eigen::Matrix<double, 6, 2> gradN = dN * JinvT.transpose();
      Eigen::Vector3d Np;
      p1_shapes(rule.points(g, 0), rule.points(g, 1), Np);
      double w = rule.weights(g) * detJ;
      Ke += w * gradN * gradN.transpose();
      for (int k = 0; k < 3; ++k) {
        for (int j = 0; j < 6; ++j) {
          De(k, 2 * j) += w * Np(k) * gradN(j, 0);
          De(k, 2 * j + 1) += w * Np(k) * gradN(j, 1);
        }
        ce(k) += w * Np(k);
      }
    }
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        for (int c = 0; c < 2; ++c) {
          int gi = 2 * tn(i) + c, gj = 2 * tn(j) + c;
          if (!is_boundary_vdof_[gi]) trip.emplace_back(gi, gj, Ke(i, j));
        }
      }
    }
    const auto& tv = mesh_.triangles[ti];
    for (int k = 0; k < 3; ++k) {
      int gp = nu + tv(k);
      for (int j = 0; j < 6; ++j) {
        for (int c = 0; c < 2; ++c) {
          int gu = 2 * tn(j) + c;
          trip.emplace_back(gp, gu, De(k, 2 * j + c));
          if (!is_boundary_vdof_[gu]) trip.emplace_back(gu, gp, De(k, 2 * j + c));
        }
      }
      trip.emplace_back(gp, nu + np, ce(k));        // multiplier column
      trip.emplace_back(nu + np, gp, ce(k));        // zero-mean pressure row
    }
  }
  for (int d = 0; d < nu; ++d)
    if (is_boundary_vdof_[d]) trip.emplace_back(d, d, 1.0);

  system_.resize(system_dim_, system_dim_);
  system_.setFromTriplets(trip.begin(), trip.end());
  system_.makeCompressed();
  lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
  lu_->compute(system_);
  if (lu_->info() != Eigen::Success) throw SolverFailure("saddle system factorization failed");
}

double FemSpace::trace_flux(const std::vector<Eigen::Vector2d>& trace) const {
  if (trace.size() != boundary_nodes_.size())
    throw InvalidArgument("trace_flux: trace size mismatch");
  std::vector<Eigen::Vector2d> node_trace(num_nodes_, Eigen::Vector2d::Zero());
  for (size_t i = 0; i < boundary_nodes_.size(); ++i)
    node_trace[boundary_nodes_[i].node] = trace[i];
  // midpoint node ids were appended after mesh vertices in build order; find
  // them through tri_nodes_ adjacency instead of rebuilding the map.
  std::map<std::pair<int, int>, int> edge_node;
  for (size_t ti = 0; ti < mesh_.triangles.size(); ++ti) {
    const auto& tv = mesh_.triangles[ti];
    const auto& tn = tri_nodes_[ti];
    edge_node[std::minmax(tv(0), tv(1))] = tn(3);
    edge_node[std::minmax(tv(1), tv(2))] = tn(4);
    edge_node[std::minmax(tv(2), tv(0))] = tn(5);
  }
  double flux = 0.0;
  for (const auto& be : mesh_.boundary_edges) {
    Vec2 a = mesh_.points[be(0)], b = mesh_.points[be(1)];
    Vec2 tang = b - a;
    Vec2 n(tang.y(), -tang.x());  // outward * |edge|
    int m = edge_node[std::minmax(be(0), be(1))];
    Eigen::Vector2d ua = node_trace[be(0)], um = node_trace[m], ub = node_trace[be(1)];
    flux += n.dot((ua + 4.0 * um + ub) / 6.0);
  }
  return flux;
}

FemField FemSpace::solve_stokes(const Field2& f, int f_degree, const Field1& g, int g_degree,
                                const std::vector<Eigen::Vector2d>& trace) const {
  if (trace.size() != boundary_nodes_.size())
    throw InvalidArgument("solve_stokes: trace size mismatch");
  const int nu = 2 * num_nodes_;
  const int np = pressure_dim();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(system_dim_);

  // Compatibility: int_K g must match the boundary flux of the trace.
  double gint = 0.0;
  if (g) {
    QuadRule rg = triangle_rule(g_degree);
    for (size_t ti = 0; ti < mesh_.triangles.size(); ++ti) {
      const auto& tn = tri_nodes_[ti];
      Vec2 p0 = node_points_[tn(0)], p1 = node_points_[tn(1)], p2 = node_points_[tn(2)];
      double detJ = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
      for (int q = 0; q < rg.weights.size(); ++q) {
        Vec2 x = p0 + rg.points(q, 0) * (p1 - p0) + rg.points(q, 1) * (p2 - p0);
        gint += rg.weights(q) * detJ * g(x);
      }
    }
  }
  // Boundary flux of the quadratic trace, edge-exact Simpson on each tri-edge.
  double flux = trace_flux(trace);
  double scale = std::max({std::abs(gint), std::abs(flux), 1e-30});
  if (std::abs(gint - flux) > 1e-8 * std::max(scale, polygon_.area()))
    throw CompatibilityError("divergence datum incompatible with boundary flux");

  // Volume force term.
  if (f) {
    QuadRule rf = triangle_rule(f_degree + 2);
    for (size_t ti = 0; ti < mesh_.triangles.size(); ++ti) {
      const auto& tn = tri_nodes_[ti];
      Vec2 p0 = node_points_[tn(0)], p1 = node_points_[tn(1)], p2 = node_points_[tn(2)];
      double detJ = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
      for (int q = 0; q < rf.weights.size(); ++q) {
        Eigen::Matrix<double, 6, 1> N;
        Eigen::Matrix<double, 6, 2> dN;
        p2_shapes(rf.points(q, 0), rf.points(q, 1), N, dN);
        Vec2 x = p0 + rf.points(q, 0) * (p1 - p0) + rf.points(q, 1) * (p2 - p0);
        Eigen::Vector2d fx = f(x);
        double w = rf.weights(q) * detJ;
        for (int j = 0; j < 6; ++j) {
          for (int c = 0; c < 2; ++c) {
            int gd = 2 * tn(j) + c;
            if (!is_boundary_vdof_[gd]) rhs(gd) += w * N(j) * fx(c);
          }
        }
      }
    }
  }
  // Divergence datum.
  if (g) {
    QuadRule rg = triangle_rule(g_degree + 1);
    for (size_t ti = 0; ti < mesh_.triangles.size(); ++ti) {
      const auto& tv = mesh_.triangles[ti];
      Vec2 p0 = mesh_.points[tv(0)], p1 = mesh_.points[tv(1)], p2 = mesh_.points[tv(2)];
      double detJ = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
      for (int q = 0; q < rg.weights.size(); ++q) {
        Eigen::Vector3d Np;
        p1_shapes(rg.points(q, 0), rg.points(q, 1), Np);
        Vec2 x = p0 + rg.points(q, 0) * (p1 - p0) + rg.points(q, 1) * (p2 - p0);
        double w = rg.weights(q) * detJ * g(x);
        for (int k = 0; k < 3; ++k) rhs(nu + tv(k)) += w * Np(k);
      }
    }
  }
  // Dirichlet rows.
  for (size_t i = 0; i < boundary_nodes_.size(); ++i) {
    rhs(2 * boundary_nodes_[i].node) = trace[i].x();
    rhs(2 * boundary_nodes_[i].node + 1) = trace[i].y();
  }

  Eigen::VectorXd sol = lu_->solve(rhs);
  if (lu_->info() != Eigen::Success) throw SolverFailure("saddle system solve failed");

  FemField field(*this, sol.head(nu), sol.segment(nu, np), sol(nu + np));
  double denom = rhs.norm() + system_.norm() * sol.norm();
  field.residual_ = (system_ * sol - rhs).norm() / std::max(denom, 1e-30);
  return field;
}

std::vector<Eigen::Vector2d> FemSpace::dirichlet_trace_from_edge_polys(
    const std::vector<std::function<Eigen::Vector2d(double)>>& edge_polys) const {
  if (static_cast<int>(edge_polys.size()) != polygon_.num_edges())
    throw InvalidArgument("one edge polynomial per polygon edge required");
  // Vertex continuity between consecutive edges.
  for (int e = 0; e < polygon_.num_edges(); ++e) {
    int next = (e + 1) % polygon_.num_edges();
    Eigen::Vector2d a = edge_polys[e](1.0), b = edge_polys[next](0.0);
    if ((a - b).norm() > 1e-12 * (1.0 + a.norm()))
      throw ContinuityError("edge polynomials disagree at a shared vertex");
  }
  std::vector<Eigen::Vector2d> trace(boundary_nodes_.size());
  for (size_t i = 0; i < boundary_nodes_.size(); ++i)
    trace[i] = edge_polys[boundary_nodes_[i].parent_edge](boundary_nodes_[i].t);
  return trace;
}

double FemSpace::h1_semi_inner(const FemField& u, const FemField& v) const {
  if (&u.space() != this || &v.space() != this) throw InvalidArgument("space mismatch");
  QuadRule rule = triangle_rule(2);
  double s = 0.0;
  for (size_t ti = 0; ti < mesh_.triangles.size(); ++ti) {
    const auto& tn = tri_nodes_[ti];
    Vec2 p0 = node_points_[tn(0)], p1 = node_points_[tn(1)], p2 = node_points_[tn(2)];
    Eigen::Matrix2d J;
    J.col(0) = p1 - p0;
    J.col(1) = p2 - p0;
    double detJ = J.determinant();
    Eigen::Matrix2d Jinv = J.inverse();
    for (int g = 0; g < rule.weights.size(); ++g) {
      Eigen::Matrix<double, 6, 1> N;
      Eigen::Matrix<double, 6, 2> dN;
      p2_shapes(rule.points(g, 0), rule.points(g, 1), N, dN);
      Eigen::Matrix<double, 6, 2> gradN = dN * Jinv;
      Eigen::Matrix2d Gu = Eigen::Matrix2d::Zero(), Gv = Eigen::Matrix2d::Zero();
      for (int j = 0; j < 6; ++j) {
        for (int c = 0; c < 2; ++c) {
          Gu.row(c) += u.velocity()(2 * tn(j) + c) * gradN.row(j);
          Gv.row(c) += v.velocity()(2 * tn(j) + c) * gradN.row(j);
        }
      }
      s += rule.weights(g) * detJ * (Gu.array() * Gv.array()).sum();
    }
  }
  return s;
}

double FemSpace::l2_inner(const FemField& u, const FemField& v) const {
  if (&u.space() != this || &v.space() != this) throw InvalidArgument("space mismatch");
  QuadRule rule = triangle_rule(4);
  double s = 0.0;
  for (size_t ti = 0; ti < mesh_.triangles.size(); ++ti) {
    const auto& tn = tri_nodes_[ti];
    Vec2 p0 = node_points_[tn(0)], p1 = node_points_[tn(1)], p2 = node_points_[tn(2)];
    double detJ = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
    for (int g = 0; g < rule.weights.size(); ++g) {
      Eigen::Matrix<double, 6, 1> N;
      Eigen::Matrix<double, 6, 2> dN;
      p2_shapes(rule.points(g, 0), rule.points(g, 1), N, dN);
      Eigen::Vector2d uu = Eigen::Vector2d::Zero(), vv = Eigen::Vector2d::Zero();
      for (int j = 0; j < 6; ++j) {
        uu += N(j) * u.velocity_at_node(tn(j));
        vv += N(j) * v.velocity_at_node(tn(j));
      }
      s += rule.weights(g) * detJ * uu.dot(vv);
    }
  }
  return s;
}

double FemSpace::boundary_l2_inner(const FemField& u, const FemField& v,
                                   const std::vector<int>& edge_subset) const {
  if (&u.space() != this || &v.space() != this) throw InvalidArgument("space mismatch");
  std::vector<char> want(polygon_.num_edges(), edge_subset.empty() ? 1 : 0);
  for (int e : edge_subset) want[e] = 1;
  // Rebuild the midpoint lookup once per call; boundary edge count is small.
  std::map<std::pair<int, int>, int> edge_node;
  for (size_t ti = 0; ti < mesh_.triangles.size(); ++ti) {
    const auto& tv = mesh_.triangles[ti];
    const auto& tn = tri_nodes_[ti];
    edge_node[std::minmax(tv(0), tv(1))] = tn(3);
    edge_node[std::minmax(tv(1), tv(2))] = tn(4);
    edge_node[std::minmax(tv(2), tv(0))] = tn(5);
  }
  QuadRule g1 = edge_gauss_legendre(3);
  double s = 0.0;
  for (const auto& be : mesh_.boundary_edges) {
    if (!want[be(2)]) continue;
    int m = edge_node[std::minmax(be(0), be(1))];
    double half = 0.5 * (mesh_.points[be(0)] - mesh_.points[be(1)]).norm();
    for (int g = 0; g < g1.weights.size(); ++g) {
      double tau = 0.5 * (g1.points(g, 0) + 1.0);
      double L0 = (1 - tau) * (1 - 2 * tau), Lm = 4 * tau * (1 - tau), L1 = tau * (2 * tau - 1);
      Eigen::Vector2d uu = L0 * u.velocity_at_node(be(0)) + Lm * u.velocity_at_node(m) +
                           L1 * u.velocity_at_node(be(1));
      Eigen::Vector2d vv = L0 * v.velocity_at_node(be(0)) + Lm * v.velocity_at_node(m) +
                           L1 * v.velocity_at_node(be(1));
      s += g1.weights(g) * half * uu.dot(vv);
    }
  }
  return s;
}

double FemSpace::moment(const FemField& u, const Field2& w, int w_degree) const {
  QuadRule rule = triangle_rule(w_degree + 2);
  double s = 0.0;
  for (size_t ti = 0; ti < mesh_.triangles.size(); ++ti) {
    const auto& tn = tri_nodes_[ti];
    Vec2 p0 = node_points_[tn(0)], p1 = node_points_[tn(1)], p2 = node_points_[tn(2)];
    double detJ = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
    for (int g = 0; g < rule.weights.size(); ++g) {
      Eigen::Matrix<double, 6, 1> N;
      Eigen::Matrix<double, 6, 2> dN;
      p2_shapes(rule.points(g, 0), rule.points(g, 1), N, dN);
      Vec2 x = p0 + rule.points(g, 0) * (p1 - p0) + rule.points(g, 1) * (p2 - p0);
      Eigen::Vector2d uu = Eigen::Vector2d::Zero();
      for (int j = 0; j < 6; ++j) uu += N(j) * u.velocity_at_node(tn(j));
      s += rule.weights(g) * detJ * uu.dot(w(x));
    }
  }
  return s;
}

double FemSpace::div_moment(const FemField& u, const Field1& m, int m_degree) const {
  QuadRule rule = triangle_rule(m_degree + 1);
  double s = 0.0;
  for (size_t ti = 0; ti < mesh_.triangles.size(); ++ti) {
    const auto& tn = tri_nodes_[ti];
    Vec2 p0 = node_points_[tn(0)], p1 = node_points_[tn(1)], p2 = node_points_[tn(2)];
    Eigen::Matrix2d J;
    J.col(0) = p1 - p0;
    J.col(1) = p2 - p0;
    double detJ = J.determinant();
    Eigen::Matrix2d Jinv = J.inverse();
    for (int g = 0; g < rule.weights.size(); ++g) {
      Eigen::Matrix<double, 6, 1> N;
      Eigen::Matrix<double, 6, 2> dN;
      p2_shapes(rule.points(g, 0), rule.points(g, 1), N, dN);
      Eigen::Matrix<double, 6, 2> gradN = dN * Jinv;
      double div = 0.0;
      for (int j = 0; j < 6; ++j) {
        div += u.velocity()(2 * tn(j)) * gradN(j, 0);
        div += u.velocity()(2 * tn(j) + 1) * gradN(j, 1);
      }
      Vec2 x = p0 + rule.points(g, 0) * (p1 - p0) + rule.points(g, 1) * (p2 - p0);
      s += rule.weights(g) * detJ * div * m(x);
    }
  }
  return s;
}

FemField FemSpace::interpolate_velocity(const Field2& u) const {
  Eigen::VectorXd vel(2 * num_nodes_);
  for (int n = 0; n < num_nodes_; ++n) {
    Eigen::Vector2d v = u(node_points_[n]);
    vel(2 * n) = v.x();
    vel(2 * n + 1) = v.y();
  }
  return FemField(*this, std::move(vel), Eigen::VectorXd::Zero(pressure_dim()), 0.0);
}

double FemSpace::h1_semi_error(const FemField& uh, const Field2& grad_u_row0,
                               const Field2& grad_u_row1) const {
  QuadRule rule = triangle_rule(10);
  double s = 0.0;
  for (size_t ti = 0; ti < mesh_.triangles.size(); ++ti) {
    const auto& tn = tri_nodes_[ti];
    Vec2 p0 = node_points_[tn(0)], p1 = node_points_[tn(1)], p2 = node_points_[tn(2)];
    Eigen::Matrix2d J;
    J.col(0) = p1 - p0;
    J.col(1) = p2 - p0;
    double detJ = J.determinant();
    Eigen::Matrix2d Jinv = J.inverse();
    for (int g = 0; g < rule.weights.size(); ++g) {
      Eigen::Matrix<double, 6, 1> N;
      Eigen::Matrix<double, 6, 2> dN;
      p2_shapes(rule.points(g, 0), rule.points(g, 1), N, dN);
      Eigen::Matrix<double, 6, 2> gradN = dN * Jinv;
      Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
      for (int j = 0; j < 6; ++j)
        for (int c = 0; c < 2; ++c) G.row(c) += uh.velocity()(2 * tn(j) + c) * gradN.row(j);
      Vec2 x = p0 + rule.points(g, 0) * (p1 - p0) + rule.points(g, 1) * (p2 - p0);
      G.row(0) -= grad_u_row0(x).transpose();
      G.row(1) -= grad_u_row1(x).transpose();
      s += rule.weights(g) * detJ * G.squaredNorm();
    }
  }
  return std::sqrt(s);
}

double FemSpace::l2_error(const FemField& uh, const Field2& u) const {
  QuadRule rule = triangle_rule(10);
  double s = 0.0;
  for (size_t ti = 0; ti < mesh_.triangles.size(); ++ti) {
    const auto& tn = tri_nodes_[ti];
    Vec2 p0 = node_points_[tn(0)], p1 = node_points_[tn(1)], p2 = node_points_[tn(2)];
    double detJ = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
    for (int g = 0; g < rule.weights.size(); ++g) {
      Eigen::Matrix<double, 6, 1> N;
      Eigen::Matrix<double, 6, 2> dN;
      p2_shapes(rule.points(g, 0), rule.points(g, 1), N, dN);
      Eigen::Vector2d uu = Eigen::Vector2d::Zero();
      for (int j = 0; j < 6; ++j) uu += N(j) * uh.velocity_at_node(tn(j));
      Vec2 x = p0 + rule.points(g, 0) * (p1 - p0) + rule.points(g, 1) * (p2 - p0);
      s += rule.weights(g) * detJ * (uu - u(x)).squaredNorm();
    }
  }
  return std::sqrt(s);
}

FemField FemField::combine(double a, const FemField& u, double b, const FemField& v) {
  if (&u.space() != &v.space()) throw InvalidArgument("combine: space mismatch");
  return FemField(u.space(), a * u.velocity_ + b * v.velocity_,
                  a * u.pressure_ + b * v.pressure_, a * u.multiplier_ + b * v.multiplier_);
}

}  // namespace vem
