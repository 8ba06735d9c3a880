#include "vem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <map>

#include "vem/errors.hpp"

namespace vem {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Proper segment intersection test for non-adjacent edges.
bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    double v = cross2(q - p, r - p);
    double scale = (q - p).norm() * (r - p).norm();
    if (std::abs(v) <= 1e-14 * std::max(scale, 1e-300)) return 0;
    return v > 0 ? 1 : -1;
  };
  int o1 = orient(a, b, c), o2 = orient(a, b, d);
  int o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
  return false;
}

bool point_in_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
  double d1 = cross2(b - a, p - a);
  double d2 = cross2(c - b, p - b);
  double d3 = cross2(a - c, p - c);
  double tol = -1e-12 * ((b - a).norm() + (c - b).norm() + (a - c).norm());
  return d1 >= tol && d2 >= tol && d3 >= tol;
}

bool point_strictly_in_kernel(const Polygon& poly, const Vec2& p) {
  for (int e = 0; e < poly.num_edges(); ++e) {
    Vec2 n = poly.edge_normal(e);
    double d = n.dot(p - poly.edge_start(e));
    if (d >= -1e-12 * poly.diameter()) return false;  // outward side or on the line
  }
  return true;
}

bool strictly_convex(const Polygon& poly) {
  int n = poly.num_vertices();
  for (int i = 0; i < n; ++i) {
    const Vec2& a = poly.vertices()[(i + n - 1) % n];
    const Vec2& b = poly.vertices()[i];
    const Vec2& c = poly.vertices()[(i + 1) % n];
    double cr = cross2(b - a, c - b);
    if (cr <= 1e-12 * (b - a).norm() * (c - b).norm()) return false;
  }
  return true;
}

void red_refine(TriMesh& mesh) {
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    int id = static_cast<int>(mesh.points.size());
    mesh.points.push_back(0.5 * (mesh.points[a] + mesh.points[b]));
    midpoint[key] = id;
    return id;
  };
  std::vector<Eigen::Vector3i> tris;
  tris.reserve(mesh.triangles.size() * 4);
  for (const auto& t : mesh.triangles) {
    int m01 = mid(t(0), t(1)), m12 = mid(t(1), t(2)), m20 = mid(t(2), t(0));
    tris.push_back({t(0), m01, m20});
    tris.push_back({t(1), m12, m01});
    tris.push_back({t(2), m20, m12});
    tris.push_back({m01, m12, m20});
  }
  mesh.triangles = std::move(tris);
  std::vector<Eigen::Vector3i> bedges;
  bedges.reserve(mesh.boundary_edges.size() * 2);
  for (const auto& be : mesh.boundary_edges) {
    int m = mid(be(0), be(1));
    bedges.push_back({be(0), m, be(2)});
    bedges.push_back({m, be(1), be(2)});
  }
  mesh.boundary_edges = std::move(bedges);
  mesh.refine_level += 1;
}

}  // namespace

double TriMesh::total_area() const {
  double a = 0.0;
  for (const auto& t : triangles)
    a += 0.5 * cross2(points[t(1)] - points[t(0)], points[t(2)] - points[t(0)]);
  return a;
}

Polygon build_polygon(std::vector<Vec2> vertices) {
  if (vertices.size() < 3) throw InvalidGeometry("polygon needs at least 3 vertices");
  const int n = static_cast<int>(vertices.size());

  double scale = 0.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, vertices[i].norm());
  for (int i = 0; i < n; ++i) {
    if ((vertices[i] - vertices[(i + 1) % n]).norm() <= 1e-14 * std::max(scale, 1.0))
      throw InvalidGeometry("consecutive vertices coincide");
  }

  double twice_area = 0.0;
  for (int i = 0; i < n; ++i) twice_area += cross2(vertices[i], vertices[(i + 1) % n]);
  if (std::abs(twice_area) <= 1e-14 * std::max(scale * scale, 1e-300))
    throw InvalidGeometry("polygon has zero area");
  if (twice_area < 0) std::reverse(vertices.begin(), vertices.end());

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j],
                             vertices[(j + 1) % n]))
        throw InvalidGeometry("polygon is self-intersecting");
    }
  }

  Polygon p;
  p.vertices_ = std::move(vertices);
  p.area_ = 0.5 * std::abs(twice_area);
  Vec2 c = Vec2::Zero();
  for (int i = 0; i < n; ++i) {
    const Vec2& a = p.vertices_[i];
    const Vec2& b = p.vertices_[(i + 1) % n];
    c += (a + b) * cross2(a, b);
  }
  p.centroid_ = c / (6.0 * p.area_);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      p.diameter_ = std::max(p.diameter_, (p.vertices_[i] - p.vertices_[j]).norm());
  return p;
}

Polygon element_sequence(ElementFamily family, int index) {
  if (index < 1 || index > 5) throw InvalidArgument("element_sequence: index must be in 1..5");
  if (family == ElementFamily::hanging_node) {
    const double y[5] = {2.0, 1.0, 0.5, 0.25, 0.125};
    return build_polygon({{0, 0}, {2, 0}, {2, 2}, {1, y[index - 1]}, {0, 2}});
  }
  const double t[5] = {1.0, 0.5, 0.25, 0.125, 0.0625};
  double ti = t[index - 1];
  return build_polygon({{-0.5, 0}, {0.5, 0}, {1, ti}, {0, 2 * ti}, {-1, ti}});
}

TriMesh subtriangulate(const Polygon& polygon, int refine_level) {
  TriMesh mesh;
  const int n = polygon.num_vertices();
  mesh.points = polygon.vertices();
  for (int e = 0; e < n; ++e) mesh.boundary_edges.push_back({e, (e + 1) % n, e});

  if (strictly_convex(polygon) && point_strictly_in_kernel(polygon, polygon.centroid())) {
    int c = static_cast<int>(mesh.points.size());
    mesh.points.push_back(polygon.centroid());
    for (int e = 0; e < n; ++e) mesh.triangles.push_back({e, (e + 1) % n, c});
  } else {
    // Ear clipping; collinear vertices give zero-area ears that must be kept.
    std::vector<int> ring(n);
    for (int i = 0; i < n; ++i) ring[i] = i;
    int guard = 0;
    while (ring.size() > 3) {
      bool clipped = false;
      int m = static_cast<int>(ring.size());
      for (int i = 0; i < m; ++i) {
        int ia = ring[(i + m - 1) % m], ib = ring[i], ic = ring[(i + 1) % m];
        const Vec2 &a = mesh.points[ia], &b = mesh.points[ib], &c = mesh.points[ic];
        double cr = cross2(b - a, c - b);
        if (cr <= 1e-12 * (b - a).norm() * (c - b).norm()) continue;  // reflex or flat
        bool ear = true;
        for (int j : ring) {
          if (j == ia || j == ib || j == ic) continue;
          if (point_in_triangle(mesh.points[j], a, b, c)) {
            ear = false;
            break;
          }
        }
        if (!ear) continue;
        mesh.triangles.push_back({ia, ib, ic});
        ring.erase(ring.begin() + i);
        clipped = true;
        break;
      }
      if (!clipped || ++guard > 4 * n)
        throw TriangulationFailure("ear clipping failed to make progress");
    }
    mesh.triangles.push_back({ring[0], ring[1], ring[2]});
  }

  for (const auto& t : mesh.triangles) {
    double a2 = cross2(mesh.points[t(1)] - mesh.points[t(0)], mesh.points[t(2)] - mesh.points[t(0)]);
    if (a2 <= 1e-14 * polygon.diameter() * polygon.diameter())
      throw TriangulationFailure("degenerate triangle produced");
  }

  for (int l = 0; l < refine_level; ++l) red_refine(mesh);
  return mesh;
}

std::vector<Vec2> polygon_kernel(const Polygon& polygon) {
  // Clip a generous bounding box by every inward edge half-plane.
  double h = polygon.diameter();
  Vec2 c = polygon.centroid();
  std::vector<Vec2> ker = {c + Vec2(-2 * h, -2 * h), c + Vec2(2 * h, -2 * h),
                           c + Vec2(2 * h, 2 * h), c + Vec2(-2 * h, 2 * h)};
  for (int e = 0; e < polygon.num_edges(); ++e) {
    Vec2 nrm = polygon.edge_normal(e);
    Vec2 p0 = polygon.edge_start(e);
    std::vector<Vec2> out;
    int m = static_cast<int>(ker.size());
    for (int i = 0; i < m; ++i) {
      const Vec2& a = ker[i];
      const Vec2& b = ker[(i + 1) % m];
      double da = nrm.dot(a - p0), db = nrm.dot(b - p0);
      if (da <= 0) out.push_back(a);
      if ((da < 0 && db > 0) || (da > 0 && db < 0))
        out.push_back(a + (da / (da - db)) * (b - a));
    }
    ker = std::move(out);
    if (ker.size() < 3) return {};
  }
  // Drop near-coincident consecutive vertices produced by clipping.
  std::vector<Vec2> clean;
  for (const auto& v : ker) {
    if (clean.empty() || (v - clean.back()).norm() > 1e-12 * h) clean.push_back(v);
  }
  while (clean.size() > 1 && (clean.front() - clean.back()).norm() <= 1e-12 * h) clean.pop_back();
  if (clean.size() < 3) return {};
  return clean;
}

RegularityReport regularity_report(const Polygon& polygon) {
  RegularityReport rep;
  double h = polygon.diameter();
  double min_e = std::numeric_limits<double>::max();
  for (int e = 0; e < polygon.num_edges(); ++e) min_e = std::min(min_e, polygon.edge_length(e));
  rep.min_edge_ratio = min_e / h;

  std::vector<Vec2> ker = polygon_kernel(polygon);
  if (ker.size() < 3) {
    rep.rho_star = 0.0;
    return rep;
  }
  // Chebyshev disk of the kernel: maximize r with n_i.(c - p_i) + r <= 0 over
  // the kernel's edges; the optimum is determined by 2 or 3 active edges, so
  // enumerate the small candidate set.
  int m = static_cast<int>(ker.size());
  std::vector<Vec2> nrm(m), pt(m);
  for (int i = 0; i < m; ++i) {
    Vec2 t = (ker[(i + 1) % m] - ker[i]).normalized();
    nrm[i] = Vec2(t.y(), -t.x());  // outward of the CCW kernel
    pt[i] = ker[i];
  }
  auto feasible = [&](const Vec2& c, double r) {
    for (int i = 0; i < m; ++i)
      if (nrm[i].dot(c - pt[i]) + r > 1e-10 * h) return false;
    return true;
  };
  double best = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      for (int k = j + 1; k < m; ++k) {
        Eigen::Matrix3d M;
        Eigen::Vector3d rhs;
        M << nrm[i].x(), nrm[i].y(), 1.0, nrm[j].x(), nrm[j].y(), 1.0, nrm[k].x(), nrm[k].y(), 1.0;
        rhs << nrm[i].dot(pt[i]), nrm[j].dot(pt[j]), nrm[k].dot(pt[k]);
        Eigen::FullPivLU<Eigen::Matrix3d> lu(M);
        if (!lu.isInvertible()) continue;
        Eigen::Vector3d sol = lu.solve(rhs);
        Vec2 c(sol(0), sol(1));
        double r = sol(2);
        if (r > 0 && feasible(c, r)) best = std::max(best, r);
      }
    }
  }
  rep.rho_star = 2.0 * best / h;
  return rep;
}

Polygon polygon_from_json(const std::string& json_text) {
  auto j = nlohmann::json::parse(json_text);
  std::vector<Vec2> verts;
  for (const auto& v : j.at("vertices")) verts.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
  return build_polygon(std::move(verts));
}

std::string polygon_to_json(const Polygon& polygon) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : polygon.vertices()) j["vertices"].push_back({v.x(), v.y()});
  return j.dump();
}

std::string trimesh_to_json(const TriMesh& mesh) {
  nlohmann::json j;
  j["points"] = nlohmann::json::array();
  for (const auto& p : mesh.points) j["points"].push_back({p.x(), p.y()});
  j["triangles"] = nlohmann::json::array();
  for (const auto& t : mesh.triangles) j["triangles"].push_back({t(0), t(1), t(2)});
  j["refine_level"] = mesh.refine_level;
  return j.dump();
}

}  // namespace vem
