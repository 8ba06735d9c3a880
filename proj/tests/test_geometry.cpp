#include <doctest.h>

#include <cmath>

#include "vem/errors.hpp"
#include "vem/geometry.hpp"

using namespace vem;

TEST_CASE("unit square derived quantities") {
  Polygon sq = build_polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(sq.area() == doctest::Approx(1.0));
  CHECK(sq.diameter() == doctest::Approx(std::sqrt(2.0)));
  CHECK(sq.centroid().x() == doctest::Approx(0.5));
  CHECK(sq.centroid().y() == doctest::Approx(0.5));
}

TEST_CASE("pentagon by shoelace") {
  // Hand shoelace: 2A = 0 + 4 + 0 + 2 + 0 = 6, h = dist((2,0),(0,2)) = 2*sqrt(2).
  Polygon p = build_polygon({{0, 0}, {2, 0}, {2, 2}, {1, 1}, {0, 2}});
  CHECK(p.area() == doctest::Approx(3.0));
  CHECK(p.diameter() == doctest::Approx(2.0 * std::sqrt(2.0)));
}

TEST_CASE("clockwise input reoriented") {
  Polygon sq = build_polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  CHECK(sq.area() == doctest::Approx(1.0));
  // CCW orientation: signed area of the stored loop is positive.
  double tw = 0;
  int n = sq.num_vertices();
  for (int i = 0; i < n; ++i) {
    auto a = sq.vertices()[i], b = sq.vertices()[(i + 1) % n];
    tw += a.x() * b.y() - a.y() * b.x();
  }
  CHECK(tw > 0);
}

TEST_CASE("invalid polygons rejected") {
  CHECK_THROWS_AS(build_polygon({{0, 0}, {1, 1}}), InvalidGeometry);
  CHECK_THROWS_AS(build_polygon({{0, 0}, {1, 0}, {2, 0}}), InvalidGeometry);  // zero area
  // Bow tie.
  CHECK_THROWS_AS(build_polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), InvalidGeometry);
}

TEST_CASE("element sequences match the published coordinates") {
  Polygon h1 = element_sequence(ElementFamily::hanging_node, 1);
  CHECK(h1.num_vertices() == 5);
  CHECK(h1.vertices()[3].x() == doctest::Approx(1.0));
  CHECK(h1.vertices()[3].y() == doctest::Approx(2.0));

  Polygon h3 = element_sequence(ElementFamily::hanging_node, 3);
  CHECK(h3.vertices()[3].y() == doctest::Approx(0.5));

  Polygon f2 = element_sequence(ElementFamily::flatten, 2);
  CHECK(f2.vertices()[3].x() == doctest::Approx(0.0));
  CHECK(f2.vertices()[3].y() == doctest::Approx(1.0));
  CHECK(f2.vertices()[2].y() == doctest::Approx(0.5));
  CHECK(f2.vertices()[4].y() == doctest::Approx(0.5));

  CHECK_THROWS_AS(element_sequence(ElementFamily::flatten, 0), InvalidArgument);
  CHECK_THROWS_AS(element_sequence(ElementFamily::flatten, 6), InvalidArgument);
}

TEST_CASE("element sequences are reproducible") {
  for (int i = 1; i <= 5; ++i) {
    Polygon a = element_sequence(ElementFamily::flatten, i);
    Polygon b = element_sequence(ElementFamily::flatten, i);
    for (int v = 0; v < a.num_vertices(); ++v) {
      CHECK(a.vertices()[v].x() == b.vertices()[v].x());
      CHECK(a.vertices()[v].y() == b.vertices()[v].y());
    }
  }
}

TEST_CASE("subtriangulation counts and partition") {
  Polygon sq = build_polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  TriMesh m0 = subtriangulate(sq, 0);
  CHECK(m0.triangles.size() == 4);  // centroid fan
  TriMesh m2 = subtriangulate(sq, 2);
  CHECK(m2.triangles.size() == 64);
  CHECK(m2.total_area() == doctest::Approx(sq.area()).epsilon(1e-12));

  Polygon h1 = element_sequence(ElementFamily::hanging_node, 1);
  TriMesh mh = subtriangulate(h1, 0);
  CHECK(mh.triangles.size() == 3);  // ear clipping around the collinear node
  CHECK(mh.total_area() == doctest::Approx(h1.area()).epsilon(1e-12));

  for (int idx = 1; idx <= 5; ++idx) {
    Polygon k = element_sequence(ElementFamily::hanging_node, idx);
    for (int lvl = 0; lvl <= 3; ++lvl) {
      TriMesh m = subtriangulate(k, lvl);
      CHECK(m.total_area() == doctest::Approx(k.area()).epsilon(1e-12));
    }
  }
}

TEST_CASE("boundary markers cover the polygon boundary") {
  Polygon h2 = element_sequence(ElementFamily::hanging_node, 2);
  TriMesh m = subtriangulate(h2, 2);
  double blen = 0;
  for (const auto& be : m.boundary_edges) blen += (m.points[be(0)] - m.points[be(1)]).norm();
  double plen = 0;
  for (int e = 0; e < h2.num_edges(); ++e) plen += h2.edge_length(e);
  CHECK(blen == doctest::Approx(plen).epsilon(1e-12));
}

TEST_CASE("rho_star of the unit square") {
  // Kernel of a convex polygon is the polygon; largest inscribed disk of the
  // unit square has diameter 1, h_K = sqrt(2).
  Polygon sq = build_polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  RegularityReport rep = regularity_report(sq);
  CHECK(rep.rho_star == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK(rep.min_edge_ratio == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("kernel shrinks as the hanging node descends") {
  double r2 = regularity_report(element_sequence(ElementFamily::hanging_node, 2)).rho_star;
  double r5 = regularity_report(element_sequence(ElementFamily::hanging_node, 5)).rho_star;
  CHECK(r5 < r2);
  CHECK(r5 > 0.0);
  // Half-plane oracle: monotone decrease across the whole sequence.
  double prev = regularity_report(element_sequence(ElementFamily::hanging_node, 1)).rho_star;
  for (int i = 2; i <= 5; ++i) {
    double r = regularity_report(element_sequence(ElementFamily::hanging_node, i)).rho_star;
    CHECK(r < prev + 1e-12);
    prev = r;
  }
}

TEST_CASE("similarity invariance of the regularity diagnostics") {
  std::vector<Vec2> hex;
  for (int k = 0; k < 6; ++k)
    hex.push_back({std::cos(M_PI * k / 3.0), std::sin(M_PI * k / 3.0)});
  Polygon base = build_polygon(hex);
  RegularityReport r0 = regularity_report(base);

  double th = 0.7, s = 3.25;
  Eigen::Matrix2d R;
  R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  std::vector<Vec2> moved;
  for (const auto& v : hex) moved.push_back(s * (R * v) + Vec2(4.5, -2.0));
  RegularityReport r1 = regularity_report(build_polygon(moved));

  CHECK(std::abs(r0.rho_star - r1.rho_star) < 1e-12);
  CHECK(std::abs(r0.min_edge_ratio - r1.min_edge_ratio) < 1e-12);
}

TEST_CASE("polygon json round trip") {
  Polygon p = element_sequence(ElementFamily::flatten, 3);
  Polygon q = polygon_from_json(polygon_to_json(p));
  REQUIRE(q.num_vertices() == p.num_vertices());
  for (int i = 0; i < p.num_vertices(); ++i)
    CHECK((p.vertices()[i] - q.vertices()[i]).norm() == doctest::Approx(0.0));
  CHECK(trimesh_to_json(subtriangulate(p, 1)).find("triangles") != std::string::npos);
}
