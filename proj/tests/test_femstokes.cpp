#include <doctest.h>

#include <cmath>

#include "vem/errors.hpp"
#include "vem/femstokes.hpp"
#include "vem/geometry.hpp"
#include "vem/polynomials.hpp"

using namespace vem;

namespace {

Polygon unit_square() { return build_polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

}  // namespace

TEST_CASE("constant trace with zero data reproduces the constant field") {
  Polygon poly = unit_square();
  TriMesh mesh = subtriangulate(poly, 2);
  FemSpace space(poly, mesh);
  std::vector<Eigen::Vector2d> trace(space.boundary_nodes().size(),
                                     Eigen::Vector2d(3.0, -2.0));
  FemField u = space.solve_stokes(nullptr, 0, nullptr, 0, trace);
  for (int n = 0; n < space.num_p2_nodes(); ++n) {
    CHECK(u.velocity_at_node(n).x() == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(u.velocity_at_node(n).y() == doctest::Approx(-2.0).epsilon(1e-10));
  }
  CHECK(space.h1_semi_inner(u, u) == doctest::Approx(0.0).epsilon(1e-18));
  CHECK(space.l2_inner(u, u) == doctest::Approx(13.0).epsilon(1e-10));
}

TEST_CASE("linear trace reproduces the linear field exactly") {
  // u = (x + 2y, 3x - y) is divergence-free with -lap u = 0, s = 0.
  Polygon poly = build_polygon({{0, 0}, {2, 0}, {2, 2}, {1, 2}, {0, 1}});
  TriMesh mesh = subtriangulate(poly, 1);
  FemSpace space(poly, mesh);
  auto field = [](const Vec2& q) {
    return Eigen::Vector2d(q.x() + 2 * q.y(), 3 * q.x() - q.y());
  };
  std::vector<Eigen::Vector2d> trace;
  for (const auto& bn : space.boundary_nodes()) trace.push_back(field(space.node_point(bn.node)));
  FemField u = space.solve_stokes(nullptr, 0, nullptr, 0, trace);
  for (int n = 0; n < space.num_p2_nodes(); ++n) {
    Eigen::Vector2d want = field(space.node_point(n));
    CHECK(u.velocity_at_node(n).x() == doctest::Approx(want.x()).epsilon(1e-9));
    CHECK(u.velocity_at_node(n).y() == doctest::Approx(want.y()).epsilon(1e-9));
  }
  // H1 seminorm of the linear field: |grad|^2 = 1+4+9+1 = 15 per unit area.
  CHECK(space.h1_semi_inner(u, u) == doctest::Approx(15.0 * poly.area()).epsilon(1e-9));
}

TEST_CASE("incompatible divergence datum is rejected") {
  Polygon poly = unit_square();
  TriMesh mesh = subtriangulate(poly, 1);
  FemSpace space(poly, mesh);
  std::vector<Eigen::Vector2d> trace(space.boundary_nodes().size(), Eigen::Vector2d::Zero());
  Field1 g = [](const Vec2&) { return 1.0; };  // int g = 1 but boundary flux = 0
  CHECK_THROWS_AS(space.solve_stokes(nullptr, 0, g, 0, trace), CompatibilityError);
}

TEST_CASE("prescribed divergence is attained in moments") {
  Polygon poly = unit_square();
  TriMesh mesh = subtriangulate(poly, 3);
  FemSpace space(poly, mesh);
  std::vector<Eigen::Vector2d> trace(space.boundary_nodes().size(), Eigen::Vector2d::Zero());
  // zero-mean divergence datum
  Field1 g = [&poly](const Vec2& q) { return q.x() - 0.5; };
  FemField u = space.solve_stokes(nullptr, 0, g, 1, trace);
  Field1 w = [](const Vec2& q) { return q.x(); };
  double got = space.div_moment(u, w, 1);
  // int (x - 1/2) x over the unit square = 1/3 - 1/4
  CHECK(got == doctest::Approx(1.0 / 12).epsilon(2e-4));
}

TEST_CASE("moment of an interpolated quadratic matches exact polygon integration") {
  Polygon poly = build_polygon({{0, 0}, {2, 0}, {2, 2}, {1, 2}, {0, 1}});
  TriMesh mesh = subtriangulate(poly, 2);
  FemSpace space(poly, mesh);
  // quadratic is exactly representable in P2
  Field2 q2 = [](const Vec2& q) {
    return Eigen::Vector2d(q.x() * q.x(), q.x() * q.y());
  };
  FemField u = space.interpolate_velocity(q2);
  Field2 w = [](const Vec2& q) { return Eigen::Vector2d(1.0, q.y()); };
  double got = space.moment(u, w, 2);
  // both levels integrate the P2 x P2 integrand exactly, so they must agree
  TriMesh fine = subtriangulate(poly, 4);
  FemSpace fine_space(poly, fine);
  double want = fine_space.moment(fine_space.interpolate_velocity(q2), w, 2);
  CHECK(got == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("manufactured Stokes solution converges at the Taylor-Hood rates") {
  auto X = [](double x) { return x * x * (1 - x) * (1 - x); };
  auto X1 = [](double x) { return 2 * x - 6 * x * x + 4 * x * x * x; };
  auto X2 = [](double x) { return 2 - 12 * x + 12 * x * x; };
  auto X3 = [](double x) { return -12 + 24 * x; };
  Field2 u = [&](const Vec2& q) {
    return Eigen::Vector2d(X(q.x()) * X1(q.y()), -X1(q.x()) * X(q.y()));
  };
  Field2 g0 = [&](const Vec2& q) {
    return Eigen::Vector2d(X1(q.x()) * X1(q.y()), X(q.x()) * X2(q.y()));
  };
  Field2 g1 = [&](const Vec2& q) {
    return Eigen::Vector2d(-X2(q.x()) * X(q.y()), -X1(q.x()) * X1(q.y()));
  };
  Field2 f = [&](const Vec2& q) {
    double lap1 = X2(q.x()) * X1(q.y()) + X(q.x()) * X3(q.y());
    double lap2 = -(X3(q.x()) * X(q.y()) + X1(q.x()) * X2(q.y()));
    return Eigen::Vector2d(-lap1 - 1.0, -lap2);
  };
  Polygon poly = unit_square();
  std::vector<double> h1err, l2err;
  for (int level = 1; level <= 3; ++level) {
    TriMesh mesh = subtriangulate(poly, level);
    FemSpace space(poly, mesh);
    std::vector<Eigen::Vector2d> trace(space.boundary_nodes().size(),
                                       Eigen::Vector2d::Zero());
    FemField uh = space.solve_stokes(f, 8, nullptr, 0, trace);
    h1err.push_back(space.h1_semi_error(uh, g0, g1));
    l2err.push_back(space.l2_error(uh, u));
  }
  double rate_h1 = std::log2(h1err[1] / h1err[2]);
  double rate_l2 = std::log2(l2err[1] / l2err[2]);
  CHECK(rate_h1 == doctest::Approx(2.0).epsilon(0.075));
  CHECK(rate_l2 == doctest::Approx(3.0).epsilon(0.07));
}

TEST_CASE("edge-poly trace with a vertex mismatch is rejected") {
  Polygon poly = unit_square();
  TriMesh mesh = subtriangulate(poly, 1);
  FemSpace space(poly, mesh);
  std::vector<std::function<Eigen::Vector2d(double)>> polys(4);
  for (int e = 0; e < 4; ++e)
    polys[e] = [](double) { return Eigen::Vector2d(1.0, 0.0); };
  polys[2] = [](double t) { return Eigen::Vector2d(1.0 + t, 0.0); };  // breaks continuity
  CHECK_THROWS_AS(space.dirichlet_trace_from_edge_polys(polys), ContinuityError);
}

TEST_CASE("linear combination of fields is linear in the data") {
  Polygon poly = unit_square();
  TriMesh mesh = subtriangulate(poly, 1);
  FemSpace space(poly, mesh);
  std::vector<Eigen::Vector2d> t1(space.boundary_nodes().size(), Eigen::Vector2d(1, 0));
  std::vector<Eigen::Vector2d> t2(space.boundary_nodes().size(), Eigen::Vector2d(0, 1));
  FemField a = space.solve_stokes(nullptr, 0, nullptr, 0, t1);
  FemField b = space.solve_stokes(nullptr, 0, nullptr, 0, t2);
  FemField c = FemField::combine(2.0, a, -3.0, b);
  CHECK(c.velocity_at_node(0).x() == doctest::Approx(2.0));
  CHECK(c.velocity_at_node(0).y() == doctest::Approx(-3.0));
}
