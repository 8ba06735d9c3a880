#include <doctest.h>

#include <cmath>

#include "vem/quadrature.hpp"

using namespace vem;

namespace {

// Symbolic reference: int_{-1}^{1} x^k dx.
double edge_monomial_exact(int k) { return (k % 2 == 1) ? 0.0 : 2.0 / (k + 1); }

// Symbolic reference: int_T x^a y^b over the unit triangle = a! b! / (a+b+2)!.
double tri_monomial_exact(int a, int b) {
  double r = 1.0;
  for (int i = 1; i <= a; ++i) r *= i;
  for (int i = 1; i <= b; ++i) r *= i;
  for (int i = 1; i <= a + b + 2; ++i) r /= i;
  return r;
}

}  // namespace

TEST_CASE("gauss-legendre exactness") {
  for (int n = 1; n <= 12; ++n) {
    QuadRule r = edge_gauss_legendre(n);
    CHECK(r.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
    for (int k = 0; k <= r.exactness; ++k) {
      double s = 0;
      for (int g = 0; g < r.weights.size(); ++g) s += r.weights(g) * std::pow(r.points(g, 0), k);
      CHECK(s == doctest::Approx(edge_monomial_exact(k)).epsilon(1e-13));
    }
  }
}

TEST_CASE("gauss-lobatto nodes") {
  Eigen::VectorXd n2 = gauss_lobatto_nodes(2);
  CHECK(n2(0) == doctest::Approx(-1.0));
  CHECK(n2(1) == doctest::Approx(0.0));
  CHECK(n2(2) == doctest::Approx(1.0));

  // p=3 interior nodes at the roots of P_3': +-1/sqrt(5).
  Eigen::VectorXd n3 = gauss_lobatto_nodes(3);
  CHECK(n3(1) == doctest::Approx(-1.0 / std::sqrt(5.0)).epsilon(1e-13));
  CHECK(n3(2) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-13));

  for (int p = 1; p <= 9; ++p) {
    Eigen::VectorXd w = gauss_lobatto_weights(p);
    CHECK(w.sum() == doctest::Approx(2.0).epsilon(1e-13));
    Eigen::VectorXd x = gauss_lobatto_nodes(p);
    for (int i = 0; i < p; ++i) CHECK(x(i) < x(i + 1));  // sorted, distinct
  }
}

TEST_CASE("triangle rule exactness") {
  for (int d = 0; d <= 20; d += 2) {
    QuadRule r = triangle_rule(d);
    for (int a = 0; a + 0 <= d; ++a) {
      for (int b = 0; a + b <= d; ++b) {
        double s = 0;
        for (int g = 0; g < r.weights.size(); ++g)
          s += r.weights(g) * std::pow(r.points(g, 0), a) * std::pow(r.points(g, 1), b);
        CHECK(s == doctest::Approx(tri_monomial_exact(a, b)).epsilon(1e-13));
      }
    }
  }
}
