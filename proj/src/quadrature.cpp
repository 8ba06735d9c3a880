#include "vem/quadrature.hpp"

#include <cmath>

#include "vem/errors.hpp"

namespace vem {

namespace {

// Legendre P_n(x) and P_{n-1}(x) by three-term recurrence.
std::pair<double, double> legendre_pair(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

}  // namespace

QuadRule edge_gauss_legendre(int n_points) {
  if (n_points < 1) throw InvalidArgument("edge_gauss_legendre: n_points < 1");
  // Golub-Welsch: eigenvalues of the symmetric Jacobi matrix.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n_points, n_points);
  for (int k = 1; k < n_points; ++k) {
    double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadRule rule;
  rule.points = es.eigenvalues();
  rule.weights.resize(n_points);
  for (int i = 0; i < n_points; ++i) {
    double v0 = es.eigenvectors()(0, i);
    rule.weights(i) = 2.0 * v0 * v0;
  }
  rule.exactness = 2 * n_points - 1;
  return rule;
}

QuadRule edge_rule_for_degree(int degree) {
  int n = (degree + 2) / 2;
  if (n < 1) n = 1;
  return edge_gauss_legendre(n);
}

Eigen::VectorXd gauss_lobatto_nodes(int p) {
  if (p < 1) throw InvalidArgument("gauss_lobatto_nodes: p < 1");
  Eigen::VectorXd x(p + 1);
  x(0) = -1.0;
  x(p) = 1.0;
  // Interior nodes are the roots of P_p'; Newton from Chebyshev-Lobatto guesses.
  for (int i = 1; i < p; ++i) {
    double xi = -std::cos(M_PI * i / p);
    for (int it = 0; it < 100; ++it) {
      auto [pp, pm] = legendre_pair(p, xi);
      double dp = p * (xi * pp - pm) / (xi * xi - 1.0);       // P_p'
      double d2p = (2.0 * xi * dp - p * (p + 1.0) * pp) / (1.0 - xi * xi);  // P_p''
      double dx = dp / d2p;
      xi -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    x(i) = xi;
  }
  return x;
}

Eigen::VectorXd gauss_lobatto_weights(int p) {
  Eigen::VectorXd x = gauss_lobatto_nodes(p);
  Eigen::VectorXd w(p + 1);
  for (int i = 0; i <= p; ++i) {
    auto [pp, pm] = legendre_pair(p, x(i));
    (void)pm;
    w(i) = 2.0 / (p * (p + 1.0) * pp * pp);
  }
  return w;
}

QuadRule triangle_rule(int degree) {
  if (degree < 0) degree = 0;
  // x = u, y = v(1-u), jacobian (1-u): degree+1 in u, degree in v.
  QuadRule gu = edge_gauss_legendre((degree + 3) / 2);
  QuadRule gv = edge_gauss_legendre((degree + 2) / 2);
  int n = static_cast<int>(gu.weights.size() * gv.weights.size());
  QuadRule rule;
  rule.points.resize(n, 2);
  rule.weights.resize(n);
  int idx = 0;
  for (int i = 0; i < gu.weights.size(); ++i) {
    double u = 0.5 * (gu.points(i) + 1.0);
    double wu = 0.5 * gu.weights(i);
    for (int j = 0; j < gv.weights.size(); ++j) {
      double v = 0.5 * (gv.points(j) + 1.0);
      double wv = 0.5 * gv.weights(j);
      rule.points(idx, 0) = u;
      rule.points(idx, 1) = v * (1.0 - u);
      rule.weights(idx) = wu * wv * (1.0 - u);
      ++idx;
    }
  }
  rule.exactness = degree;
  return rule;
}

}  // namespace vem
