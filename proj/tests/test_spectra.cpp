#include <doctest.h>

#include <cmath>

#include "vem/errors.hpp"
#include "vem/spectra.hpp"

using namespace vem;

TEST_CASE("identical pencil has unit spectrum") {
  int n = 6;
  Eigen::MatrixXd M = Eigen::MatrixXd::Random(n, n);
  Eigen::MatrixXd A = M * M.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(n, 0);
  SpectralResult r = deflated_gen_eig(A, A, kernel);
  CHECK(r.lambda_min == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.lambda_max == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.max_residual <= 1e-10);
}

TEST_CASE("scaled pencil") {
  int n = 5;
  Eigen::MatrixXd M = Eigen::MatrixXd::Random(n, n);
  Eigen::MatrixXd B = M * M.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd A = 2.0 * B;
  SpectralResult r = deflated_gen_eig(A, B, Eigen::MatrixXd::Zero(n, 0));
  CHECK(r.lambda_min == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.lambda_max == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("deflation removes a shared kernel direction") {
  // diag(0, 1, 4) vs diag(0, 1, 1), kernel = e0
  Eigen::MatrixXd A = Eigen::Vector3d(0, 1, 4).asDiagonal();
  Eigen::MatrixXd B = Eigen::Vector3d(0, 1, 1).asDiagonal();
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(3, 1);
  kernel(0, 0) = 1.0;
  SpectralResult r = deflated_gen_eig(A, B, kernel);
  CHECK(r.eigenvalues.size() == 2);
  CHECK(r.lambda_min == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.lambda_max == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("non-SPD right-hand side is rejected") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd B = Eigen::Vector3d(1, 1, -1).asDiagonal();
  CHECK_THROWS_AS(deflated_gen_eig(A, B, Eigen::MatrixXd::Zero(3, 0)), DeflationError);
}

TEST_CASE("swapping the pencil inverts the spectrum") {
  int n = 7;
  Eigen::MatrixXd M = Eigen::MatrixXd::Random(n, n);
  Eigen::MatrixXd N = Eigen::MatrixXd::Random(n, n);
  Eigen::MatrixXd A = M * M.transpose() + 0.2 * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd B = N * N.transpose() + 0.2 * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(n, 0);
  SpectralResult fwd = deflated_gen_eig(A, B, kernel);
  SpectralResult rev = deflated_gen_eig(B, A, kernel);
  CHECK(fwd.lambda_min == doctest::Approx(1.0 / rev.lambda_max).epsilon(1e-10));
  CHECK(fwd.lambda_max == doctest::Approx(1.0 / rev.lambda_min).epsilon(1e-10));
}

TEST_CASE("spectral condition of simple matrices") {
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(4, 4);
  CHECK(spectral_condition(I, Eigen::MatrixXd::Zero(4, 0)) == doctest::Approx(1.0));
  Eigen::MatrixXd D = Eigen::Vector3d(1, 10, 0).asDiagonal();
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(3, 1);
  kernel(2, 0) = 1.0;
  CHECK(spectral_condition(D, kernel) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("constant-field kernel has exact dof structure") {
  Polygon poly = element_sequence(ElementFamily::hanging_node, 1);
  DofLayout layout(poly, 3);
  Eigen::MatrixXd K = constant_field_kernel(layout);
  CHECK(K.rows() == layout.num_dofs());
  CHECK(K.cols() == 2);
  // boundary values are the constant itself, divergence moments vanish
  CHECK(K(layout.vertex_dof(2, 0), 0) == doctest::Approx(1.0));
  CHECK(K(layout.vertex_dof(2, 1), 0) == doctest::Approx(0.0));
  for (int g = 0; g < layout.num_div_dofs(); ++g) {
    CHECK(K(layout.div_dof(g), 0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(K(layout.div_dof(g), 1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  }
}
