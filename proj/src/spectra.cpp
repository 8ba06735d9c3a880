#include "vem/spectra.hpp"

#include <cmath>

#include "vem/errors.hpp"

namespace vem {

namespace {

// Orthonormal basis of the complement of span(kernel).
Eigen::MatrixXd complement_basis(int n, const Eigen::MatrixXd& kernel) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(kernel);
  Eigen::MatrixXd Qfull = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return Qfull.rightCols(n - kernel.cols());
}

}  // namespace

SpectralResult deflated_gen_eig(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                const Eigen::MatrixXd& kernel) {
  const int n = static_cast<int>(A.rows());
  if (B.rows() != n || A.cols() != n || kernel.rows() != n)
    throw InvalidArgument("deflated_gen_eig: shape mismatch");
  Eigen::MatrixXd Z = complement_basis(n, kernel);
  Eigen::MatrixXd Ab = Z.transpose() * A * Z;
  Eigen::MatrixXd Bb = Z.transpose() * B * Z;
  Ab = 0.5 * (Ab + Ab.transpose());
  Bb = 0.5 * (Bb + Bb.transpose());

  Eigen::LLT<Eigen::MatrixXd> llt(Bb);
  if (llt.info() != Eigen::Success)
    throw DeflationError("deflated right-hand form is not positive definite");

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Ab, Bb);
  if (es.info() != Eigen::Success) throw SolverFailure("generalized eigensolver failed");

  SpectralResult out;
  out.eigenvalues = es.eigenvalues();
  out.lambda_min = out.eigenvalues(0);
  out.lambda_max = out.eigenvalues(out.eigenvalues.size() - 1);
  double anorm = std::max(Ab.norm(), 1e-300);
  for (int i = 0; i < out.eigenvalues.size(); ++i) {
    Eigen::VectorXd v = es.eigenvectors().col(i);
    double r = (Ab * v - out.eigenvalues(i) * (Bb * v)).norm() / (anorm * v.norm());
    out.max_residual = std::max(out.max_residual, r);
  }
  return out;
}

Eigen::MatrixXd constant_field_kernel(const DofLayout& layout) {
  const Polygon& poly = layout.polygon();
  Eigen::MatrixXd K(layout.num_dofs(), 2);
  for (int c = 0; c < 2; ++c) {
    VectorPoly e;
    e.x = ScaledPoly(poly.centroid(), poly.diameter(), 0);
    e.y = ScaledPoly(poly.centroid(), poly.diameter(), 0);
    (c == 0 ? e.x : e.y).coef()(0) = 1.0;
    K.col(c) = layout.dofs_of_polynomial(e);
  }
  return K;
}

double spectral_condition(const Eigen::MatrixXd& M, const Eigen::MatrixXd& kernel) {
  Eigen::MatrixXd Z = complement_basis(static_cast<int>(M.rows()), kernel);
  Eigen::MatrixXd Mb = Z.transpose() * M * Z;
  Mb = 0.5 * (Mb + Mb.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Mb);
  if (es.info() != Eigen::Success) throw SolverFailure("eigensolver failed");
  double lmin = es.eigenvalues()(0);
  double lmax = es.eigenvalues()(es.eigenvalues().size() - 1);
  if (lmin <= 0.0) throw ConditioningError("deflated matrix is not positive definite");
  return lmax / lmin;
}

}  // namespace vem
