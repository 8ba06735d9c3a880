#ifndef VEM_SPECTRA_HPP
#define VEM_SPECTRA_HPP

#include <Eigen/Dense>

#include "vem/vemspace.hpp"

namespace vem {

/// Spectrum of A v = lambda B v restricted to the orthogonal complement of the
/// two constant velocity fields (the common kernel of both forms).
struct SpectralResult {
  Eigen::VectorXd eigenvalues;  // ascending, deflated
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double max_residual = 0.0;  // max_i |Abar v - lambda Bbar v| / (|Abar| |v|)
};

/// kernel columns span the subspace removed before solving; B must be SPD on
/// its complement.
SpectralResult deflated_gen_eig(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                const Eigen::MatrixXd& kernel);

/// DoF vectors of the two constant velocity fields.
Eigen::MatrixXd constant_field_kernel(const DofLayout& layout);

/// Deflated spectral condition number lambda_max / lambda_min of a single
/// symmetric PSD matrix with the given kernel.
double spectral_condition(const Eigen::MatrixXd& M, const Eigen::MatrixXd& kernel);

}  // namespace vem

#endif
