#ifndef VEM_EXACTBASIS_HPP
#define VEM_EXACTBASIS_HPP

#include <Eigen/Dense>
#include <vector>

#include "vem/femstokes.hpp"
#include "vem/vemspace.hpp"

namespace vem {

/// FEM surrogates of the auxiliary local problems that span the virtual
/// space: one boundary solution per boundary DoF (canonical Lagrange trace,
/// constant compatible divergence), one forced solution per orthogonal-moment
/// DoF, one divergence solution per divergence DoF.
struct PsiFamily {
  const FemSpace* space = nullptr;
  std::vector<FemField> fields;  // indexed like the DoF layout
  int n_boundary = 0, n_perp = 0, n_div = 0;
};

PsiFamily solve_psi_family(const DofLayout& layout, const FemSpace& space);

/// Change of basis from the auxiliary solutions to the DoF-dual basis:
/// column i holds the expansion of the i-th dual basis function.
Eigen::MatrixXd change_of_basis(const DofLayout& layout, const PsiFamily& psi);

/// Stiffness of the DoF-dual basis, (grad phi_j, grad phi_i), computed from
/// the auxiliary solutions: C^T Gpsi C.
Eigen::MatrixXd exact_stiffness(const DofLayout& layout, const PsiFamily& psi);

/// DoF vector of the interpolant of a smooth field. grad rows feed both the
/// divergence moments and (via the caller) error measurement.
Eigen::VectorXd interpolation_dofs(const DofLayout& layout, const TriMesh& mesh,
                                   const Field2& u, const Field2& grad_row0,
                                   const Field2& grad_row1, int quad_degree);

/// The interpolant itself as a FEM field: sum of dof_i * phi_i realized
/// through the auxiliary solutions.
FemField realize_virtual_function(const DofLayout& layout, const PsiFamily& psi,
                                  const Eigen::MatrixXd& basis_coefs,
                                  const Eigen::VectorXd& dofs);

}  // namespace vem

#endif
