#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Sparse>

namespace xsb {

struct DirichletBC {
  int dof = -1;
  double value = 0.0;
};

// Applies prescribed dofs symmetrically while keeping full indexing: fixed
// rows and columns collapse to the identity and the column values move to the
// right-hand side, so the matrix stays symmetric positive definite.
// Duplicate constraints on one dof must agree; conflicting values throw.
void apply_dirichlet(std::vector<Eigen::Triplet<double>>& triplets, Eigen::VectorXd& f,
                     std::vector<DirichletBC> bcs, int n);

struct SolveInfo {
  double residual = 0.0;  // ||K u - f|| / ||f|| after refinement
};

// Sparse LDLT with two iterative-refinement sweeps; throws if the
// factorization fails or the final relative residual exceeds 1e-10.
Eigen::VectorXd solve_spd(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& f,
                          SolveInfo* info = nullptr);

struct ConditioningReport {
  // Condition number under the chosen diagonal preconditioner: Jacobi scaling
  // when that lowers it, the identity otherwise (equal to kappa_unscaled).
  double kappa_scaled = 0.0;
  double kappa_unscaled = 0.0;  // condition number of the raw submatrix
  int n_included = 0;
  bool dense_path = false;
};

// Spectral condition numbers of the stiffness restricted to the dofs flagged
// in `mask` (callers pass active, unconstrained dofs). Small systems use a
// dense symmetric eigensolve; large ones Lanczos with reorthogonalization.
ConditioningReport scaled_condition_number(const Eigen::SparseMatrix<double>& K,
                                           const std::vector<std::uint8_t>& mask);

}  // namespace xsb
