#pragma once

#include <Eigen/Dense>

#include "xsb/geometry.hpp"
#include "xsb/material.hpp"

namespace xsb {

// Coefficient matrices of a scaled-boundary subdomain discretized with 2-node
// line elements, size 2n x 2n for n boundary nodes, expressed in the local
// frame with the scaling center at the origin.
struct CoefficientMatrices {
  Eigen::MatrixXd E0, E1, E2;
};

// Closed-form 4x4 coefficient blocks of one boundary element with end nodes
// x1, x2 (local frame). The signed area term a = x1 ^ x2 must be positive:
// the boundary runs counterclockwise around the scaling center.
void line2_coefficients(const Eigen::Vector2d& x1, const Eigen::Vector2d& x2,
                        const Eigen::Matrix3d& D, Eigen::Matrix4d* e0, Eigen::Matrix4d* e1,
                        Eigen::Matrix4d* e2);

// Assembles coefficient matrices over the subdomain boundary. Node positions
// are mapped into the subdomain frame and the constitutive matrix is rotated
// to match, so everything downstream lives in crack-aligned coordinates.
CoefficientMatrices assemble_coefficients(const SbfemSubdomain& sub, const MaterialModel& mat);

// Semi-analytical radial solution: displacement modes u(xi) = sum_i c_i xi^mu_i phi_i
// with Re(mu) >= 0, plus the boundary stiffness they induce.
struct ModeSolution {
  Eigen::VectorXcd mu;         // selected exponents, one per boundary dof
  Eigen::MatrixXcd v11, v21;   // displacement and force parts of the modes
  Eigen::MatrixXd K;           // symmetrized real stiffness on the boundary dofs
  Eigen::VectorXcd lambda_all; // full 2n spectrum of the linearized form (diagnostic)
  double asymmetry = 0.0;      // relative Frobenius asymmetry before symmetrization
  double cond_E0 = 0.0;
  double cond_v11 = 0.0;
};

// Solves the quadratic eigenproblem [mu^2 E0 - mu (E1^T - E1) - E2] phi = 0 via
// the linearized 2n x 2n form, keeps the branch with non-negative exponents,
// and forms K = Re(v21 v11^{-1}). A tiny E0 shift separates the defective
// rigid-body pair so the sort can split the two branches; the recovered pair is
// then snapped back to its exact limit (mu = 0, unit translations, zero force),
// which restores exact rigid-body annihilation in K.
ModeSolution solve_eigen(const CoefficientMatrices& cm);

// Mode weights reproducing the boundary displacements: solves v11 c = u_b.
Eigen::VectorXcd integration_constants(const ModeSolution& modes, const Eigen::VectorXd& u_b);

}  // namespace xsb
