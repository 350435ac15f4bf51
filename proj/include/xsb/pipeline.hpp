#pragma once

#include <vector>

#include "xsb/assembly.hpp"
#include "xsb/coupling.hpp"
#include "xsb/dofmap.hpp"
#include "xsb/geometry.hpp"
#include "xsb/material.hpp"
#include "xsb/sbfem.hpp"
#include "xsb/solver.hpp"

namespace xsb {

struct CoupledProblem {
  Mesh mesh;
  CrackGeometry crack;
  MaterialModel mat;
  int n_layers = 1;
  bool two_tip = false;
  // Uncracked runs wrap a scaled-boundary block around this element instead
  // of a crack tip (patch-test configuration).
  int block_elem_i = -1;
  int block_elem_j = -1;
};

struct SideTraction {
  Side side = Side::top;
  Eigen::Vector2d traction = Eigen::Vector2d::Zero();
};

struct LoadSpec {
  std::vector<SideTraction> tractions;
  std::vector<DirichletBC> dirichlet;
};

// Everything the crack-tip post-processing needs: the subdomain geometry, its
// radial modes, and the mode weights recovered from the global solution.
struct TipSolution {
  SbfemSubdomain sub;
  ModeSolution modes;
  Transformation tr;
  Eigen::VectorXcd c;
};

struct CoupledSolution {
  RegionClassification cls;
  DofMap dm;
  Eigen::SparseMatrix<double> K;         // after constraint elimination
  std::vector<std::uint8_t> free_mask;   // active and unconstrained dofs
  Eigen::VectorXd u;
  double solve_residual = 0.0;
  std::vector<TipSolution> tips;
};

// Full coupled solve: region classification, enriched finite-element
// assembly, scaled-boundary condensation per tip, constraint application,
// sparse solve, and recovery of the radial mode weights.
CoupledSolution solve_coupled(const CoupledProblem& prob, const LoadSpec& loads,
                              bool parallel = true);

}  // namespace xsb
