#pragma once

#include <vector>

#include <Eigen/Sparse>

#include "xsb/dofmap.hpp"
#include "xsb/element.hpp"
#include "xsb/geometry.hpp"
#include "xsb/material.hpp"

namespace xsb {

// One stiffness contribution per mesh element, in element-id order. Elements
// inside a scaled-boundary block produce an empty contribution. `parallel`
// selects the OpenMP path; both paths return identical results because each
// slot is computed independently and stored by element id.
std::vector<ElementStiffness> element_contributions(const Mesh& mesh,
                                                    const RegionClassification& cls,
                                                    const CrackGeometry& crack,
                                                    const MaterialModel& mat, const DofMap& dm,
                                                    bool parallel);

// Flattens contributions into one triplet stream using per-contribution
// prefix-sum offsets, so the parallel fill writes each entry at the exact
// slot the serial loop would and the streams match bit for bit.
std::vector<Eigen::Triplet<double>> flatten_triplets(
    const std::vector<ElementStiffness>& contributions, bool parallel);

// Sums overlapping triplets into an n-by-n sparse matrix.
Eigen::SparseMatrix<double> assemble_matrix(const std::vector<Eigen::Triplet<double>>& triplets,
                                            int n);

// Unit diagonal entries for every inactive dof, keeping the factorization
// nonsingular while the matching zero rhs pins those dofs to zero.
void append_identity_rows(std::vector<Eigen::Triplet<double>>& triplets, const DofMap& dm);

enum class Side { bottom, right, top, left };

// Accumulates a constant traction applied along one outer boundary side into
// the global load vector. Edges crossed by the crack are split at the
// crossing so the enriched entries stay exact.
void add_side_traction(Eigen::VectorXd& f, const Mesh& mesh, const RegionClassification& cls,
                       const CrackGeometry& crack, const DofMap& dm, Side side,
                       const Eigen::Vector2d& traction);

// Active dofs whose diagonal is exactly zero after assembly; a nonempty
// result means some dof has no stiffness path and the system is singular.
std::vector<int> zero_diagonal_active_dofs(const Eigen::SparseMatrix<double>& K,
                                           const DofMap& dm);

}  // namespace xsb
