#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "xsb/geometry.hpp"
#include "xsb/material.hpp"

namespace xsb {

// Dense element contribution plus the global dof indices it scatters into.
struct ElementStiffness {
  Eigen::MatrixXd k;
  std::vector<int> dofs;
};

using Quad4Coords = std::array<Eigen::Vector2d, 4>;

// Bilinear shape functions and their reference-space gradients at (xi, eta).
Eigen::Vector4d quad4_shape(double xi, double eta);
Eigen::Matrix<double, 4, 2> quad4_shape_grad(double xi, double eta);

// Maps a physical point to reference coordinates (Newton on the bilinear map).
Eigen::Vector2d quad4_inverse_map(const Quad4Coords& coords, const Eigen::Vector2d& p);

// Standard 8x8 stiffness, 2x2 Gauss quadrature. Dof order: (x,y) per node.
ElementStiffness quad4_stiffness(const Quad4Coords& coords, const MaterialModel& mat);

// 16x16 stiffness of an element completely cut by the crack. Columns 0..7 are
// standard dofs, 8..15 the shifted-Heaviside enriched dofs in the same node
// order. enriched_mask disables enriched columns of nodes outside the
// Heaviside set (rows/cols stay zero). Integration subdivides both crack-side
// polygons into triangles with a 3-point rule each.
ElementStiffness heaviside_split_stiffness(const Quad4Coords& coords, const CrackGeometry& crack,
                                           const MaterialModel& mat,
                                           const std::array<bool, 4>& enriched_mask);

// Consistent nodal loads of a constant traction on one element edge (2-point
// Gauss). Returns the 4-entry standard part and, for enriched edge nodes, the
// shifted-Heaviside part (zero where the mask is false).
struct EdgeLoad {
  std::array<Eigen::Vector2d, 2> standard;  // per edge node
  std::array<Eigen::Vector2d, 2> enriched;
};
EdgeLoad edge_traction_load(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                            const Eigen::Vector2d& traction, const CrackGeometry& crack,
                            const std::array<bool, 2>& enriched_mask,
                            const std::array<int, 2>& node_h_sign, double s0 = -1.0,
                            double s1 = 1.0);

}  // namespace xsb
