#pragma once

#include <Eigen/Dense>

#include "xsb/dofmap.hpp"
#include "xsb/element.hpp"
#include "xsb/geometry.hpp"

namespace xsb {

// Linear map u_subdomain = T u_involved tying subdomain boundary dofs (global
// frame) to the global dofs listed in `dofs`. Plain boundary nodes map one to
// one; the two crack-mouth copies are interpolated along the cut mesh edge
// from standard and enriched dofs, one row per crack face.
struct Transformation {
  Eigen::MatrixXd T;
  std::vector<int> dofs;
};

Transformation build_transformation(const SbfemSubdomain& sub, const Mesh& mesh,
                                    const CrackGeometry& crack, const DofMap& dm);

// Rotates the local-frame subdomain stiffness to the global frame and
// condenses it onto the involved global dofs: k = T^T R K_local R^T T.
ElementStiffness condense_stiffness(const SbfemSubdomain& sub, const Transformation& tr,
                                    const Eigen::MatrixXd& K_local);

// Boundary displacements of the subdomain in its local frame, extracted from
// a global solution vector.
Eigen::VectorXd boundary_displacements(const SbfemSubdomain& sub, const Transformation& tr,
                                       const Eigen::VectorXd& u_global);

}  // namespace xsb
