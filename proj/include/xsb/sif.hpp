#pragma once

#include <array>
#include <complex>

#include "xsb/geometry.hpp"
#include "xsb/material.hpp"
#include "xsb/sbfem.hpp"

namespace xsb {

struct SifResult {
  double k1 = 0.0;  // opening mode, crack-frame y
  double k2 = 0.0;  // sliding mode, crack-frame x
  std::array<int, 2> singular_modes = {-1, -1};
  std::array<std::complex<double>, 2> mu;
  double r_o = 0.0;  // radius used by the displacement route
  double L0 = 0.0;   // boundary radius ahead of the tip used by the stress route
};

// The two exponents nearest the square-root singularity, restricted to
// Re(mu) in (0.1, 0.9). A complex exponent is paired with its conjugate so
// the reconstructed field stays real.
std::array<int, 2> select_singular_modes(const Eigen::VectorXcd& mu);

// Crack-opening route: the jump of the singular displacement field between
// the two mouth copies, converted through the plane-elasticity crack-face
// profile. Isotropic materials only.
SifResult sif_from_displacement(const SbfemSubdomain& sub, const ModeSolution& modes,
                                const Eigen::VectorXcd& c, const MaterialModel& mat);

// Stress route: singular stress modes at boundary-element midpoints,
// interpolated to the direction ahead of the tip and scaled by the boundary
// radius there. Valid for any constitutive model.
SifResult sif_from_stress(const SbfemSubdomain& sub, const ModeSolution& modes,
                          const Eigen::VectorXcd& c, const MaterialModel& mat);

}  // namespace xsb
