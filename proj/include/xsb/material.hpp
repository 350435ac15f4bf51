#pragma once

#include <Eigen/Dense>
#include <optional>

namespace xsb {

enum class PlaneState { strain, stress };

struct OrthotropicParams {
  double E1 = 0.0;
  double E2 = 0.0;
  double G12 = 0.0;
  double nu12 = 0.0;
  double fiber_angle_deg = 0.0;
};

// Plane constitutive model in Voigt notation: {sxx, syy, sxy} = D {exx, eyy, 2exy}.
// G and kappa feed the crack-opening-displacement formulas; kappa is only defined
// for isotropic materials (NaN otherwise).
struct MaterialModel {
  Eigen::Matrix3d D = Eigen::Matrix3d::Zero();
  double G = 0.0;
  double kappa = 0.0;
  PlaneState plane_state = PlaneState::strain;
  bool is_isotropic = false;
  std::optional<OrthotropicParams> ortho;
};

MaterialModel isotropic(double E, double nu, PlaneState state);

// Orthotropic plane model from engineering constants given in material axes,
// rotated so the first material axis sits at fiber_angle_deg from global x.
// Plane strain is rejected: it needs out-of-plane constants we do not carry.
MaterialModel orthotropic(double E1, double E2, double G12, double nu12,
                          double fiber_angle_deg, PlaneState state);

// Moduli law E1 = G12 (phi + 2 nu12 + 1), E2 = E1 / phi.
MaterialModel orthotropic_from_phi(double G12, double nu12, double phi,
                                   double fiber_angle_deg, PlaneState state);

// Rotates a Voigt constitutive matrix by angle_deg (material axes relative to
// global). D(theta + 180) == D(theta).
Eigen::Matrix3d rotate_constitutive(const Eigen::Matrix3d& D_material, double angle_deg);

// Voigt transform taking global-axis stress into axes rotated by +angle_rad.
Eigen::Matrix3d stress_rotation(double angle_rad);

}  // namespace xsb
