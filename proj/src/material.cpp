#include "xsb/material.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace xsb {

Eigen::Matrix3d stress_rotation(double angle_rad) {
  const double m = std::cos(angle_rad);
  const double s = std::sin(angle_rad);
  Eigen::Matrix3d T;
  // Transforms Voigt stress from global axes into axes rotated by +angle.
  T << m * m, s * s, 2.0 * m * s,
       s * s, m * m, -2.0 * m * s,
       -m * s, m * s, m * m - s * s;
  return T;
}

namespace {

void check_positive_definite(const Eigen::Matrix3d& D, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(D);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument(std::string(what) + ": constitutive matrix not positive definite");
}

}  // namespace

MaterialModel isotropic(double E, double nu, PlaneState state) {
  if (E <= 0.0) throw std::invalid_argument("isotropic: E must be positive");
  if (nu <= -1.0 || nu >= 0.5) throw std::invalid_argument("isotropic: nu outside (-1, 0.5)");

  MaterialModel mat;
  mat.plane_state = state;
  mat.is_isotropic = true;
  mat.G = E / (2.0 * (1.0 + nu));
  if (state == PlaneState::strain) {
    const double c = E / ((1.0 + nu) * (1.0 - 2.0 * nu));
    mat.D << c * (1.0 - nu), c * nu, 0.0,
             c * nu, c * (1.0 - nu), 0.0,
             0.0, 0.0, c * (1.0 - 2.0 * nu) / 2.0;
    mat.kappa = 3.0 - 4.0 * nu;
  } else {
    const double c = E / (1.0 - nu * nu);
    mat.D << c, c * nu, 0.0,
             c * nu, c, 0.0,
             0.0, 0.0, c * (1.0 - nu) / 2.0;
    mat.kappa = (3.0 - nu) / (1.0 + nu);
  }
  check_positive_definite(mat.D, "isotropic");
  return mat;
}

MaterialModel orthotropic(double E1, double E2, double G12, double nu12,
                          double fiber_angle_deg, PlaneState state) {
  if (E1 <= 0.0 || E2 <= 0.0 || G12 <= 0.0)
    throw std::invalid_argument("orthotropic: moduli must be positive");
  if (state == PlaneState::strain)
    throw std::invalid_argument(
        "orthotropic: plane strain needs out-of-plane constants; only plane stress is supported");
  if (nu12 * nu12 >= E1 / E2)
    throw std::invalid_argument("orthotropic: compliance not positive definite (nu12^2 >= E1/E2)");

  Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
  S(0, 0) = 1.0 / E1;
  S(1, 1) = 1.0 / E2;
  S(0, 1) = S(1, 0) = -nu12 / E1;  // nu21/E2 == nu12/E1 by compliance symmetry
  S(2, 2) = 1.0 / G12;

  MaterialModel mat;
  mat.plane_state = state;
  mat.is_isotropic = false;
  mat.D = rotate_constitutive(S.inverse(), fiber_angle_deg);
  mat.G = G12;
  mat.kappa = std::numeric_limits<double>::quiet_NaN();
  mat.ortho = OrthotropicParams{E1, E2, G12, nu12, fiber_angle_deg};
  check_positive_definite(mat.D, "orthotropic");
  return mat;
}

MaterialModel orthotropic_from_phi(double G12, double nu12, double phi,
                                   double fiber_angle_deg, PlaneState state) {
  if (phi <= 0.0) throw std::invalid_argument("orthotropic_from_phi: phi must be positive");
  const double E1 = G12 * (phi + 2.0 * nu12 + 1.0);
  const double E2 = E1 / phi;
  return orthotropic(E1, E2, G12, nu12, fiber_angle_deg, state);
}

Eigen::Matrix3d rotate_constitutive(const Eigen::Matrix3d& D_material, double angle_deg) {
  const double rad = angle_deg * M_PI / 180.0;
  // sigma_glob = T(-a) sigma_mat and the engineering-strain congruence gives
  // D_glob = T(-a) D_mat T(-a)^T.
  const Eigen::Matrix3d T = stress_rotation(-rad);
  return T * D_material * T.transpose();
}

}  // namespace xsb
