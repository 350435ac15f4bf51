#include "xsb/sbfem.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace xsb {

void line2_coefficients(const Eigen::Vector2d& x1, const Eigen::Vector2d& x2,
                        const Eigen::Matrix3d& D, Eigen::Matrix4d* e0, Eigen::Matrix4d* e1,
                        Eigen::Matrix4d* e2) {
  const double a = x1.x() * x2.y() - x2.x() * x1.y();
  const double scale = x1.norm() * x2.norm();
  if (a <= 1e-12 * scale)
    throw std::runtime_error(
        "line2_coefficients: boundary element collinear with or clockwise around the scaling "
        "center");

  Eigen::Matrix<double, 3, 2> C1, C2;
  C1 << x2.y() - x1.y(), 0.0,
        0.0, -(x2.x() - x1.x()),
        -(x2.x() - x1.x()), x2.y() - x1.y();
  C2 << 0.5 * (x2.y() + x1.y()), 0.0,
        0.0, -0.5 * (x2.x() + x1.x()),
        -0.5 * (x2.x() + x1.x()), 0.5 * (x2.y() + x1.y());

  const Eigen::Matrix2d Q0 = C1.transpose() * D * C1 / (4.0 * a);
  const Eigen::Matrix2d Q1 = -C2.transpose() * D * C1 / (4.0 * a);
  const Eigen::Matrix2d Q2 = C2.transpose() * D * C2 / (4.0 * a);

  e0->block<2, 2>(0, 0) = (4.0 / 3.0) * Q0;
  e0->block<2, 2>(0, 2) = (2.0 / 3.0) * Q0;
  e0->block<2, 2>(2, 0) = (2.0 / 3.0) * Q0;
  e0->block<2, 2>(2, 2) = (4.0 / 3.0) * Q0;

  e1->block<2, 2>(0, 0) = -Q0 / 3.0 - 2.0 * Q1;
  e1->block<2, 2>(0, 2) = Q0 / 3.0 - 2.0 * Q1;
  e1->block<2, 2>(2, 0) = Q0 / 3.0 + 2.0 * Q1;
  e1->block<2, 2>(2, 2) = -Q0 / 3.0 + 2.0 * Q1;

  e2->block<2, 2>(0, 0) = Q0 / 3.0 + 4.0 * Q2;
  e2->block<2, 2>(0, 2) = -Q0 / 3.0 - 4.0 * Q2;
  e2->block<2, 2>(2, 0) = -Q0 / 3.0 - 4.0 * Q2;
  e2->block<2, 2>(2, 2) = Q0 / 3.0 + 4.0 * Q2;
}

CoefficientMatrices assemble_coefficients(const SbfemSubdomain& sub, const MaterialModel& mat) {
  const int nd = sub.n_dofs();
  CoefficientMatrices cm;
  cm.E0 = Eigen::MatrixXd::Zero(nd, nd);
  cm.E1 = Eigen::MatrixXd::Zero(nd, nd);
  cm.E2 = Eigen::MatrixXd::Zero(nd, nd);

  const Eigen::Matrix3d T = stress_rotation(sub.frame_angle);
  const Eigen::Matrix3d D_local = T * mat.D * T.transpose();

  Eigen::Matrix4d e0, e1, e2;
  for (const auto& elem : sub.boundary_elements) {
    const Eigen::Vector2d x1 = sub.local_coord(elem[0]);
    const Eigen::Vector2d x2 = sub.local_coord(elem[1]);
    line2_coefficients(x1, x2, D_local, &e0, &e1, &e2);

    const int map[4] = {2 * elem[0], 2 * elem[0] + 1, 2 * elem[1], 2 * elem[1] + 1};
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        cm.E0(map[r], map[c]) += e0(r, c);
        cm.E1(map[r], map[c]) += e1(r, c);
        cm.E2(map[r], map[c]) += e2(r, c);
      }
  }
  return cm;
}

ModeSolution solve_eigen(const CoefficientMatrices& cm) {
  const int nd = static_cast<int>(cm.E0.rows());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e0_eig(cm.E0);
  const double e0_min = e0_eig.eigenvalues().minCoeff();
  const double e0_max = e0_eig.eigenvalues().maxCoeff();
  if (e0_min <= 0.0 || e0_max / e0_min > 1e14)
    throw std::runtime_error("solve_eigen: E0 is not safely positive definite");

  // The three coefficient blocks all carry the units of the constitutive
  // matrix. Divide them out before linearizing: the QR iteration does not
  // balance, and mixing O(1) displacement rows with O(E) force rows would
  // cost as many digits of accuracy as the moduli have.
  const double unit = cm.E0.norm();
  const Eigen::MatrixXd E0 = cm.E0 / unit;
  const Eigen::MatrixXd E1 = cm.E1 / unit;
  const Eigen::MatrixXd E2 = cm.E2 / unit;

  // Linearized form acting on [u; q]: the lower-left block gets a relative
  // -1e-12 E0 shift that nudges the defective zero exponents of the rigid
  // modes to +/- ~1e-6, letting the ascending sort keep exactly one branch.
  Eigen::MatrixXd rhs(nd, 2 * nd);
  rhs << E1.transpose(), -Eigen::MatrixXd::Identity(nd, nd);
  const Eigen::MatrixXd m = E0.ldlt().solve(rhs);

  Eigen::MatrixXd Z(2 * nd, 2 * nd);
  Z.topRows(nd) = m;
  Z.bottomLeftCorner(nd, nd) = E1 * m.leftCols(nd) - E2 - 1e-12 * E0;
  Z.bottomRightCorner(nd, nd) = E1 * m.rightCols(nd);

  Eigen::EigenSolver<Eigen::MatrixXd> es(Z);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("solve_eigen: eigen decomposition failed");
  const Eigen::VectorXcd lambda = es.eigenvalues();
  const Eigen::MatrixXcd vec = es.eigenvectors();

  std::vector<int> order(2 * nd);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    if (lambda[i].real() != lambda[j].real()) return lambda[i].real() < lambda[j].real();
    return lambda[i].imag() < lambda[j].imag();
  });

  ModeSolution ms;
  ms.mu.resize(nd);
  ms.v11.resize(nd, nd);
  ms.v21.resize(nd, nd);
  ms.lambda_all = lambda;
  for (int k = 0; k < nd; ++k) {
    const int idx = order[k];
    ms.mu[k] = -lambda[idx];
    ms.v11.col(k) = vec.col(idx).head(nd);
    ms.v21.col(k) = vec.col(idx).tail(nd);
  }
  for (int k = 0; k < nd; ++k)
    if (ms.mu[k].real() < -1e-4)
      throw std::runtime_error("solve_eigen: selected branch contains a decaying exponent");

  // The E0 shift recovers the rigid translations only to ~1e-6 accuracy. Their
  // exact limit is known (exponent 0, uniform translation, zero boundary
  // force: E1^T annihilates translations element-wise), so snap the recovered
  // pair onto it before forming K.
  std::vector<int> rigid;
  for (int k = 0; k < nd; ++k)
    if (std::abs(ms.mu[k]) < 1e-4) rigid.push_back(k);
  if (rigid.size() != 2)
    throw std::runtime_error("solve_eigen: expected exactly two rigid translation modes");
  const int n_nodes = nd / 2;
  const double inv_norm = 1.0 / std::sqrt(static_cast<double>(n_nodes));
  for (int comp = 0; comp < 2; ++comp) {
    const int k = rigid[comp];
    ms.mu[k] = 0.0;
    ms.v11.col(k).setZero();
    for (int node = 0; node < n_nodes; ++node) ms.v11(2 * node + comp, k) = inv_norm;
    ms.v21.col(k).setZero();
  }
  ms.v21 *= unit;  // back to physical force units

  // The raw eigenvectors are unit vectors of the stacked [u; q] pencil, so
  // high-exponent columns carry almost no displacement part and v11 looks far
  // more singular than the mode basis actually is. Rescaling a column leaves
  // K and every recovered c_i * phi_i product unchanged; normalize on the
  // displacement part so the conditioning reflects the basis itself.
  for (int j = 0; j < nd; ++j) {
    const double s = ms.v11.col(j).norm();
    if (s > 0.0) {
      ms.v11.col(j) /= s;
      ms.v21.col(j) /= s;
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(ms.v11);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  ms.cond_v11 = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
  ms.cond_E0 = e0_max / e0_min;
  if (!(ms.cond_v11 < 1e12))
    throw std::runtime_error("solve_eigen: displacement mode matrix is numerically singular");

  const Eigen::MatrixXcd Kc =
      ms.v11.transpose().partialPivLu().solve(ms.v21.transpose()).transpose();
  const Eigen::MatrixXd Kr = Kc.real();
  const double denom = Kr.norm();
  ms.asymmetry = denom > 0.0 ? (Kr - Kr.transpose()).norm() / denom : 0.0;
  ms.K = 0.5 * (Kr + Kr.transpose());

  // A free-floating subdomain transmits no force under (and exerts no net
  // force from) rigid translation. Enforce that null space exactly instead
  // of leaving it at mode-basis solve accuracy, which degrades with the
  // basis conditioning on large boundaries.
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(nd, 2);
  for (int node = 0; node < n_nodes; ++node) {
    T(2 * node, 0) = inv_norm;
    T(2 * node + 1, 1) = inv_norm;
  }
  const Eigen::MatrixXd KT = ms.K * T;
  ms.K += T * (T.transpose() * KT) * T.transpose() - KT * T.transpose() - T * KT.transpose();
  return ms;
}

Eigen::VectorXcd integration_constants(const ModeSolution& modes, const Eigen::VectorXd& u_b) {
  if (u_b.size() != modes.v11.rows())
    throw std::invalid_argument("integration_constants: boundary vector size mismatch");
  return modes.v11.partialPivLu().solve(u_b.cast<std::complex<double>>());
}

}  // namespace xsb
