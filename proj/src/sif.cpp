#include "xsb/sif.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace xsb {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_real(const std::complex<double>& z) { return std::abs(z.imag()) <= 1e-8; }

}  // namespace

std::array<int, 2> select_singular_modes(const Eigen::VectorXcd& mu) {
  std::vector<int> candidates;
  for (int i = 0; i < mu.size(); ++i)
    if (mu[i].real() > 0.1 && mu[i].real() < 0.9) candidates.push_back(i);
  if (candidates.size() < 2)
    throw std::runtime_error("select_singular_modes: fewer than two near-square-root exponents");

  std::stable_sort(candidates.begin(), candidates.end(), [&](int i, int j) {
    return std::abs(mu[i] - 0.5) < std::abs(mu[j] - 0.5);
  });
  const int first = candidates[0];
  int second = -1;
  if (!is_real(mu[first])) {
    // Keep the conjugate partner so c_i phi_i sums to a real field.
    double best = std::numeric_limits<double>::max();
    for (int i : candidates) {
      if (i == first) continue;
      const double d = std::abs(mu[i] - std::conj(mu[first]));
      if (d < best) {
        best = d;
        second = i;
      }
    }
    if (second < 0 || best > 1e-6 * (1.0 + std::abs(mu[first])))
      throw std::runtime_error("select_singular_modes: unpaired complex singular exponent");
  } else {
    second = candidates[1];
  }
  return {first, second};
}

SifResult sif_from_displacement(const SbfemSubdomain& sub, const ModeSolution& modes,
                                const Eigen::VectorXcd& c, const MaterialModel& mat) {
  if (!mat.is_isotropic)
    throw std::invalid_argument(
        "sif_from_displacement: crack-opening route requires an isotropic material");
  if (sub.closed)
    throw std::invalid_argument("sif_from_displacement: subdomain has no crack mouth");

  const auto pair = select_singular_modes(modes.mu);
  const int nd = static_cast<int>(modes.v11.rows());
  const int lo_row = 0;            // lower-face mouth copy
  const int hi_row = nd - 2;       // upper-face mouth copy

  // Jump of the singular displacement field across the mouth, local frame.
  Eigen::Vector2cd jump = Eigen::Vector2cd::Zero();
  for (int i : pair) {
    jump[0] += c[i] * (modes.v11(hi_row, i) - modes.v11(lo_row, i));
    jump[1] += c[i] * (modes.v11(hi_row + 1, i) - modes.v11(lo_row + 1, i));
  }

  SifResult res;
  res.singular_modes = pair;
  res.mu = {modes.mu[pair[0]], modes.mu[pair[1]]};
  res.r_o = sub.r_o();
  const double factor = mat.G / (mat.kappa + 1.0) * std::sqrt(2.0 * kPi / res.r_o);
  res.k1 = factor * jump[1].real();
  res.k2 = factor * jump[0].real();
  return res;
}

SifResult sif_from_stress(const SbfemSubdomain& sub, const ModeSolution& modes,
                          const Eigen::VectorXcd& c, const MaterialModel& mat) {
  if (sub.closed)
    throw std::invalid_argument("sif_from_stress: subdomain has no crack mouth");

  const auto pair = select_singular_modes(modes.mu);
  const Eigen::Matrix3d T = stress_rotation(sub.frame_angle);
  const Eigen::Matrix3d D_local = T * mat.D * T.transpose();

  // Singular stress at each boundary-element midpoint: the weighted mode sum
  // sigma(theta) = sum_i c_i D (mu_i b1 N + b2 N,eta) phi_i at xi = 1.
  struct Sample {
    double theta, r;
    std::complex<double> syy, sxy;
  };
  std::vector<Sample> table;
  table.reserve(sub.boundary_elements.size());

  for (const auto& elem : sub.boundary_elements) {
    const Eigen::Vector2d x1 = sub.local_coord(elem[0]);
    const Eigen::Vector2d x2 = sub.local_coord(elem[1]);
    const double a = x1.x() * x2.y() - x2.x() * x1.y();

    Eigen::Matrix<double, 3, 2> C1, C2;
    C1 << x2.y() - x1.y(), 0.0,
          0.0, -(x2.x() - x1.x()),
          -(x2.x() - x1.x()), x2.y() - x1.y();
    C2 << 0.5 * (x2.y() + x1.y()), 0.0,
          0.0, -0.5 * (x2.x() + x1.x()),
          -0.5 * (x2.x() + x1.x()), 0.5 * (x2.y() + x1.y());
    const Eigen::Matrix<double, 3, 2> b1 = C1 / a;
    const Eigen::Matrix<double, 3, 2> b2 = -2.0 * C2 / a;  // b2(eta) at the midpoint

    Eigen::Matrix<double, 2, 4> N0, Nd;
    N0 << 0.5, 0.0, 0.5, 0.0,
          0.0, 0.5, 0.0, 0.5;
    Nd << -0.5, 0.0, 0.5, 0.0,
          0.0, -0.5, 0.0, 0.5;
    const Eigen::Matrix<double, 3, 4> B1 = b1 * N0;
    const Eigen::Matrix<double, 3, 4> B2 = b2 * Nd;

    Eigen::Vector3cd sigma = Eigen::Vector3cd::Zero();
    for (int i : pair) {
      Eigen::Vector4cd phi;
      phi << modes.v11(2 * elem[0], i), modes.v11(2 * elem[0] + 1, i),
          modes.v11(2 * elem[1], i), modes.v11(2 * elem[1] + 1, i);
      sigma += c[i] * (D_local * (modes.mu[i] * B1 + B2).cast<std::complex<double>>() * phi);
    }

    const Eigen::Vector2d mid = 0.5 * (x1 + x2);
    table.push_back({std::atan2(mid.y(), mid.x()), mid.norm(), sigma[1], sigma[2]});
  }

  for (std::size_t i = 1; i < table.size(); ++i)
    if (table[i].theta <= table[i - 1].theta)
      throw std::runtime_error("sif_from_stress: boundary midpoints not monotone in theta");

  // Recover the stress modes and the boundary radius at theta = 0 from the
  // reduced-order samples. Linear interpolation between the two bracketing
  // midpoints is not enough: they sit half an element off the crack plane,
  // where sigma_yy and sigma_xy deviate from their on-axis values at second
  // order in the offset angle, which never converges away because the
  // subdomain keeps its shape under mesh refinement. A patch-recovery fit
  // through the nearest samples (cubic when two exist on each side)
  // reproduces that quadratic variation exactly.
  std::size_t hi = 0;
  while (hi < table.size() && table[hi].theta < 0.0) ++hi;
  if (hi == 0 || hi == table.size())
    throw std::runtime_error("sif_from_stress: no boundary samples bracket the ahead direction");
  const std::size_t lo = hi >= 2 ? hi - 2 : hi - 1;
  const std::size_t up = std::min(hi + 1, table.size() - 1);

  std::complex<double> syy = 0.0, sxy = 0.0;
  double L0 = 0.0;
  for (std::size_t i = lo; i <= up; ++i) {
    double w = 1.0;
    for (std::size_t j = lo; j <= up; ++j)
      if (j != i) w *= (0.0 - table[j].theta) / (table[i].theta - table[j].theta);
    syy += w * table[i].syy;
    sxy += w * table[i].sxy;
    L0 += w * table[i].r;
  }

  SifResult res;
  res.singular_modes = pair;
  res.mu = {modes.mu[pair[0]], modes.mu[pair[1]]};
  res.r_o = sub.r_o();
  res.L0 = L0;
  const double factor = std::sqrt(2.0 * kPi * L0);
  res.k1 = factor * syy.real();
  res.k2 = factor * sxy.real();
  return res;
}

}  // namespace xsb
