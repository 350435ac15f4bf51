#include "xsb/element.hpp"

#include <cmath>
#include <stdexcept>

namespace xsb {

namespace {

constexpr double kGauss2 = 0.5773502691896257;  // 1/sqrt(3)

Eigen::Matrix2d jacobian(const Quad4Coords& coords, double xi, double eta) {
  const auto dN = quad4_shape_grad(xi, eta);
  Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
  for (int i = 0; i < 4; ++i) {
    J(0, 0) += dN(i, 0) * coords[i].x();
    J(0, 1) += dN(i, 0) * coords[i].y();
    J(1, 0) += dN(i, 1) * coords[i].x();
    J(1, 1) += dN(i, 1) * coords[i].y();
  }
  return J;
}

// Physical shape-function gradients at a reference point; throws on
// non-positive Jacobian (non-convex or inverted element).
Eigen::Matrix<double, 4, 2> physical_grads(const Quad4Coords& coords, double xi, double eta,
                                           double& detJ) {
  const Eigen::Matrix2d J = jacobian(coords, xi, eta);
  detJ = J.determinant();
  if (detJ <= 0.0) throw std::runtime_error("quad4: non-positive Jacobian");
  return quad4_shape_grad(xi, eta) * J.inverse().transpose() * 1.0;
}

void add_point_stiffness(Eigen::MatrixXd& k, const Eigen::MatrixXd& B, const Eigen::Matrix3d& D,
                         double w) {
  k.noalias() += w * B.transpose() * D * B;
}

// Crack-side polygons of a fully cut convex quad, split along the chord
// between the crack's entry and exit points (exact for straight cracks).
std::array<std::vector<Eigen::Vector2d>, 2> split_polygons(const Quad4Coords& coords,
                                                           const Eigen::Vector2d& entry,
                                                           const Eigen::Vector2d& exit) {
  const Eigen::Vector2d dir = exit - entry;
  std::array<std::vector<Eigen::Vector2d>, 2> sides;
  for (int side = 0; side < 2; ++side) {
    const double sign = side == 0 ? 1.0 : -1.0;
    std::vector<Eigen::Vector2d> out;
    for (int i = 0; i < 4; ++i) {
      const Eigen::Vector2d& cur = coords[i];
      const Eigen::Vector2d& nxt = coords[(i + 1) % 4];
      const double sc = sign * (dir.x() * (cur - entry).y() - dir.y() * (cur - entry).x());
      const double sn = sign * (dir.x() * (nxt - entry).y() - dir.y() * (nxt - entry).x());
      if (sc >= 0.0) out.push_back(cur);
      if ((sc > 0.0 && sn < 0.0) || (sc < 0.0 && sn > 0.0))
        out.push_back(cur + (sc / (sc - sn)) * (nxt - cur));
    }
    sides[side] = std::move(out);
  }
  return sides;
}

}  // namespace

Eigen::Vector4d quad4_shape(double xi, double eta) {
  return 0.25 * Eigen::Vector4d((1 - xi) * (1 - eta), (1 + xi) * (1 - eta), (1 + xi) * (1 + eta),
                                (1 - xi) * (1 + eta));
}

Eigen::Matrix<double, 4, 2> quad4_shape_grad(double xi, double eta) {
  Eigen::Matrix<double, 4, 2> dN;
  dN << -(1 - eta), -(1 - xi), (1 - eta), -(1 + xi), (1 + eta), (1 + xi), -(1 + eta), (1 - xi);
  return 0.25 * dN;
}

Eigen::Vector2d quad4_inverse_map(const Quad4Coords& coords, const Eigen::Vector2d& p) {
  Eigen::Vector2d ref = Eigen::Vector2d::Zero();
  for (int it = 0; it < 30; ++it) {
    const Eigen::Vector4d N = quad4_shape(ref.x(), ref.y());
    Eigen::Vector2d x = Eigen::Vector2d::Zero();
    for (int i = 0; i < 4; ++i) x += N(i) * coords[i];
    const Eigen::Vector2d r = x - p;
    if (r.norm() < 1e-14) break;
    ref -= jacobian(coords, ref.x(), ref.y()).transpose().inverse() * r;
  }
  return ref;
}

ElementStiffness quad4_stiffness(const Quad4Coords& coords, const MaterialModel& mat) {
  ElementStiffness es;
  es.k = Eigen::MatrixXd::Zero(8, 8);
  for (double xi : {-kGauss2, kGauss2})
    for (double eta : {-kGauss2, kGauss2}) {
      double detJ;
      const auto dN = physical_grads(coords, xi, eta, detJ);
      Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 8);
      for (int i = 0; i < 4; ++i) {
        B(0, 2 * i) = dN(i, 0);
        B(1, 2 * i + 1) = dN(i, 1);
        B(2, 2 * i) = dN(i, 1);
        B(2, 2 * i + 1) = dN(i, 0);
      }
      add_point_stiffness(es.k, B, mat.D, detJ);
    }
  return es;
}

ElementStiffness heaviside_split_stiffness(const Quad4Coords& coords, const CrackGeometry& crack,
                                           const MaterialModel& mat,
                                           const std::array<bool, 4>& enriched_mask) {
  Eigen::Vector2d entry, exit;
  Eigen::Vector2d lo = coords[0], hi = coords[0];
  for (const auto& c : coords) {
    lo = lo.cwiseMin(c);
    hi = hi.cwiseMax(c);
  }
  if (!crack_cuts_rectangle(crack, lo, hi, &entry, &exit))
    throw std::runtime_error("heaviside_split_stiffness: element is not completely cut");

  std::array<int, 4> h_node;
  for (int i = 0; i < 4; ++i) h_node[i] = heaviside_sign(crack, coords[i]);

  ElementStiffness es;
  es.k = Eigen::MatrixXd::Zero(16, 16);

  static const double bary[3][3] = {
      {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
      {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
      {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}};

  for (const auto& poly : split_polygons(coords, entry, exit)) {
    if (poly.size() < 3) continue;
    for (std::size_t t = 1; t + 1 < poly.size(); ++t) {
      const Eigen::Vector2d v0 = poly[0], v1 = poly[t], v2 = poly[t + 1];
      const double area =
          0.5 * std::abs((v1 - v0).x() * (v2 - v0).y() - (v1 - v0).y() * (v2 - v0).x());
      if (area == 0.0) continue;
      for (int q = 0; q < 3; ++q) {
        const Eigen::Vector2d p = bary[q][0] * v0 + bary[q][1] * v1 + bary[q][2] * v2;
        const Eigen::Vector2d ref = quad4_inverse_map(coords, p);
        double detJ;
        const auto dN = physical_grads(coords, ref.x(), ref.y(), detJ);
        const int h_here = heaviside_sign(crack, p);
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 16);
        for (int i = 0; i < 4; ++i) {
          B(0, 2 * i) = dN(i, 0);
          B(1, 2 * i + 1) = dN(i, 1);
          B(2, 2 * i) = dN(i, 1);
          B(2, 2 * i + 1) = dN(i, 0);
          if (!enriched_mask[i]) continue;
          const double step = h_here - h_node[i];  // shifted enrichment
          B(0, 8 + 2 * i) = step * dN(i, 0);
          B(1, 8 + 2 * i + 1) = step * dN(i, 1);
          B(2, 8 + 2 * i) = step * dN(i, 1);
          B(2, 8 + 2 * i + 1) = step * dN(i, 0);
        }
        add_point_stiffness(es.k, B, mat.D, area / 3.0);
      }
    }
  }
  return es;
}

EdgeLoad edge_traction_load(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                            const Eigen::Vector2d& traction, const CrackGeometry& crack,
                            const std::array<bool, 2>& enriched_mask,
                            const std::array<int, 2>& node_h_sign, double s0, double s1) {
  EdgeLoad load;
  load.standard = {Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
  load.enriched = {Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
  // Integrate over the parameter sub-range [s0, s1] of the parent edge so a
  // caller can split an edge at a crack crossing and keep the quadrature exact.
  const double half_len = 0.5 * (b - a).norm();
  const double mid = 0.5 * (s0 + s1), half_range = 0.5 * (s1 - s0);
  for (double g : {-kGauss2, kGauss2}) {
    const double s = mid + half_range * g;
    const double n1 = 0.5 * (1 - s), n2 = 0.5 * (1 + s);
    const Eigen::Vector2d p = n1 * a + n2 * b;
    const double shape[2] = {n1, n2};
    const double w = half_len * half_range;
    for (int i = 0; i < 2; ++i) {
      load.standard[i] += shape[i] * w * traction;
      if (enriched_mask[i] && !crack.empty()) {
        const double step = heaviside_sign(crack, p) - node_h_sign[i];
        load.enriched[i] += step * shape[i] * w * traction;
      }
    }
  }
  return load;
}

}  // namespace xsb
