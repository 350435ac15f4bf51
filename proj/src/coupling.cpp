#include "xsb/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace xsb {

namespace {

constexpr double kDropTol = 1e-6;

struct RowEntry {
  int dof;
  double coef;
};

}  // namespace

Transformation build_transformation(const SbfemSubdomain& sub, const Mesh& mesh,
                                    const CrackGeometry& crack, const DofMap& dm) {
  const int n_nodes = static_cast<int>(sub.node_coords.size());

  int h_lo = 0, h_hi = 0;
  std::array<bool, 2> enr = {false, false};
  if (!sub.closed) {
    h_lo = heaviside_sign(crack, mesh.nodes[sub.edge_node_lo]);
    h_hi = heaviside_sign(crack, mesh.nodes[sub.edge_node_hi]);
    if (h_lo != -h_hi)
      throw std::runtime_error("build_transformation: cut-edge nodes on the same crack side");
    enr = {dm.is_enriched(sub.edge_node_lo), dm.is_enriched(sub.edge_node_hi)};
  }
  const double t = sub.mouth_param;

  // Crack-face displacement at the mouth, interpolated along the cut edge.
  // The face matching a node's own side picks up no enrichment there; the
  // opposite face sees the full jump 2 H of the other node.
  auto mouth_row = [&](int face_sign, int comp) {
    std::vector<RowEntry> row;
    row.push_back({dm.std_dof(sub.edge_node_lo, comp), 1.0 - t});
    row.push_back({dm.std_dof(sub.edge_node_hi, comp), t});
    const double c_lo = (1.0 - t) * (face_sign - h_lo);
    const double c_hi = t * (face_sign - h_hi);
    if (std::abs(c_lo) >= kDropTol && !enr[0])
      throw std::runtime_error(
          "build_transformation: crack-face displacement needs a suppressed enrichment dof");
    if (std::abs(c_hi) >= kDropTol && !enr[1])
      throw std::runtime_error(
          "build_transformation: crack-face displacement needs a suppressed enrichment dof");
    if (enr[0] && c_lo != 0.0) row.push_back({dm.enr_dof(sub.edge_node_lo, comp), c_lo});
    if (enr[1] && c_hi != 0.0) row.push_back({dm.enr_dof(sub.edge_node_hi, comp), c_hi});
    return row;
  };

  std::vector<std::vector<RowEntry>> rows(2 * n_nodes);
  for (int k = 0; k < n_nodes; ++k) {
    const int mn = sub.mesh_nodes[k];
    for (int comp = 0; comp < 2; ++comp) {
      if (mn >= 0) {
        rows[2 * k + comp] = {{dm.std_dof(mn, comp), 1.0}};
      } else {
        // Traversal starts on the lower crack face and ends on the upper one.
        const int face_sign = (k == 0) ? h_lo : h_hi;
        rows[2 * k + comp] = mouth_row(face_sign, comp);
      }
    }
  }

  std::map<int, int> column;  // global dof -> column index, ascending dof order
  for (const auto& row : rows)
    for (const auto& e : row) column.emplace(e.dof, 0);
  int next = 0;
  for (auto& kv : column) kv.second = next++;

  Transformation tr;
  tr.dofs.resize(column.size());
  for (const auto& kv : column) tr.dofs[kv.second] = kv.first;
  tr.T = Eigen::MatrixXd::Zero(2 * n_nodes, static_cast<int>(column.size()));
  for (int r = 0; r < 2 * n_nodes; ++r)
    for (const auto& e : rows[r]) tr.T(r, column.at(e.dof)) += e.coef;
  return tr;
}

namespace {

Eigen::MatrixXd frame_rotation(const SbfemSubdomain& sub) {
  const int n = static_cast<int>(sub.node_coords.size());
  const double c = std::cos(sub.frame_angle), s = std::sin(sub.frame_angle);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    R(2 * k, 2 * k) = c;
    R(2 * k, 2 * k + 1) = -s;
    R(2 * k + 1, 2 * k) = s;
    R(2 * k + 1, 2 * k + 1) = c;
  }
  return R;
}

}  // namespace

ElementStiffness condense_stiffness(const SbfemSubdomain& sub, const Transformation& tr,
                                    const Eigen::MatrixXd& K_local) {
  if (K_local.rows() != tr.T.rows())
    throw std::invalid_argument("condense_stiffness: stiffness/transformation size mismatch");
  const Eigen::MatrixXd R = frame_rotation(sub);
  const Eigen::MatrixXd K_glob = R * K_local * R.transpose();
  ElementStiffness out;
  out.k = tr.T.transpose() * K_glob * tr.T;
  out.dofs = tr.dofs;
  return out;
}

Eigen::VectorXd boundary_displacements(const SbfemSubdomain& sub, const Transformation& tr,
                                       const Eigen::VectorXd& u_global) {
  Eigen::VectorXd u_inv(tr.dofs.size());
  for (std::size_t i = 0; i < tr.dofs.size(); ++i) u_inv[i] = u_global[tr.dofs[i]];
  const Eigen::VectorXd u_sb = tr.T * u_inv;
  return frame_rotation(sub).transpose() * u_sb;
}

}  // namespace xsb
