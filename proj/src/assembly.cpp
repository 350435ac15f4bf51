#include "xsb/assembly.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>

#ifdef XSB_HAVE_OPENMP
#include <omp.h>
#endif

namespace xsb {

namespace {

Quad4Coords element_coords(const Mesh& mesh, int e) {
  Quad4Coords c;
  for (int i = 0; i < 4; ++i) c[i] = mesh.nodes[mesh.elements[e][i]];
  return c;
}

// A plain element that touches enriched nodes must sit entirely on one crack
// side matching each node's stored sign; the shifted enrichment then vanishes
// on it and the element can be integrated as standard. Anything else would
// need blending treatment, which this discretization rules out by design.
void check_uncut_enriched(const Mesh& mesh, const CrackGeometry& crack, const DofMap& dm, int e,
                          const std::array<int, 4>& conn) {
  bool any = false;
  for (int n : conn) any = any || dm.is_enriched(n);
  if (!any) return;
  int h0 = heaviside_sign(crack, mesh.nodes[conn[0]]);
  for (int i = 1; i < 4; ++i) {
    if (heaviside_sign(crack, mesh.nodes[conn[i]]) != h0)
      throw std::runtime_error("element " + std::to_string(e) +
                               ": enriched node on an uncut element with corners on both crack "
                               "sides; blending is not supported");
  }
}

ElementStiffness compute_contribution(const Mesh& mesh, const RegionClassification& cls,
                                      const CrackGeometry& crack, const MaterialModel& mat,
                                      const DofMap& dm, int e) {
  ElementStiffness out;
  const Region region = cls.element_region[e];
  if (region == Region::SBFEM || region == Region::UNUSED_INTERIOR) return out;

  const auto& conn = mesh.elements[e];
  const Quad4Coords coords = element_coords(mesh, e);

  if (region == Region::FEM) {
    check_uncut_enriched(mesh, crack, dm, e, conn);
    out.k = quad4_stiffness(coords, mat).k;
    out.dofs.resize(8);
    for (int i = 0; i < 4; ++i)
      for (int c = 0; c < 2; ++c) out.dofs[2 * i + c] = dm.std_dof(conn[i], c);
    return out;
  }

  // Fully cut element: build the 16x16 block and drop columns of nodes whose
  // enrichment was suppressed by the support-area criterion.
  std::array<bool, 4> mask;
  for (int i = 0; i < 4; ++i) mask[i] = dm.is_enriched(conn[i]);
  const Eigen::MatrixXd k16 = heaviside_split_stiffness(coords, crack, mat, mask).k;

  std::vector<int> local;  // indices into the 16-wide layout
  out.dofs.clear();
  for (int i = 0; i < 4; ++i)
    for (int c = 0; c < 2; ++c) {
      local.push_back(2 * i + c);
      out.dofs.push_back(dm.std_dof(conn[i], c));
    }
  for (int i = 0; i < 4; ++i) {
    if (!mask[i]) continue;
    for (int c = 0; c < 2; ++c) {
      local.push_back(8 + 2 * i + c);
      out.dofs.push_back(dm.enr_dof(conn[i], c));
    }
  }
  const int n = static_cast<int>(local.size());
  out.k.resize(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out.k(r, c) = k16(local[r], local[c]);
  return out;
}

}  // namespace

std::vector<ElementStiffness> element_contributions(const Mesh& mesh,
                                                    const RegionClassification& cls,
                                                    const CrackGeometry& crack,
                                                    const MaterialModel& mat, const DofMap& dm,
                                                    bool parallel) {
  const int n_elems = static_cast<int>(mesh.elements.size());
  std::vector<ElementStiffness> out(n_elems);
  if (parallel) {
#ifdef XSB_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 16)
    for (int e = 0; e < n_elems; ++e)
      out[e] = compute_contribution(mesh, cls, crack, mat, dm, e);
    return out;
#endif
  }
  for (int e = 0; e < n_elems; ++e) out[e] = compute_contribution(mesh, cls, crack, mat, dm, e);
  return out;
}

std::vector<Eigen::Triplet<double>> flatten_triplets(
    const std::vector<ElementStiffness>& contributions, bool parallel) {
  const int n = static_cast<int>(contributions.size());
  std::vector<std::size_t> offset(n + 1, 0);
  for (int e = 0; e < n; ++e) {
    const std::size_t m = contributions[e].dofs.size();
    offset[e + 1] = offset[e] + m * m;
  }
  std::vector<Eigen::Triplet<double>> triplets(offset[n]);

  auto fill = [&](int e) {
    const ElementStiffness& es = contributions[e];
    const int m = static_cast<int>(es.dofs.size());
    std::size_t pos = offset[e];
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c)
        triplets[pos++] = {es.dofs[r], es.dofs[c], es.k(r, c)};
  };

  if (parallel) {
#ifdef XSB_HAVE_OPENMP
#pragma omp parallel for schedule(static)
    for (int e = 0; e < n; ++e) fill(e);
    return triplets;
#endif
  }
  for (int e = 0; e < n; ++e) fill(e);
  return triplets;
}

Eigen::SparseMatrix<double> assemble_matrix(const std::vector<Eigen::Triplet<double>>& triplets,
                                            int n) {
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(triplets.begin(), triplets.end());
  return K;
}

void append_identity_rows(std::vector<Eigen::Triplet<double>>& triplets, const DofMap& dm) {
  for (int d = 0; d < dm.total; ++d)
    if (!dm.active[d]) triplets.emplace_back(d, d, 1.0);
}

void add_side_traction(Eigen::VectorXd& f, const Mesh& mesh, const RegionClassification& cls,
                       const CrackGeometry& crack, const DofMap& dm, Side side,
                       const Eigen::Vector2d& traction) {
  const int nx = mesh.nx, ny = mesh.ny;
  const int n_edges = (side == Side::bottom || side == Side::top) ? nx : ny;
  for (int k = 0; k < n_edges; ++k) {
    int na, nb, e;
    switch (side) {
      case Side::bottom:
        na = mesh.node_id(k, 0), nb = mesh.node_id(k + 1, 0), e = mesh.elem_id(k, 0);
        break;
      case Side::top:
        na = mesh.node_id(k, ny), nb = mesh.node_id(k + 1, ny), e = mesh.elem_id(k, ny - 1);
        break;
      case Side::left:
        na = mesh.node_id(0, k), nb = mesh.node_id(0, k + 1), e = mesh.elem_id(0, k);
        break;
      case Side::right:
      default:
        na = mesh.node_id(nx, k), nb = mesh.node_id(nx, k + 1), e = mesh.elem_id(nx - 1, k);
        break;
    }
    const Region region = cls.element_region[e];
    if (region == Region::SBFEM || region == Region::UNUSED_INTERIOR)
      throw std::runtime_error("traction on a scaled-boundary block face is not supported");

    const Eigen::Vector2d a = mesh.nodes[na], b = mesh.nodes[nb];
    const std::array<bool, 2> mask = {dm.is_enriched(na), dm.is_enriched(nb)};
    std::array<int, 2> h_sign = {0, 0};
    if (!crack.empty()) h_sign = {heaviside_sign(crack, a), heaviside_sign(crack, b)};

    std::vector<std::pair<double, double>> ranges = {{-1.0, 1.0}};
    if (!crack.empty() && h_sign[0] != h_sign[1]) {
      // Split the integration at the crack crossing so the jump in the
      // enriched integrand never sits inside a quadrature interval.
      const Eigen::Vector2d dir = b - a;
      for (std::size_t i = 0; i + 1 < crack.polyline.size(); ++i) {
        const Eigen::Vector2d p = crack.polyline[i];
        const Eigen::Vector2d r = crack.polyline[i + 1] - p;
        const double denom = dir.x() * r.y() - dir.y() * r.x();
        if (denom == 0.0) continue;
        const Eigen::Vector2d d0 = p - a;
        const double t = (d0.x() * r.y() - d0.y() * r.x()) / denom;
        const double u = (d0.x() * dir.y() - d0.y() * dir.x()) / denom;
        if (t > 0.0 && t < 1.0 && u >= 0.0 && u <= 1.0) {
          const double s = -1.0 + 2.0 * t;
          ranges = {{-1.0, s}, {s, 1.0}};
          break;
        }
      }
    }
    for (auto [s0, s1] : ranges) {
      const EdgeLoad load = edge_traction_load(a, b, traction, crack, mask, h_sign, s0, s1);
      const int nodes[2] = {na, nb};
      for (int i = 0; i < 2; ++i)
        for (int c = 0; c < 2; ++c) {
          f[dm.std_dof(nodes[i], c)] += load.standard[i][c];
          if (mask[i]) f[dm.enr_dof(nodes[i], c)] += load.enriched[i][c];
        }
    }
  }
}

std::vector<int> zero_diagonal_active_dofs(const Eigen::SparseMatrix<double>& K,
                                           const DofMap& dm) {
  std::vector<int> bad;
  const Eigen::VectorXd diag = K.diagonal();
  for (int d = 0; d < dm.total; ++d)
    if (dm.active[d] && diag[d] == 0.0) bad.push_back(d);
  return bad;
}

}  // namespace xsb
