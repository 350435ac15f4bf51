#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace xsb {

// Structured quadrilateral grid over [0,width] x [0,height] with lexicographic
// node numbering (x fastest) and counterclockwise element connectivity.
struct Mesh {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 4>> elements;
  int nx = 0;
  int ny = 0;
  double width = 0.0;
  double height = 0.0;

  double hx() const { return width / nx; }
  double hy() const { return height / ny; }
  int node_id(int i, int j) const { return j * (nx + 1) + i; }
  int elem_id(int i, int j) const { return j * nx + i; }
  int elem_i(int e) const { return e % nx; }
  int elem_j(int e) const { return e / nx; }
};

Mesh build_structured_mesh(double width, double height, int nx, int ny);

// Open polyline. First vertex is the crack mouth (on the domain boundary for
// edge cracks), last vertex is the tip. A center crack carries a tip at both
// ends and is classified through classify_regions_two_tip.
struct CrackGeometry {
  std::vector<Eigen::Vector2d> polyline;

  bool empty() const { return polyline.size() < 2; }
  Eigen::Vector2d mouth() const { return polyline.front(); }
  Eigen::Vector2d tip() const { return polyline.back(); }
};

// Shifts any crack vertex sitting on a horizontal grid line by 1e-9 * hy
// upward (downward when that would leave the domain) so that no vertex or
// span coincides with mesh nodes. Benchmarks call this before classification.
CrackGeometry perturb_crack_off_grid(const Mesh& mesh, const CrackGeometry& crack);

enum class Region : std::uint8_t { FEM, XFEM_SPLIT, SBFEM, UNUSED_INTERIOR };

// Square element block replaced by one scaled-boundary subdomain. ahead_dir
// points from the tip into the intact material (opposite the crack).
struct TipBlock {
  Eigen::Vector2d tip = Eigen::Vector2d::Zero();
  Eigen::Vector2d ahead_dir = Eigen::Vector2d::UnitX();
  int i_lo = 0, i_hi = 0, j_lo = 0, j_hi = 0;  // inclusive element index range

  bool contains_elem(int i, int j) const {
    return i >= i_lo && i <= i_hi && j >= j_lo && j <= j_hi;
  }
};

struct RegionClassification {
  std::vector<Region> element_region;      // per element
  std::vector<std::uint8_t> is_heaviside;  // per node
  std::vector<std::uint8_t> is_inactive;   // per node: interior to a block, no dofs used
  std::vector<int> heaviside_nodes;        // sorted
  std::vector<int> sbfem_boundary_nodes;   // sorted, block perimeter nodes
  std::vector<int> fem_nodes;              // sorted, nodes of FEM-integrated elements
  std::vector<TipBlock> blocks;

  std::size_t count(Region r) const;
};

// Tags the (2*n_layers-1)^2 block centred on the tip element as the
// scaled-boundary region (perimeter ring SBFEM, strict interior
// UNUSED_INTERIOR) and every fully cut element outside it as XFEM_SPLIT.
// The crack must not pass through mesh nodes; see perturb_crack_off_grid.
RegionClassification classify_regions(const Mesh& mesh, const CrackGeometry& crack,
                                      int n_layers);

// Same, for a crack whose both polyline endpoints are interior tips.
RegionClassification classify_regions_two_tip(const Mesh& mesh, const CrackGeometry& crack,
                                              int n_layers);

// Uncracked variant used by the coupled patch test: one block around a chosen
// element, closed boundary, no enrichment anywhere.
RegionClassification classify_uncracked_block(const Mesh& mesh, int elem_i, int elem_j,
                                              int n_layers);

// Boundary discretization of one scaled-boundary subdomain. DOF-nodes are
// listed along the counterclockwise traversal; for a cracked subdomain the
// crack-mouth point is duplicated (lower-face copy first, upper-face copy
// last, in the crack frame) so theta runs from -pi to +pi.
struct SbfemSubdomain {
  Eigen::Vector2d scaling_center = Eigen::Vector2d::Zero();
  double frame_angle = 0.0;  // angle of ahead_dir; SIF components are reported in this frame
  bool closed = false;

  std::vector<Eigen::Vector2d> node_coords;            // per DOF-node, global frame
  std::vector<int> mesh_nodes;                         // underlying mesh node id (-1 for mouth copies)
  std::vector<std::array<int, 2>> boundary_elements;   // 2-node line elements, ccw

  // Crack-mouth data (open subdomains only). The mouth lies on the mesh edge
  // (edge_node_lo, edge_node_hi) shared with the adjacent split element;
  // edge_node_lo is on the lower face in the crack frame. mouth_param is the
  // coordinate of the true mouth along that edge in [0,1] from edge_node_lo.
  Eigen::Vector2d mouth = Eigen::Vector2d::Zero();
  int edge_node_lo = -1;
  int edge_node_hi = -1;
  double mouth_param = 0.0;
  bool snapped = false;  // mouth coincided with a perimeter node; node duplicated instead of edge split

  int n_dofs() const { return 2 * static_cast<int>(node_coords.size()); }
  double r_o() const { return (node_coords.front() - scaling_center).norm(); }
  // Coordinates of DOF-node k relative to the scaling center, rotated into the
  // crack frame (so the crack faces sit at theta = +-pi).
  Eigen::Vector2d local_coord(int k) const;
};

SbfemSubdomain extract_sbfem_subdomain(const Mesh& mesh, const RegionClassification& cls,
                                       const CrackGeometry& crack);

// Per-block extraction for multi-tip classifications.
SbfemSubdomain extract_block_subdomain(const Mesh& mesh, const TipBlock& block,
                                       const CrackGeometry& crack);

// Closed-loop extraction for the uncracked patch-test block.
SbfemSubdomain extract_closed_subdomain(const Mesh& mesh, const TipBlock& block);

// +1 above the crack line, -1 below (side of the nearest crack segment).
int heaviside_sign(const CrackGeometry& crack, const Eigen::Vector2d& p);

// Chain of crack points crossing the axis-aligned rectangle [lo, hi]; empty
// unless the crack fully traverses it (enters and exits through the border).
bool crack_cuts_rectangle(const CrackGeometry& crack, const Eigen::Vector2d& lo,
                          const Eigen::Vector2d& hi, Eigen::Vector2d* entry = nullptr,
                          Eigen::Vector2d* exit = nullptr);

// Debug serialization of mesh + tags as a JSON document.
std::string mesh_to_json(const Mesh& mesh, const RegionClassification* cls);

}  // namespace xsb
