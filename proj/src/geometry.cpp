#include "xsb/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace xsb {

namespace {

constexpr double kGridPerturb = 1e-9;   // relative to cell size
constexpr double kMouthSnapTol = 1e-6;  // relative to edge length

Eigen::Vector2d rotate(const Eigen::Vector2d& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Element index containing coordinate t = x/h, biased toward the ahead
// direction so a tip sitting exactly on a grid line lands in the element the
// crack points into.
int cell_index(double t, int n, double ahead) {
  const double bias = ahead < 0.0 ? -1e-9 : 1e-9;
  int i = static_cast<int>(std::floor(t + bias));
  return std::clamp(i, 0, n - 1);
}

// Liang-Barsky clip of segment [a,b] to [lo,hi]; returns entry/exit params.
bool clip_segment(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                  const Eigen::Vector2d& lo, const Eigen::Vector2d& hi,
                  double& t0, double& t1) {
  t0 = 0.0;
  t1 = 1.0;
  const Eigen::Vector2d d = b - a;
  for (int k = 0; k < 2; ++k) {
    for (int side = 0; side < 2; ++side) {
      const double p = side == 0 ? -d[k] : d[k];
      const double q = side == 0 ? a[k] - lo[k] : hi[k] - a[k];
      if (p == 0.0) {
        if (q < 0.0) return false;
        continue;
      }
      const double r = q / p;
      if (p < 0.0) {
        if (r > t1) return false;
        t0 = std::max(t0, r);
      } else {
        if (r < t0) return false;
        t1 = std::min(t1, r);
      }
    }
  }
  return t0 <= t1;
}

bool on_border(const Eigen::Vector2d& p, const Eigen::Vector2d& lo, const Eigen::Vector2d& hi,
               double tol) {
  const bool inside = p.x() >= lo.x() - tol && p.x() <= hi.x() + tol && p.y() >= lo.y() - tol &&
                      p.y() <= hi.y() + tol;
  if (!inside) return false;
  return std::abs(p.x() - lo.x()) < tol || std::abs(p.x() - hi.x()) < tol ||
         std::abs(p.y() - lo.y()) < tol || std::abs(p.y() - hi.y()) < tol;
}

// Area of the part of a convex polygon on the positive side of line (p0, dir).
double clipped_area(std::vector<Eigen::Vector2d> poly, const Eigen::Vector2d& p0,
                    const Eigen::Vector2d& dir) {
  std::vector<Eigen::Vector2d> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& cur = poly[i];
    const Eigen::Vector2d& nxt = poly[(i + 1) % n];
    const double sc = cross2(dir, cur - p0);
    const double sn = cross2(dir, nxt - p0);
    if (sc >= 0.0) out.push_back(cur);
    if ((sc > 0.0 && sn < 0.0) || (sc < 0.0 && sn > 0.0)) {
      const double t = sc / (sc - sn);
      out.push_back(cur + t * (nxt - cur));
    }
  }
  if (out.size() < 3) return 0.0;
  double area = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) area += cross2(out[i], out[(i + 1) % out.size()]);
  return 0.5 * std::abs(area);
}

std::vector<Eigen::Vector2d> element_polygon(const Mesh& mesh, int e) {
  std::vector<Eigen::Vector2d> poly(4);
  for (int k = 0; k < 4; ++k) poly[k] = mesh.nodes[mesh.elements[e][k]];
  return poly;
}

int nearest_segment(const CrackGeometry& crack, const Eigen::Vector2d& p) {
  int best = 0;
  double best_d = std::numeric_limits<double>::max();
  for (std::size_t s = 0; s + 1 < crack.polyline.size(); ++s) {
    const Eigen::Vector2d a = crack.polyline[s], b = crack.polyline[s + 1];
    const Eigen::Vector2d d = b - a;
    const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
    const double dist = (p - (a + t * d)).norm();
    if (dist < best_d) {
      best_d = dist;
      best = static_cast<int>(s);
    }
  }
  return best;
}

TipBlock make_block(const Mesh& mesh, const Eigen::Vector2d& tip, const Eigen::Vector2d& ahead,
                    int n_layers) {
  const int ti = cell_index(tip.x() / mesh.hx(), mesh.nx, ahead.x());
  const int tj = cell_index(tip.y() / mesh.hy(), mesh.ny, ahead.y());
  TipBlock b;
  b.tip = tip;
  b.ahead_dir = ahead;
  b.i_lo = ti - (n_layers - 1);
  b.i_hi = ti + (n_layers - 1);
  b.j_lo = tj - (n_layers - 1);
  if (b.i_lo < 0 || b.i_hi >= mesh.nx || tj - (n_layers - 1) < 0 || tj + (n_layers - 1) >= mesh.ny)
    throw std::runtime_error(
        "classify_regions: tip too close to the domain boundary for the requested layer count");
  b.j_hi = tj + (n_layers - 1);
  if (b.i_lo < 0 || b.j_lo < 0 || b.i_hi >= mesh.nx || b.j_hi >= mesh.ny)
    throw std::runtime_error("classify_regions: tip too close to domain boundary for requested n_layers");
  return b;
}

RegionClassification classify_impl(const Mesh& mesh, const CrackGeometry& crack,
                                   const std::vector<TipBlock>& blocks) {
  RegionClassification cls;
  const int n_nodes = static_cast<int>(mesh.nodes.size());
  const int n_elems = static_cast<int>(mesh.elements.size());
  cls.element_region.assign(n_elems, Region::FEM);
  cls.is_heaviside.assign(n_nodes, 0);
  cls.is_inactive.assign(n_nodes, 0);
  cls.blocks = blocks;

  for (std::size_t a = 0; a < blocks.size(); ++a)
    for (std::size_t b = a + 1; b < blocks.size(); ++b) {
      const TipBlock &A = blocks[a], &B = blocks[b];
      const bool disjoint = A.i_hi < B.i_lo || B.i_hi < A.i_lo || A.j_hi < B.j_lo || B.j_hi < A.j_lo;
      if (!disjoint) throw std::runtime_error("classify_regions: tip blocks overlap");
    }

  for (const TipBlock& b : blocks)
    for (int j = b.j_lo; j <= b.j_hi; ++j)
      for (int i = b.i_lo; i <= b.i_hi; ++i) {
        const bool ring = i == b.i_lo || i == b.i_hi || j == b.j_lo || j == b.j_hi;
        cls.element_region[mesh.elem_id(i, j)] = ring ? Region::SBFEM : Region::UNUSED_INTERIOR;
      }

  if (!crack.empty()) {
    for (int e = 0; e < n_elems; ++e) {
      if (cls.element_region[e] != Region::FEM) continue;
      const Eigen::Vector2d lo = mesh.nodes[mesh.elements[e][0]];
      const Eigen::Vector2d hi = mesh.nodes[mesh.elements[e][2]];
      if (crack_cuts_rectangle(crack, lo, hi)) cls.element_region[e] = Region::XFEM_SPLIT;
    }
  }

  // Heaviside set: nodes whose integrated support (FEM + split elements) is
  // genuinely cut into two parts. The relative-area guard drops nodes whose
  // support is only grazed by a perturbed crack (sliver on one side), which
  // would otherwise carry near-null enriched dofs.
  auto adjacent_elements = [&](int node) {
    std::vector<int> adj;
    const int i = node % (mesh.nx + 1), j = node / (mesh.nx + 1);
    for (int dj = -1; dj <= 0; ++dj)
      for (int di = -1; di <= 0; ++di) {
        const int ei = i + di, ej = j + dj;
        if (ei >= 0 && ei < mesh.nx && ej >= 0 && ej < mesh.ny) adj.push_back(mesh.elem_id(ei, ej));
      }
    return adj;
  };

  if (!crack.empty()) {
    for (int node = 0; node < n_nodes; ++node) {
      const auto adj = adjacent_elements(node);
      bool touches_split = false;
      for (int e : adj) touches_split |= cls.element_region[e] == Region::XFEM_SPLIT;
      if (!touches_split) continue;

      double above = 0.0, below = 0.0, total = 0.0;
      for (int e : adj) {
        const Region r = cls.element_region[e];
        if (r != Region::FEM && r != Region::XFEM_SPLIT) continue;
        const auto poly = element_polygon(mesh, e);
        const int s = nearest_segment(crack, mesh.nodes[node]);
        const Eigen::Vector2d p0 = crack.polyline[s];
        const Eigen::Vector2d dir = crack.polyline[s + 1] - p0;
        const double a_above = clipped_area(poly, p0, dir);
        const double a_total = clipped_area(poly, p0, dir) + clipped_area(poly, p0, -dir);
        above += a_above;
        below += a_total - a_above;
        total += a_total;
      }
      if (total > 0.0 && std::min(above, below) >= 1e-6 * total) cls.is_heaviside[node] = 1;
    }
  }

  // Inactive nodes sit strictly inside a block: every adjacent element is part
  // of the scaled-boundary region and the node is not on a block perimeter.
  std::vector<std::uint8_t> on_perimeter(n_nodes, 0);
  for (const TipBlock& b : blocks) {
    for (int i = b.i_lo; i <= b.i_hi + 1; ++i) {
      on_perimeter[mesh.node_id(i, b.j_lo)] = 1;
      on_perimeter[mesh.node_id(i, b.j_hi + 1)] = 1;
    }
    for (int j = b.j_lo; j <= b.j_hi + 1; ++j) {
      on_perimeter[mesh.node_id(b.i_lo, j)] = 1;
      on_perimeter[mesh.node_id(b.i_hi + 1, j)] = 1;
    }
  }
  for (int node = 0; node < n_nodes; ++node) {
    if (on_perimeter[node]) {
      cls.sbfem_boundary_nodes.push_back(node);
      continue;
    }
    bool integrated = false;
    for (int e : adjacent_elements(node)) {
      const Region r = cls.element_region[e];
      integrated |= r == Region::FEM || r == Region::XFEM_SPLIT;
    }
    if (!integrated) cls.is_inactive[node] = 1;
  }

  std::set<int> fem_nodes;
  for (int e = 0; e < n_elems; ++e)
    if (cls.element_region[e] == Region::FEM)
      for (int k = 0; k < 4; ++k) fem_nodes.insert(mesh.elements[e][k]);
  cls.fem_nodes.assign(fem_nodes.begin(), fem_nodes.end());
  for (int node = 0; node < n_nodes; ++node)
    if (cls.is_heaviside[node]) cls.heaviside_nodes.push_back(node);
  return cls;
}

}  // namespace

Mesh build_structured_mesh(double width, double height, int nx, int ny) {
  if (width <= 0.0 || height <= 0.0)
    throw std::invalid_argument("build_structured_mesh: dimensions must be positive");
  if (nx < 1 || ny < 1) throw std::invalid_argument("build_structured_mesh: nx, ny must be >= 1");

  Mesh mesh;
  mesh.nx = nx;
  mesh.ny = ny;
  mesh.width = width;
  mesh.height = height;
  mesh.nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.nodes.emplace_back(width * i / nx, height * j / ny);
  mesh.elements.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      mesh.elements.push_back({mesh.node_id(i, j), mesh.node_id(i + 1, j),
                               mesh.node_id(i + 1, j + 1), mesh.node_id(i, j + 1)});
  return mesh;
}

CrackGeometry perturb_crack_off_grid(const Mesh& mesh, const CrackGeometry& crack) {
  CrackGeometry out = crack;
  const double hy = mesh.hy();
  for (Eigen::Vector2d& p : out.polyline) {
    const double j = std::round(p.y() / hy);
    const double line = j * hy;
    if (std::abs(p.y() - line) < 1e-6 * hy) {
      const double up = line + kGridPerturb * hy;
      p.y() = up < mesh.height ? up : line - kGridPerturb * hy;
    }
  }
  return out;
}

std::size_t RegionClassification::count(Region r) const {
  return static_cast<std::size_t>(std::count(element_region.begin(), element_region.end(), r));
}

bool crack_cuts_rectangle(const CrackGeometry& crack, const Eigen::Vector2d& lo,
                          const Eigen::Vector2d& hi, Eigen::Vector2d* entry,
                          Eigen::Vector2d* exit) {
  if (crack.empty()) return false;
  // Join the per-segment clipped pieces into one chain and require both chain
  // endpoints on the border: a mouth or tip strictly inside means no full cut.
  bool have_chain = false;
  Eigen::Vector2d first = Eigen::Vector2d::Zero(), last = Eigen::Vector2d::Zero();
  for (std::size_t s = 0; s + 1 < crack.polyline.size(); ++s) {
    const Eigen::Vector2d a = crack.polyline[s], b = crack.polyline[s + 1];
    double t0, t1;
    if (!clip_segment(a, b, lo, hi, t0, t1) || t0 >= t1) continue;
    const Eigen::Vector2d p0 = a + t0 * (b - a);
    const Eigen::Vector2d p1 = a + t1 * (b - a);
    if (!have_chain) {
      first = p0;
      have_chain = true;
    }
    last = p1;
  }
  if (!have_chain) return false;
  const double tol = 1e-12 * ((hi - lo).norm() + 1.0);
  if ((first - last).norm() < tol) return false;
  if (!on_border(first, lo, hi, tol) || !on_border(last, lo, hi, tol)) return false;
  if (entry) *entry = first;
  if (exit) *exit = last;
  return true;
}

int heaviside_sign(const CrackGeometry& crack, const Eigen::Vector2d& p) {
  const int s = nearest_segment(crack, p);
  const Eigen::Vector2d a = crack.polyline[s];
  const Eigen::Vector2d d = crack.polyline[s + 1] - a;
  return cross2(d, p - a) >= 0.0 ? 1 : -1;
}

RegionClassification classify_regions(const Mesh& mesh, const CrackGeometry& crack,
                                      int n_layers) {
  if (n_layers < 1) throw std::invalid_argument("classify_regions: n_layers must be >= 1");
  if (crack.empty()) return classify_impl(mesh, crack, {});
  const auto& poly = crack.polyline;
  const Eigen::Vector2d ahead = (poly.back() - poly[poly.size() - 2]).normalized();
  return classify_impl(mesh, crack, {make_block(mesh, crack.tip(), ahead, n_layers)});
}

RegionClassification classify_regions_two_tip(const Mesh& mesh, const CrackGeometry& crack,
                                              int n_layers) {
  if (n_layers < 1) throw std::invalid_argument("classify_regions: n_layers must be >= 1");
  if (crack.empty()) throw std::invalid_argument("classify_regions_two_tip: crack required");
  const auto& poly = crack.polyline;
  const Eigen::Vector2d ahead_b = (poly.back() - poly[poly.size() - 2]).normalized();
  const Eigen::Vector2d ahead_a = (poly.front() - poly[1]).normalized();
  return classify_impl(mesh, crack,
                       {make_block(mesh, poly.front(), ahead_a, n_layers),
                        make_block(mesh, poly.back(), ahead_b, n_layers)});
}

RegionClassification classify_uncracked_block(const Mesh& mesh, int elem_i, int elem_j,
                                              int n_layers) {
  TipBlock b;
  b.tip = Eigen::Vector2d(mesh.hx() * (elem_i + 0.5), mesh.hy() * (elem_j + 0.5));
  b.i_lo = elem_i - (n_layers - 1);
  b.i_hi = elem_i + (n_layers - 1);
  b.j_lo = elem_j - (n_layers - 1);
  b.j_hi = elem_j + (n_layers - 1);
  if (b.i_lo < 0 || b.j_lo < 0 || b.i_hi >= mesh.nx || b.j_hi >= mesh.ny)
    throw std::runtime_error("classify_uncracked_block: block does not fit inside the mesh");
  return classify_impl(mesh, CrackGeometry{}, {b});
}

Eigen::Vector2d SbfemSubdomain::local_coord(int k) const {
  return rotate(node_coords[k] - scaling_center, -frame_angle);
}

SbfemSubdomain extract_block_subdomain(const Mesh& mesh, const TipBlock& block,
                                       const CrackGeometry& crack) {
  // Closed perimeter loop, counterclockwise, starting at the block's
  // bottom-left node.
  std::vector<int> loop;
  for (int i = block.i_lo; i <= block.i_hi + 1; ++i) loop.push_back(mesh.node_id(i, block.j_lo));
  for (int j = block.j_lo + 1; j <= block.j_hi + 1; ++j)
    loop.push_back(mesh.node_id(block.i_hi + 1, j));
  for (int i = block.i_hi; i >= block.i_lo; --i) loop.push_back(mesh.node_id(i, block.j_hi + 1));
  for (int j = block.j_hi; j >= block.j_lo + 1; --j) loop.push_back(mesh.node_id(block.i_lo, j));
  const int n_loop = static_cast<int>(loop.size());

  SbfemSubdomain sub;
  sub.scaling_center = block.tip;
  sub.frame_angle = std::atan2(block.ahead_dir.y(), block.ahead_dir.x());

  if (crack.empty()) {
    sub.closed = true;
    for (int k = 0; k < n_loop; ++k) {
      sub.node_coords.push_back(mesh.nodes[loop[k]]);
      sub.mesh_nodes.push_back(loop[k]);
    }
    for (int k = 0; k < n_loop; ++k) sub.boundary_elements.push_back({k, (k + 1) % n_loop});
    return sub;
  }

  // Locate the single perimeter edge crossed by the crack.
  int cross_edge = -1;
  Eigen::Vector2d mouth = Eigen::Vector2d::Zero();
  for (int k = 0; k < n_loop; ++k) {
    const Eigen::Vector2d a = mesh.nodes[loop[k]];
    const Eigen::Vector2d b = mesh.nodes[loop[(k + 1) % n_loop]];
    for (std::size_t s = 0; s + 1 < crack.polyline.size(); ++s) {
      const Eigen::Vector2d c = crack.polyline[s], d = crack.polyline[s + 1];
      const double denom = cross2(b - a, d - c);
      if (denom == 0.0) continue;
      const double t = cross2(c - a, d - c) / denom;
      const double u = cross2(c - a, b - a) / denom;
      if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) continue;
      if (cross_edge >= 0 && cross_edge != k)
        throw std::runtime_error("extract_sbfem_subdomain: crack cuts the boundary more than once");
      cross_edge = k;
      mouth = a + t * (b - a);
    }
  }
  if (cross_edge < 0)
    throw std::runtime_error("extract_sbfem_subdomain: crack does not reach the subdomain boundary");

  sub.mouth = mouth;
  const int pk = loop[cross_edge];
  const int pk1 = loop[(cross_edge + 1) % n_loop];
  const double edge_len = (mesh.nodes[pk1] - mesh.nodes[pk]).norm();

  // Crack-frame side test: negative cross product against the ahead direction
  // is the lower face (theta just above -pi), where the traversal starts.
  auto lower_side = [&](const Eigen::Vector2d& p) {
    return cross2(block.ahead_dir, p - block.tip) < 0.0;
  };

  std::vector<int> order;  // loop indices in traversal order (mouth copies added separately)
  if ((mouth - mesh.nodes[pk]).norm() < kMouthSnapTol * edge_len ||
      (mouth - mesh.nodes[pk1]).norm() < kMouthSnapTol * edge_len) {
    sub.snapped = true;
    const bool at_pk = (mouth - mesh.nodes[pk]).norm() < (mouth - mesh.nodes[pk1]).norm();
    const int start = at_pk ? cross_edge : (cross_edge + 1) % n_loop;
    for (int k = 0; k < n_loop; ++k) order.push_back((start + k) % n_loop);
    sub.node_coords.push_back(mesh.nodes[loop[order[0]]]);
    sub.mesh_nodes.push_back(-1);
    for (int k = 1; k < n_loop; ++k) {
      sub.node_coords.push_back(mesh.nodes[loop[order[k]]]);
      sub.mesh_nodes.push_back(loop[order[k]]);
    }
    sub.node_coords.push_back(mesh.nodes[loop[order[0]]]);
    sub.mesh_nodes.push_back(-1);
  } else {
    for (int k = 1; k <= n_loop; ++k) order.push_back((cross_edge + k) % n_loop);
    sub.node_coords.push_back(mouth);
    sub.mesh_nodes.push_back(-1);
    for (int idx : order) {
      sub.node_coords.push_back(mesh.nodes[loop[idx]]);
      sub.mesh_nodes.push_back(loop[idx]);
    }
    sub.node_coords.push_back(mouth);
    sub.mesh_nodes.push_back(-1);
  }
  const int n_nodes = static_cast<int>(sub.node_coords.size());
  for (int k = 0; k + 1 < n_nodes; ++k) sub.boundary_elements.push_back({k, k + 1});

  if (!lower_side(sub.node_coords[1]))
    throw std::runtime_error("extract_sbfem_subdomain: traversal does not start on the lower crack face");

  // Mouth edge in the underlying mesh, oriented lower face -> upper face.
  int n_lo = pk, n_hi = pk1;
  if (!lower_side(mesh.nodes[n_lo])) std::swap(n_lo, n_hi);
  sub.edge_node_lo = n_lo;
  sub.edge_node_hi = n_hi;
  sub.mouth_param = (mouth - mesh.nodes[n_lo]).norm() / edge_len;
  return sub;
}

SbfemSubdomain extract_sbfem_subdomain(const Mesh& mesh, const RegionClassification& cls,
                                       const CrackGeometry& crack) {
  if (cls.blocks.empty())
    throw std::runtime_error("extract_sbfem_subdomain: classification has no tip block");
  if (crack.empty()) return extract_closed_subdomain(mesh, cls.blocks.front());
  return extract_block_subdomain(mesh, cls.blocks.front(), crack);
}

SbfemSubdomain extract_closed_subdomain(const Mesh& mesh, const TipBlock& block) {
  return extract_block_subdomain(mesh, block, CrackGeometry{});
}

std::string mesh_to_json(const Mesh& mesh, const RegionClassification* cls) {
  nlohmann::json j;
  j["nx"] = mesh.nx;
  j["ny"] = mesh.ny;
  j["width"] = mesh.width;
  j["height"] = mesh.height;
  auto& nodes = j["nodes"] = nlohmann::json::array();
  for (const auto& p : mesh.nodes) nodes.push_back({p.x(), p.y()});
  auto& elems = j["elements"] = nlohmann::json::array();
  for (const auto& e : mesh.elements) elems.push_back({e[0], e[1], e[2], e[3]});
  if (cls) {
    static const char* names[] = {"FEM", "XFEM_SPLIT", "SBFEM", "UNUSED_INTERIOR"};
    auto& tags = j["element_region"] = nlohmann::json::array();
    for (Region r : cls->element_region) tags.push_back(names[static_cast<int>(r)]);
    j["heaviside_nodes"] = cls->heaviside_nodes;
    j["sbfem_boundary_nodes"] = cls->sbfem_boundary_nodes;
  }
  return j.dump(2);
}

}  // namespace xsb
