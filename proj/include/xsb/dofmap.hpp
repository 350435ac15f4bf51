#pragma once

#include <vector>

#include "xsb/geometry.hpp"

namespace xsb {

// Global dof layout: standard dofs 2*node + comp first, then the enriched
// pairs of Heaviside nodes in ascending node order. Standard dofs of nodes
// interior to a scaled-boundary block exist but are flagged inactive.
struct DofMap {
  int n_nodes = 0;
  int total = 0;
  std::vector<int> heaviside_base;   // per node: first enriched dof index or -1
  std::vector<std::uint8_t> active;  // per dof

  int std_dof(int node, int comp) const { return 2 * node + comp; }
  int enr_dof(int node, int comp) const { return heaviside_base[node] + comp; }
  bool is_enriched(int node) const { return heaviside_base[node] >= 0; }
};

DofMap build_dofmap(const Mesh& mesh, const RegionClassification& cls);

}  // namespace xsb
