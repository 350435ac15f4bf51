#include "xsb/dofmap.hpp"

namespace xsb {

DofMap build_dofmap(const Mesh& mesh, const RegionClassification& cls) {
  DofMap dm;
  dm.n_nodes = static_cast<int>(mesh.nodes.size());
  dm.heaviside_base.assign(dm.n_nodes, -1);

  int next = 2 * dm.n_nodes;
  for (int node : cls.heaviside_nodes) {  // already sorted ascending
    dm.heaviside_base[node] = next;
    next += 2;
  }
  dm.total = next;

  dm.active.assign(dm.total, 1);
  for (int n = 0; n < dm.n_nodes; ++n) {
    if (cls.is_inactive[n]) {
      dm.active[dm.std_dof(n, 0)] = 0;
      dm.active[dm.std_dof(n, 1)] = 0;
    }
  }
  return dm;
}

}  // namespace xsb
