#include "xsb/pipeline.hpp"

#include <cstdio>
#include <stdexcept>

namespace xsb {

CoupledSolution solve_coupled(const CoupledProblem& prob, const LoadSpec& loads, bool parallel) {
  CoupledSolution sol;

  if (prob.crack.empty()) {
    if (prob.block_elem_i < 0 || prob.block_elem_j < 0)
      throw std::invalid_argument("solve_coupled: uncracked run needs a block element");
    sol.cls = classify_uncracked_block(prob.mesh, prob.block_elem_i, prob.block_elem_j,
                                       prob.n_layers);
  } else if (prob.two_tip) {
    sol.cls = classify_regions_two_tip(prob.mesh, prob.crack, prob.n_layers);
  } else {
    sol.cls = classify_regions(prob.mesh, prob.crack, prob.n_layers);
  }

  sol.dm = build_dofmap(prob.mesh, sol.cls);

  const auto contribs =
      element_contributions(prob.mesh, sol.cls, prob.crack, prob.mat, sol.dm, parallel);
  auto triplets = flatten_triplets(contribs, parallel);

  // One condensed stiffness block per tip, scattered like any element.
  for (const auto& block : sol.cls.blocks) {
    TipSolution tip;
    tip.sub = extract_block_subdomain(prob.mesh, block, prob.crack);
    const CoefficientMatrices cm = assemble_coefficients(tip.sub, prob.mat);
    tip.modes = solve_eigen(cm);
    tip.tr = build_transformation(tip.sub, prob.mesh, prob.crack, sol.dm);
    const ElementStiffness cond = condense_stiffness(tip.sub, tip.tr, tip.modes.K);
    const int m = static_cast<int>(cond.dofs.size());
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) triplets.emplace_back(cond.dofs[r], cond.dofs[c], cond.k(r, c));
    sol.tips.push_back(std::move(tip));
  }

  append_identity_rows(triplets, sol.dm);

  // Diagonal accumulated straight from the triplets: a zero entry on an
  // active dof means nothing stiffens it and the solve would be singular.
  {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(sol.dm.total);
    for (const auto& t : triplets)
      if (t.row() == t.col()) diag[t.row()] += t.value();
    for (int d = 0; d < sol.dm.total; ++d)
      if (sol.dm.active[d] && diag[d] == 0.0)
        std::fprintf(stderr, "warning: dof %d carries no stiffness\n", d);
  }

  Eigen::VectorXd f = Eigen::VectorXd::Zero(sol.dm.total);
  for (const auto& st : loads.tractions)
    add_side_traction(f, prob.mesh, sol.cls, prob.crack, sol.dm, st.side, st.traction);

  apply_dirichlet(triplets, f, loads.dirichlet, sol.dm.total);
  sol.K = assemble_matrix(triplets, sol.dm.total);

  sol.free_mask.assign(sol.dm.total, 0);
  for (int d = 0; d < sol.dm.total; ++d) sol.free_mask[d] = sol.dm.active[d];
  for (const auto& bc : loads.dirichlet) sol.free_mask[bc.dof] = 0;

  SolveInfo info;
  sol.u = solve_spd(sol.K, f, &info);
  sol.solve_residual = info.residual;

  for (auto& tip : sol.tips) {
    const Eigen::VectorXd u_b = boundary_displacements(tip.sub, tip.tr, sol.u);
    tip.c = integration_constants(tip.modes, u_b);
  }
  return sol;
}

}  // namespace xsb
