#ifndef MMU_BENDERS_HPP
#define MMU_BENDERS_HPP

// Decomposition master and feasibility-cut machinery.
//
// The master keeps the setup/session/walk-in structure from append_core plus
// rows bounding every facility's walk-in load by its capacity (without them
// the subproblem residuals could go negative). Steerable coverage is enforced
// lazily: a subset U of origins yields the cut
//
//   sum_{v in U} d_v + sum_{k in N(U)} sum_{v} u_v w_vk
//     <= sum_{l in N_L(U)} bhat x_l + sum_{p in N_P(U)} bbar_p
//
// where N(U) collects every facility some member of U can be steered to.
// Violated subsets come from a max-flow min-cut on the assignment network or
// from an equivalent covering LP; the loop adds one cut per round until the
// flow check passes. Interval-robust solves run the same loop with demands
// replaced by their upper bounds.

#include <string>
#include <vector>

#include "mmu/compact.hpp"
#include "mmu/milp.hpp"
#include "mmu/problem.hpp"

namespace mmu {

enum class DemandMode { nominal, worstcase };
DemandVector demands_for(const Problem& pb, DemandMode mode);

enum class SeparationKind { mincut, lp };

struct SeparationResult {
  bool violated = false;
  std::vector<int> U;        // origin indices, sorted ascending
  long long violation = 0;   // cut slack; negative exactly when violated
  double value = 0.0;        // separation objective (0 for the flow check)
  std::vector<int> witness_cut;      // min-cut source side (node ids)
  std::vector<double> witness_duals; // covering LP point: o per origin, then n per facility
};

// Walk-in load rows. deterministic: sum_v u_v w_vk <= cap_k. interval: same
// with tau_v. budgeted: per facility a dual certificate (eps_v, kap_v, rho)
// with  sum_v (tau_v eps_v - sigma_v kap_v) + Gamma2 rho <= cap_k  and
// eps_v - kap_v + rho >= w_vk for every origin v.
void enforce_assumption1(milp::Model& m, const CoreVars& vars, const Problem& pb,
                         UncertaintyKind kind);

// Slack of the cut for U at (x, route): RHS - LHS as above, routed walk-ins
// counting toward any facility in N(U). Route must be normalized (closest
// operating).
long long evaluate_cut(const Problem& pb, const std::vector<int>& U,
                       const std::vector<int>& x, const RouteVector& route,
                       const DemandVector& dem);

// Both separators require nonnegative residual capacities (the master rows
// above guarantee this) and throw otherwise.
SeparationResult separate_mincut(const Problem& pb, const std::vector<int>& x,
                                 const RouteVector& route, const DemandVector& dem);
SeparationResult separate_lp(const Problem& pb, const std::vector<int>& x,
                             const RouteVector& route, const DemandVector& dem);

struct BendersOptions {
  DemandMode mode = DemandMode::nominal;
  SeparationKind separation = SeparationKind::mincut;
  milp::SolveConfig milp;
  int max_iterations = 1 << 20;
};

PlanSolve solve_benders(const Problem& pb, const BendersOptions& opt = {});

// Shared by the cut loops: append the cut for U to the master.
void add_coverage_cut(milp::Model& m, const CoreVars& vars, const Problem& pb,
                      const std::vector<int>& U, const DemandVector& dem);

// Facility keys reachable from U through steering (N(U)), sorted.
std::vector<int> steer_neighborhood(const Problem& pb, const std::vector<int>& U);

}  // namespace mmu

#endif  // MMU_BENDERS_HPP
