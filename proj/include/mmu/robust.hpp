#ifndef MMU_ROBUST_HPP
#define MMU_ROBUST_HPP

// Robust counterparts of the planning problem.
//
// Interval uncertainty needs no machinery of its own: every demand sits at
// its upper bound in the worst case, so the deterministic cut loop runs on
// (beta, tau) instead of (d, u).
//
// Budgeted uncertainty bounds total steerable demand by Gamma1 and total
// walk-in demand by Gamma2 on top of the per-origin boxes. Coverage of a
// subset U must hold for every demand vector in the set; the steerable side
// collapses to the constant
//
//   wc_steer(U) = min{ sum_{v in U} beta_v, Gamma1 - sum_{v not in U} alpha_v }
//
// while the walk-in side depends on the routing and enters the master through
// an LP-duality certificate (eps_v, kap_v, rho per added subset). Violated
// subsets come from a mixed-integer separation problem whose optimal value is
// the largest coverage violation across all U; the hardness of that problem
// is witnessed by an embedding of subset sum, reproduced here as a generator.

#include <vector>

#include "mmu/benders.hpp"
#include "mmu/compact.hpp"
#include "mmu/instance.hpp"
#include "mmu/milp.hpp"
#include "mmu/problem.hpp"

namespace mmu {

PlanSolve solve_interval(const Problem& pb, SeparationKind separation = SeparationKind::mincut,
                         const milp::SolveConfig& cfg = {});

// Closed forms for the worst-case demand a subset U attracts. Both require
// budgeted uncertainty. worst_case_walkin sums over origins whose walk-in
// route lands inside N(U).
long long worst_case_steerable(const Problem& pb, const std::vector<int>& U);
long long worst_case_walkin(const Problem& pb, const std::vector<int>& U,
                            const RouteVector& route);

struct BudgetedMaster {
  milp::Model model{milp::Sense::minimize};
  CoreVars vars;
  std::vector<std::vector<int>> pool;  // registered U sets, each sorted
};

// Master with the structural rows and the budgeted walk-in capacity
// certificates, but no coverage blocks yet.
BudgetedMaster build_budgeted_master(const Problem& pb);
// Registers U and appends its dual block: one value row tying the
// certificate to the capacity of N(U), one row per origin linking it to the
// routing variables. Re-registering a subset is an error.
void add_cut_block(BudgetedMaster& master, const Problem& pb, const std::vector<int>& U);

// Separation over all subsets at once: a MIP whose optimum is the largest
// coverage violation, and an exhaustive oracle for small instances.
// Both return value >= 0 with violated <=> value > 0 and violation = -value.
SeparationResult separate_budgeted_mip(const Problem& pb, const std::vector<int>& x,
                                       const RouteVector& route,
                                       const milp::SolveConfig& cfg = {});
SeparationResult separate_budgeted_bruteforce(const Problem& pb, const std::vector<int>& x,
                                              const RouteVector& route);

struct BudgetedOptions {
  milp::SolveConfig milp;
  int max_iterations = 1 << 20;
};

PlanSolve solve_budgeted(const Problem& pb, const BudgetedOptions& opt = {});

// Embedding of subset sum into budgeted separation: given positive values A
// and target B, builds an instance with one private practice per value, a
// shared practice of capacity B-1, steerable bounds beta_v = 2 a_v and
// Gamma1 = 2B. With the routing that sends every origin to its private
// practice, the separation value is positive exactly when some subset of A
// sums to B.
struct SubsetSumReduction {
  Instance instance;
  std::vector<int> x;  // no sites
  RouteVector route;   // each origin to its private practice
};
SubsetSumReduction build_subsetsum_reduction(const std::vector<long long>& values,
                                             long long target);

}  // namespace mmu

#endif  // MMU_ROBUST_HPP
