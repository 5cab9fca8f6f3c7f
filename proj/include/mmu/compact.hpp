#ifndef MMU_COMPACT_HPP
#define MMU_COMPACT_HPP

// Compact deterministic formulation and the building blocks it shares with
// the decomposition masters.
//
// Variables: y per setup group (binary), x per site (integer up to the
// session bound), w per (origin, walk-in consideration position) (binary),
// and in the compact model z per (origin, steerable consideration position)
// (integer). Shared rows:
//   coupling      x_l <= b_l * y_g(l)
//   cover         sum_i w_vi >= 1
//   closest-open  w for a site position is tied to that site operating, and
//                 each position must take the walk-ins unless a closer one
//                 already did (practices count as always open).
// The compact model adds demand rows (every origin's steerable demand
// assigned) and capacity rows (steerable plus walk-in load within bhat*x_l
// and bbar_p); the decomposition masters replace those with cuts.

#include <optional>
#include <string>
#include <vector>

#include "mmu/milp.hpp"
#include "mmu/plan.hpp"
#include "mmu/problem.hpp"

namespace mmu {

struct CoreVars {
  std::vector<int> y;               // per group
  std::vector<int> x;               // per site
  std::vector<std::vector<int>> w;  // per origin, per walkin_cons position
};

// Objective (setup + session costs) plus the shared rows above.
CoreVars append_core(milp::Model& m, const Problem& pb);

struct CompactVars {
  CoreVars core;
  std::vector<std::vector<int>> z;  // per origin, per steer_cons position
};

milp::Model build_compact(const Problem& pb, CompactVars* vars = nullptr);

// Outcome of any of the plan solvers in this project.
struct PlanSolve {
  milp::Status status = milp::Status::infeasible;
  long long objective = 0;
  std::optional<Plan> plan;
  int iterations = 0;              // cut loop rounds; 0 for the compact model
  std::vector<std::string> log;    // one line per cut round
  std::vector<std::vector<int>> cut_pool;  // added U sets, each sorted
};

PlanSolve solve_compact(const Problem& pb, const milp::SolveConfig& cfg = {});

// Extraction helpers shared by the solvers (values come from the backend
// with integer variables already exactly integral).
std::vector<int> extract_ints(const std::vector<double>& values, const std::vector<int>& ids);
// First position with w = 1 per origin (-1 when the row is all zero).
RouteVector extract_route(const Problem& pb, const std::vector<double>& values,
                          const std::vector<std::vector<int>>& w);

}  // namespace mmu

#endif  // MMU_COMPACT_HPP
