#ifndef MMU_PLAN_HPP
#define MMU_PLAN_HPP

// A weekly operating plan: which sites are set up (y), how many sessions run
// at each (x), where each origin's walk-ins show up (w collapsed to a single
// facility per origin), and optionally a steerable assignment z.
//
// String-keyed maps keep plans portable across the JSON interface; solver
// internals use index-aligned rows (one entry per consideration position) and
// convert at the boundary.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmu/instance.hpp"

namespace mmu {

struct Plan {
  std::map<std::string, int> setup;                 // site id -> 0/1, y_l
  std::map<std::string, int> sessions;              // site id -> weekly sessions, x_l
  std::map<std::string, std::string> walkin_route;  // origin id -> facility id
  // origin id -> facility id -> patients; present when the producer attached a
  // steerable completion for the nominal demands.
  std::optional<std::map<std::string, std::map<std::string, long long>>> steerable_assign;
  long long cost = 0;
};

// Setup cost for every site running at least one session plus the per-session
// cost of all sessions.
long long plan_cost(const Instance& inst, const Plan& plan);

// Structural checks against an instance: known ids, sessions within
// session_cap * setup, walk-in targets operating facilities of the origin's
// consideration set, steerable assignment (when present) nonnegative, inside
// the consideration set and summing to the origin's nominal steerable demand.
std::vector<std::string> validate_plan(const Instance& inst, const Plan& plan);

// Walk-in indicator rows aligned with each origin's consideration list:
// w[v][i] refers to inst.origins[v].consideration[i].
using WalkinMatrix = std::vector<std::vector<uint8_t>>;

// Steerable assignment rows aligned the same way.
using AssignMatrix = std::vector<std::vector<long long>>;

// Keeps only the earliest 1 of each row. A routing that is feasible for the
// closest-facility constraints stays feasible: later 1s are redundant copies
// the model allows but never needs.
WalkinMatrix normalize_walkin_assignment(const Instance& inst, const WalkinMatrix& w);

// Reduces an over-assignment until each row sums to the demand, scanning the
// row in priority order and removing the surplus d_plus = sum(z) - demand
// from the earliest entries first: each position drops
// min(z_i, max(0, d_plus - prefix)) where prefix is the original row sum
// before position i.
std::vector<long long> trim_assignment_row(long long demand, const std::vector<long long>& z);

// Applies trim_assignment_row per origin with demand d_v. Rows must not sum
// below the demand.
AssignMatrix trim_steerable_assignment(const Instance& inst, const AssignMatrix& z);

}  // namespace mmu

#endif  // MMU_PLAN_HPP
