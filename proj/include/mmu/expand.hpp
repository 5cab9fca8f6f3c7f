#ifndef MMU_EXPAND_HPP
#define MMU_EXPAND_HPP

// Session-specific expansion. Every base facility is copied once per session
// label, expanded sites get session_cap 1 (a unit either services that
// session or not), and a setup group ties the copies of one base site
// together so its setup cost is paid once. Base origins split into one copy
// per session; walk-ins of (v, t) only reach facilities of session t, while
// steerable demand may be spread over other sessions depending on the scope
// rule.
//
// Demands (nominal and interval bounds) are split evenly over the sessions,
// remainders going to the earliest sessions. Budgets Gamma stay weekly
// totals and carry over unchanged. Per-session practice capacities come from
// the caps argument; pairs not listed keep the base weekly capacity. A cap of
// 0 models a practice that is closed during that session.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mmu/instance.hpp"
#include "mmu/plan.hpp"

namespace mmu {

enum class SteerableScope {
  all_sessions,  // steerable demand may use every session of a considered facility
  same_session,  // steerable demand is bound to its own session
};

struct ExpandedInstance {
  Instance inst;  // expanded facilities and origins, walk-in consideration per session
  std::vector<std::string> session_labels;

  // Setup groups: one per base site, listing the expanded site indices.
  std::vector<std::string> base_site_ids;
  std::vector<int> group_setup_cost;
  std::vector<std::vector<int>> setup_groups;
  std::vector<int> site_group;  // expanded site index -> group

  // Ordered steerable consideration per expanded origin ((distance, id) rule).
  std::vector<std::vector<Facility>> steerable_consideration;

  // Back references for flattening.
  std::vector<std::string> base_origin_ids;  // per expanded origin
  std::vector<int> origin_session;           // per expanded origin
  std::vector<int> site_session;             // per expanded site
  std::vector<int> practice_session;         // per expanded practice
  std::vector<int> base_site_of;             // expanded site -> base site index
  std::vector<int> base_practice_of;         // expanded practice -> base practice index
};

// caps keys are (practice id, session label).
ExpandedInstance expand_sessions(const Instance& base, const std::vector<std::string>& labels,
                                 const std::map<std::pair<std::string, std::string>, int>& caps,
                                 SteerableScope scope = SteerableScope::all_sessions);

// Expanded facility -> base facility. Inverse of the label attachment; every
// expanded facility maps to exactly one (base facility, session) pair.
Facility base_facility(const ExpandedInstance& ex, Facility expanded);

// Setup cost once per group with any running session, plus session costs.
// plan.setup is keyed by base site ids, plan.sessions by expanded site ids.
long long plan_cost(const ExpandedInstance& ex, const Plan& plan);

}  // namespace mmu

#endif  // MMU_EXPAND_HPP
