#ifndef MMU_PROBLEM_HPP
#define MMU_PROBLEM_HPP

// Index-compiled planning problem shared by all formulations.
//
// Facilities get one flat key each: sites first (key == site index), then
// practices (key == num_sites + practice index). A setup group is the unit
// that pays a setup cost; base instances have one singleton group per site,
// session expansions one group per base site spanning its session copies.
//
// The two consideration relations per origin are kept separately. The
// walk-in list is ordered and drives the closest-facility rows; the steerable
// list scopes the assignment variables, the flow network and the coverage
// cuts. Base instances use the same list for both. A flag records whether a
// site counts as operating for walk-ins when its setup indicator is 1 (base)
// or when it runs its session (expansion, binary x).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmu/expand.hpp"
#include "mmu/instance.hpp"
#include "mmu/plan.hpp"

namespace mmu {

struct ProblemOrigin {
  long long steerable = 0;  // d_v
  long long walkin = 0;     // u_v
  long long st_lo = 0, st_hi = 0;  // alpha_v, beta_v
  long long wk_lo = 0, wk_hi = 0;  // sigma_v, tau_v
  std::vector<Facility> walkin_cons;  // ordered, routing priority; ends at the
                                      // first practice (never routable beyond)
  std::vector<Facility> steer_cons;   // ordered, trim priority, full list
};

struct Problem {
  // Sites.
  std::vector<int> site_session_bound;  // b_l, 1 for expanded sites
  std::vector<int> site_group;
  // Practices.
  std::vector<long long> practice_cap;  // bbar_p
  // Setup groups.
  std::vector<long long> group_cost;  // c per group

  long long session_cost = 1;      // chat
  long long session_capacity = 1;  // bhat
  std::vector<ProblemOrigin> origins;
  UncertaintyModel uncertainty;

  // Operating rule for walk-ins: false -> site open iff its group's y is 1,
  // true -> site open iff the site's own session indicator x is 1.
  bool operate_by_sessions = false;

  // Ids for reporting. group_ids are the setup-paying entities (base sites).
  std::vector<std::string> site_ids, practice_ids, origin_ids, group_ids;

  int num_sites() const { return static_cast<int>(site_session_bound.size()); }
  int num_practices() const { return static_cast<int>(practice_cap.size()); }
  int num_origins() const { return static_cast<int>(origins.size()); }
  int num_groups() const { return static_cast<int>(group_cost.size()); }
  int num_facilities() const { return num_sites() + num_practices(); }

  int fkey(Facility f) const {
    return f.kind == FacilityKind::site ? f.index : num_sites() + f.index;
  }
  Facility facility(int key) const {
    return key < num_sites() ? site_ref(key) : practice_ref(key - num_sites());
  }
  const std::string& facility_id(Facility f) const {
    return f.kind == FacilityKind::site ? site_ids[f.index] : practice_ids[f.index];
  }
  // Weekly capacity under session vector x: bhat * x_l for sites, bbar_p for
  // practices.
  long long facility_cap(Facility f, const std::vector<int>& x) const {
    return f.kind == FacilityKind::site ? session_capacity * x[f.index]
                                        : practice_cap[f.index];
  }

  // Origins listing facility key k in their steerable consideration (N(k))
  // and in their walk-in consideration.
  std::vector<std::vector<int>> steer_origins_of;
  std::vector<std::vector<int>> walkin_origins_of;

  long long total_steerable() const;  // sum of d_v
};

Problem compile(const Instance& inst);
Problem compile(const ExpandedInstance& ex);

// Demand values a separation or cut evaluation works with. Nominal uses
// (d, u), worst-case the interval tops (beta, tau), a realization any fixed
// (xi, eta).
struct DemandVector {
  std::vector<long long> steerable, walkin;
};
DemandVector nominal_demands(const Problem& pb);
DemandVector worstcase_demands(const Problem& pb);

// Walk-in routes as positions into each origin's walkin_cons (-1 = none).
using RouteVector = std::vector<int>;

// Residual capacity per facility key after the routed walk-ins claimed their
// share: gamma_l = bhat*x_l - sum of routed walk-ins, gamma_p analogously
// with bbar_p. Negative entries mean the plan violates the standing
// assumption that walk-ins never exceed their target's capacity.
std::vector<long long> residual_capacities(const Problem& pb, const std::vector<int>& x,
                                           const RouteVector& route,
                                           const std::vector<long long>& walkin_demand);

// Plan conversion. y is per group, x per site, route per origin; assign rows
// align with steer_cons.
Plan make_plan(const Problem& pb, const std::vector<int>& y, const std::vector<int>& x,
               const RouteVector& route,
               const std::optional<std::vector<std::vector<long long>>>& assign,
               long long objective);

}  // namespace mmu

#endif  // MMU_PROBLEM_HPP
