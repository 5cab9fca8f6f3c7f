#ifndef MMU_INSTANCE_HPP
#define MMU_INSTANCE_HPP

// Planning instance for a fleet of mobile medical units.
//
// A site l can be set up at cost c_l and then operate up to b_l weekly
// sessions; every session costs chat and serves at most bhat patients.
// A practice p is always open and serves up to bbar_p patients per week.
// Each demand origin v has steerable demand d_v, which may be assigned to
// any facility in its consideration set, and walk-in demand u_v, which
// always shows up at the closest operating facility of that set.
// Consideration lists are ordered by distance with ties broken by facility
// id; that order is the routing priority used everywhere.
//
// Uncertain variants replace d_v by an interval [alpha_v, beta_v] and u_v by
// [sigma_v, tau_v]; the budgeted model additionally caps the steerable and
// walk-in totals by Gamma1 and Gamma2.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mmu/core.hpp"

namespace mmu {

struct Site {
  std::string id;
  int setup_cost = 0;   // c_l
  int session_cap = 0;  // b_l, max weekly sessions once set up
  Point coord;
};

struct Practice {
  std::string id;
  int capacity = 0;  // bbar_p, weekly patients
  Point coord;
};

// One entry of an origin's ordered consideration list. `fac` is resolved from
// `facility_id` after loading; index stays -1 for unknown ids so validation
// can report them.
struct ConsiderEntry {
  std::string facility_id;
  int distance_m = 0;
  Facility fac{FacilityKind::site, -1};
};

struct DemandOrigin {
  std::string id;
  int steerable = 0;  // d_v
  int walkin = 0;     // u_v
  // Interval bounds; degenerate (lo == hi == nominal) for deterministic data.
  int steerable_lo = 0;  // alpha_v
  int steerable_hi = 0;  // beta_v
  int walkin_lo = 0;     // sigma_v
  int walkin_hi = 0;     // tau_v
  std::vector<ConsiderEntry> consideration;
  Point coord;
};

enum class UncertaintyKind : uint8_t { deterministic, interval, budgeted };

struct UncertaintyModel {
  UncertaintyKind kind = UncertaintyKind::deterministic;
  long long gamma_steerable = 0;  // Gamma1, used when kind == budgeted
  long long gamma_walkin = 0;     // Gamma2
};

struct Instance {
  std::vector<Site> sites;
  std::vector<Practice> practices;
  std::vector<DemandOrigin> origins;
  int session_cost = 1;      // chat
  int session_capacity = 1;  // bhat
  UncertaintyModel uncertainty;

  // Fills ConsiderEntry::fac for every consideration entry. Unknown ids keep
  // index -1 and are reported by validate_instance.
  void resolve_references();

  int site_index(const std::string& id) const;      // -1 if absent
  int practice_index(const std::string& id) const;  // -1 if absent
  int origin_index(const std::string& id) const;    // -1 if absent

  const std::string& facility_id(Facility f) const;
  int facility_weekly_cap(Facility f, const std::vector<int>& sessions) const;
};

// Structural checks. Returns human-readable diagnostics, empty when the
// instance is well formed. Checked: nonnegative costs/caps/demands, interval
// bounds ordered, consideration lists present where demand is positive,
// list order consistent with distances (ties by facility id), references
// resolving, unique ids, positive session cost/capacity, and for budgeted
// instances nonempty uncertainty sets
// (sum alpha <= Gamma1 <= sum beta, sum sigma <= Gamma2 <= sum tau).
std::vector<std::string> validate_instance(const Instance& inst);

// Throws ModelError with all diagnostics when validate_instance is nonempty.
void require_valid(const Instance& inst);

// First facility of the origin's consideration list that is open: practices
// always, site l only when site_open[l] is nonzero. nullopt when every entry
// is a closed site.
std::optional<Facility> closest_operating_facility(const Instance& inst, int origin,
                                                   const std::vector<uint8_t>& site_open);

}  // namespace mmu

#endif  // MMU_INSTANCE_HPP
