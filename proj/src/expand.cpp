#include "mmu/expand.hpp"

#include <algorithm>

namespace mmu {

namespace {

// Even split of x over nsess sessions, remainder to the earliest ones.
// Monotone in x for each fixed slot, so lo <= hi survives splitting.
int split_even(int x, int nsess, int slot) {
  return x / nsess + (slot < x % nsess ? 1 : 0);
}

}  // namespace

ExpandedInstance expand_sessions(const Instance& base, const std::vector<std::string>& labels,
                                 const std::map<std::pair<std::string, std::string>, int>& caps,
                                 SteerableScope scope) {
  if (labels.empty()) throw ModelError("expand_sessions: need at least one session label");
  {
    std::vector<std::string> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ModelError("expand_sessions: duplicate session label");
  }
  require_valid(base);
  const int T = static_cast<int>(labels.size());

  ExpandedInstance ex;
  ex.session_labels = labels;
  ex.inst.session_cost = base.session_cost;
  ex.inst.session_capacity = base.session_capacity;
  ex.inst.uncertainty = base.uncertainty;

  for (int l = 0; l < static_cast<int>(base.sites.size()); ++l) {
    ex.base_site_ids.push_back(base.sites[l].id);
    ex.group_setup_cost.push_back(base.sites[l].setup_cost);
    ex.setup_groups.emplace_back();
    for (int t = 0; t < T; ++t) {
      Site s = base.sites[l];
      s.id = base.sites[l].id + "@" + labels[t];
      s.session_cap = 1;
      int idx = static_cast<int>(ex.inst.sites.size());
      ex.inst.sites.push_back(std::move(s));
      ex.setup_groups[l].push_back(idx);
      ex.site_group.push_back(l);
      ex.site_session.push_back(t);
      ex.base_site_of.push_back(l);
    }
  }
  for (int p = 0; p < static_cast<int>(base.practices.size()); ++p) {
    for (int t = 0; t < T; ++t) {
      Practice pr = base.practices[p];
      pr.id = base.practices[p].id + "@" + labels[t];
      auto it = caps.find({base.practices[p].id, labels[t]});
      if (it != caps.end()) {
        if (it->second < 0) throw ModelError("expand_sessions: negative session capacity");
        pr.capacity = it->second;
      }
      ex.inst.practices.push_back(std::move(pr));
      ex.practice_session.push_back(t);
      ex.base_practice_of.push_back(p);
    }
  }
  for (const auto& key : caps)
    if (base.practice_index(key.first.first) < 0 ||
        std::find(labels.begin(), labels.end(), key.first.second) == labels.end())
      throw ModelError("expand_sessions: capacity override for unknown (practice, session) (" +
                       key.first.first + ", " + key.first.second + ")");

  auto expanded_fac = [&](Facility base_fac, int t) {
    return base_fac.kind == FacilityKind::site ? site_ref(base_fac.index * T + t)
                                               : practice_ref(base_fac.index * T + t);
  };
  auto expanded_id = [&](Facility f) {
    return f.kind == FacilityKind::site ? ex.inst.sites[f.index].id
                                        : ex.inst.practices[f.index].id;
  };

  for (const auto& v : base.origins) {
    for (int t = 0; t < T; ++t) {
      DemandOrigin o;
      o.id = v.id + "@" + labels[t];
      o.coord = v.coord;
      o.steerable = split_even(v.steerable, T, t);
      o.walkin = split_even(v.walkin, T, t);
      o.steerable_lo = split_even(v.steerable_lo, T, t);
      o.steerable_hi = split_even(v.steerable_hi, T, t);
      o.walkin_lo = split_even(v.walkin_lo, T, t);
      o.walkin_hi = split_even(v.walkin_hi, T, t);
      for (const auto& e : v.consideration) {
        ConsiderEntry ce;
        Facility f = expanded_fac(e.fac, t);
        ce.facility_id = expanded_id(f);
        ce.distance_m = e.distance_m;
        ce.fac = f;
        o.consideration.push_back(std::move(ce));
      }
      ex.inst.origins.push_back(std::move(o));
      ex.base_origin_ids.push_back(v.id);
      ex.origin_session.push_back(t);

      std::vector<std::pair<std::pair<int, std::string>, Facility>> steer;
      for (const auto& e : v.consideration) {
        if (scope == SteerableScope::same_session) {
          Facility f = expanded_fac(e.fac, t);
          steer.push_back({{e.distance_m, expanded_id(f)}, f});
        } else {
          for (int t2 = 0; t2 < T; ++t2) {
            Facility f = expanded_fac(e.fac, t2);
            steer.push_back({{e.distance_m, expanded_id(f)}, f});
          }
        }
      }
      std::sort(steer.begin(), steer.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::vector<Facility> row;
      for (auto& s : steer) row.push_back(s.second);
      ex.steerable_consideration.push_back(std::move(row));
    }
  }

  ex.inst.resolve_references();
  require_valid(ex.inst);
  return ex;
}

Facility base_facility(const ExpandedInstance& ex, Facility expanded) {
  if (expanded.kind == FacilityKind::site)
    return site_ref(ex.base_site_of.at(expanded.index));
  return practice_ref(ex.base_practice_of.at(expanded.index));
}

long long plan_cost(const ExpandedInstance& ex, const Plan& plan) {
  long long cost = 0;
  std::vector<uint8_t> group_used(ex.setup_groups.size(), 0);
  for (const auto& [site_id, x] : plan.sessions) {
    if (x <= 0) continue;
    int s = ex.inst.site_index(site_id);
    if (s < 0) throw ModelError("plan_cost: unknown expanded site '" + site_id + "'");
    group_used[ex.site_group[s]] = 1;
    cost += static_cast<long long>(ex.inst.session_cost) * x;
  }
  for (size_t g = 0; g < group_used.size(); ++g)
    if (group_used[g]) cost += ex.group_setup_cost[g];
  return cost;
}

}  // namespace mmu
