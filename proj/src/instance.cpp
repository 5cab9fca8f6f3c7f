#include "mmu/instance.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace mmu {

namespace {

template <class T>
int index_of(const std::vector<T>& items, const std::string& id) {
  for (int i = 0; i < static_cast<int>(items.size()); ++i)
    if (items[i].id == id) return i;
  return -1;
}

}  // namespace

void Instance::resolve_references() {
  std::unordered_map<std::string, Facility> by_id;
  for (int l = 0; l < static_cast<int>(sites.size()); ++l) by_id[sites[l].id] = site_ref(l);
  for (int p = 0; p < static_cast<int>(practices.size()); ++p)
    by_id[practices[p].id] = practice_ref(p);
  for (auto& v : origins)
    for (auto& e : v.consideration) {
      auto it = by_id.find(e.facility_id);
      e.fac = it == by_id.end() ? Facility{FacilityKind::site, -1} : it->second;
    }
}

int Instance::site_index(const std::string& id) const { return index_of(sites, id); }
int Instance::practice_index(const std::string& id) const { return index_of(practices, id); }
int Instance::origin_index(const std::string& id) const { return index_of(origins, id); }

const std::string& Instance::facility_id(Facility f) const {
  return f.kind == FacilityKind::site ? sites.at(f.index).id : practices.at(f.index).id;
}

int Instance::facility_weekly_cap(Facility f, const std::vector<int>& sessions) const {
  if (f.kind == FacilityKind::practice) return practices.at(f.index).capacity;
  return session_capacity * sessions.at(f.index);
}

std::vector<std::string> validate_instance(const Instance& inst) {
  std::vector<std::string> out;
  auto add = [&out](const std::string& msg) { out.push_back(msg); };

  std::unordered_set<std::string> seen;
  auto check_id = [&](const std::string& id, const char* what) {
    if (id.empty()) add(std::string(what) + " with empty id");
    if (!seen.insert(id).second) add("duplicate id '" + id + "'");
  };

  for (const auto& s : inst.sites) {
    check_id(s.id, "site");
    if (s.setup_cost < 0) add("site '" + s.id + "': negative setup_cost");
    if (s.session_cap < 0) add("site '" + s.id + "': negative session_cap");
  }
  for (const auto& p : inst.practices) {
    check_id(p.id, "practice");
    if (p.capacity < 0) add("practice '" + p.id + "': negative capacity");
  }
  if (inst.session_cost < 1) add("session_cost must be a positive integer");
  if (inst.session_capacity < 1) add("session_capacity must be a positive integer");

  long long sum_alpha = 0, sum_beta = 0, sum_sigma = 0, sum_tau = 0;
  for (const auto& v : inst.origins) {
    check_id(v.id, "origin");
    if (v.steerable < 0 || v.walkin < 0) add("origin '" + v.id + "': negative demand");
    if (v.steerable_lo < 0 || v.steerable_lo > v.steerable_hi)
      add("origin '" + v.id + "': steerable bounds violate 0 <= lo <= hi");
    if (v.walkin_lo < 0 || v.walkin_lo > v.walkin_hi)
      add("origin '" + v.id + "': walk-in bounds violate 0 <= lo <= hi");
    sum_alpha += v.steerable_lo;
    sum_beta += v.steerable_hi;
    sum_sigma += v.walkin_lo;
    sum_tau += v.walkin_hi;

    if (v.consideration.empty() && v.steerable + v.walkin > 0)
      add("origin '" + v.id + "': positive demand but empty consideration set");

    std::unordered_set<std::string> facs;
    for (size_t i = 0; i < v.consideration.size(); ++i) {
      const auto& e = v.consideration[i];
      if (e.fac.index < 0)
        add("origin '" + v.id + "' references unknown facility '" + e.facility_id + "'");
      if (e.distance_m < 0)
        add("origin '" + v.id + "': negative distance to '" + e.facility_id + "'");
      if (!facs.insert(e.facility_id).second)
        add("origin '" + v.id + "': facility '" + e.facility_id + "' listed twice");
      if (i > 0) {
        const auto& prev = v.consideration[i - 1];
        bool ordered = prev.distance_m < e.distance_m ||
                       (prev.distance_m == e.distance_m && prev.facility_id < e.facility_id);
        if (!ordered)
          add("origin '" + v.id + "': consideration order breaks (distance, id) rule between '" +
              prev.facility_id + "' and '" + e.facility_id + "'");
      }
    }
  }

  if (inst.uncertainty.kind == UncertaintyKind::budgeted) {
    if (inst.uncertainty.gamma_steerable < sum_alpha)
      add("empty uncertainty set: Gamma1 < sum of steerable lower bounds");
    if (inst.uncertainty.gamma_steerable > sum_beta)
      add("Gamma1 exceeds sum of steerable upper bounds");
    if (inst.uncertainty.gamma_walkin < sum_sigma)
      add("empty uncertainty set: Gamma2 < sum of walk-in lower bounds");
    if (inst.uncertainty.gamma_walkin > sum_tau)
      add("Gamma2 exceeds sum of walk-in upper bounds");
  }
  return out;
}

void require_valid(const Instance& inst) {
  auto diags = validate_instance(inst);
  if (diags.empty()) return;
  std::ostringstream msg;
  msg << "invalid instance (" << diags.size() << " problems):";
  for (const auto& d : diags) msg << "\n  - " << d;
  throw ModelError(msg.str());
}

std::optional<Facility> closest_operating_facility(const Instance& inst, int origin,
                                                   const std::vector<uint8_t>& site_open) {
  for (const auto& e : inst.origins.at(origin).consideration) {
    if (e.fac.kind == FacilityKind::practice) return e.fac;
    if (e.fac.index >= 0 && site_open.at(e.fac.index)) return e.fac;
  }
  return std::nullopt;
}

}  // namespace mmu
