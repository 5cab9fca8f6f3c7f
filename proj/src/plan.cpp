#include "mmu/plan.hpp"

#include <algorithm>

namespace mmu {

long long plan_cost(const Instance& inst, const Plan& plan) {
  long long cost = 0;
  for (const auto& [site_id, x] : plan.sessions) {
    if (x <= 0) continue;
    int l = inst.site_index(site_id);
    if (l < 0) throw ModelError("plan_cost: unknown site '" + site_id + "'");
    cost += inst.sites[l].setup_cost + static_cast<long long>(inst.session_cost) * x;
  }
  return cost;
}

std::vector<std::string> validate_plan(const Instance& inst, const Plan& plan) {
  std::vector<std::string> out;
  auto add = [&out](const std::string& m) { out.push_back(m); };

  std::vector<uint8_t> open(inst.sites.size(), 0);
  for (const auto& [id, y] : plan.setup) {
    int l = inst.site_index(id);
    if (l < 0) {
      add("setup references unknown site '" + id + "'");
      continue;
    }
    if (y != 0 && y != 1) add("setup['" + id + "'] must be 0 or 1");
    open[l] = y != 0;
  }
  for (const auto& [id, x] : plan.sessions) {
    int l = inst.site_index(id);
    if (l < 0) {
      add("sessions references unknown site '" + id + "'");
      continue;
    }
    if (x < 0) add("sessions['" + id + "'] negative");
    int y = open[l] ? 1 : 0;
    if (x > inst.sites[l].session_cap * y)
      add("sessions['" + id + "'] exceeds session_cap * setup");
  }

  for (const auto& [vid, fid] : plan.walkin_route) {
    int v = inst.origin_index(vid);
    if (v < 0) {
      add("walkin_route references unknown origin '" + vid + "'");
      continue;
    }
    const auto& cons = inst.origins[v].consideration;
    auto it = std::find_if(cons.begin(), cons.end(),
                           [&](const ConsiderEntry& e) { return e.facility_id == fid; });
    if (it == cons.end()) {
      add("walkin_route['" + vid + "'] targets '" + fid + "' outside the consideration set");
      continue;
    }
    if (it->fac.kind == FacilityKind::site && it->fac.index >= 0 && !open[it->fac.index])
      add("walkin_route['" + vid + "'] targets closed site '" + fid + "'");
  }

  if (plan.steerable_assign) {
    for (const auto& [vid, row] : *plan.steerable_assign) {
      int v = inst.origin_index(vid);
      if (v < 0) {
        add("steerable_assign references unknown origin '" + vid + "'");
        continue;
      }
      long long total = 0;
      for (const auto& [fid, z] : row) {
        const auto& cons = inst.origins[v].consideration;
        bool known = std::any_of(cons.begin(), cons.end(),
                                 [&](const ConsiderEntry& e) { return e.facility_id == fid; });
        if (!known)
          add("steerable_assign['" + vid + "'] targets '" + fid +
              "' outside the consideration set");
        if (z < 0) add("steerable_assign['" + vid + "']['" + fid + "'] negative");
        total += z;
      }
      if (total != inst.origins[v].steerable)
        add("steerable_assign['" + vid + "'] sums to " + std::to_string(total) +
            ", expected steerable demand " + std::to_string(inst.origins[v].steerable));
    }
  }
  return out;
}

WalkinMatrix normalize_walkin_assignment(const Instance& inst, const WalkinMatrix& w) {
  if (w.size() != inst.origins.size())
    throw ModelError("normalize_walkin_assignment: row count mismatch");
  WalkinMatrix out(w.size());
  for (size_t v = 0; v < w.size(); ++v) {
    if (w[v].size() != inst.origins[v].consideration.size())
      throw ModelError("normalize_walkin_assignment: row width mismatch at origin '" +
                       inst.origins[v].id + "'");
    out[v].assign(w[v].size(), 0);
    for (size_t i = 0; i < w[v].size(); ++i)
      if (w[v][i]) {
        out[v][i] = 1;
        break;
      }
  }
  return out;
}

std::vector<long long> trim_assignment_row(long long demand, const std::vector<long long>& z) {
  long long total = 0;
  for (long long x : z) {
    if (x < 0) throw ModelError("trim_assignment_row: negative assignment");
    total += x;
  }
  if (total < demand) throw ModelError("trim_assignment_row: assignment below demand");
  long long surplus = total - demand;
  std::vector<long long> out(z.size());
  long long prefix = 0;  // sum of original z before this position
  for (size_t i = 0; i < z.size(); ++i) {
    long long drop = std::min(z[i], std::max<long long>(0, surplus - prefix));
    out[i] = z[i] - drop;
    prefix += z[i];
  }
  return out;
}

AssignMatrix trim_steerable_assignment(const Instance& inst, const AssignMatrix& z) {
  if (z.size() != inst.origins.size())
    throw ModelError("trim_steerable_assignment: row count mismatch");
  AssignMatrix out(z.size());
  for (size_t v = 0; v < z.size(); ++v)
    out[v] = trim_assignment_row(inst.origins[v].steerable, z[v]);
  return out;
}

}  // namespace mmu
