#include "mmu/problem.hpp"

#include <algorithm>

namespace mmu {

namespace {

void build_reverse_maps(Problem& pb) {
  pb.steer_origins_of.assign(pb.num_facilities(), {});
  pb.walkin_origins_of.assign(pb.num_facilities(), {});
  for (int v = 0; v < pb.num_origins(); ++v) {
    for (Facility f : pb.origins[v].steer_cons) pb.steer_origins_of[pb.fkey(f)].push_back(v);
    for (Facility f : pb.origins[v].walkin_cons) pb.walkin_origins_of[pb.fkey(f)].push_back(v);
  }
}

// Walk-ins go to the closest operating facility and practices always
// operate, so no position past an origin's first practice can ever receive
// them. Dropping those positions shrinks the routing blocks of every
// downstream model; steerable consideration keeps the full list.
void trim_walkin_lists(Problem& pb) {
  for (auto& o : pb.origins)
    for (size_t i = 0; i < o.walkin_cons.size(); ++i)
      if (o.walkin_cons[i].kind == FacilityKind::practice) {
        o.walkin_cons.resize(i + 1);
        break;
      }
}

void fill_common(Problem& pb, const Instance& inst) {
  pb.session_cost = inst.session_cost;
  pb.session_capacity = inst.session_capacity;
  pb.uncertainty = inst.uncertainty;
  for (const auto& s : inst.sites) {
    pb.site_session_bound.push_back(s.session_cap);
    pb.site_ids.push_back(s.id);
  }
  for (const auto& p : inst.practices) {
    pb.practice_cap.push_back(p.capacity);
    pb.practice_ids.push_back(p.id);
  }
  for (const auto& v : inst.origins) {
    ProblemOrigin o;
    o.steerable = v.steerable;
    o.walkin = v.walkin;
    o.st_lo = v.steerable_lo;
    o.st_hi = v.steerable_hi;
    o.wk_lo = v.walkin_lo;
    o.wk_hi = v.walkin_hi;
    for (const auto& e : v.consideration) o.walkin_cons.push_back(e.fac);
    pb.origins.push_back(std::move(o));
    pb.origin_ids.push_back(v.id);
  }
}

}  // namespace

long long Problem::total_steerable() const {
  long long d = 0;
  for (const auto& o : origins) d += o.steerable;
  return d;
}

Problem compile(const Instance& inst) {
  require_valid(inst);
  Problem pb;
  fill_common(pb, inst);
  for (int l = 0; l < pb.num_sites(); ++l) {
    pb.site_group.push_back(l);
    pb.group_cost.push_back(inst.sites[l].setup_cost);
    pb.group_ids.push_back(inst.sites[l].id);
  }
  for (auto& o : pb.origins) o.steer_cons = o.walkin_cons;
  trim_walkin_lists(pb);
  pb.operate_by_sessions = false;
  build_reverse_maps(pb);
  return pb;
}

Problem compile(const ExpandedInstance& ex) {
  require_valid(ex.inst);
  Problem pb;
  fill_common(pb, ex.inst);
  pb.site_group = ex.site_group;
  for (size_t g = 0; g < ex.setup_groups.size(); ++g) {
    pb.group_cost.push_back(ex.group_setup_cost[g]);
    pb.group_ids.push_back(ex.base_site_ids[g]);
  }
  for (int v = 0; v < pb.num_origins(); ++v)
    pb.origins[v].steer_cons = ex.steerable_consideration[v];
  trim_walkin_lists(pb);
  pb.operate_by_sessions = true;
  build_reverse_maps(pb);
  return pb;
}

DemandVector nominal_demands(const Problem& pb) {
  DemandVector d;
  for (const auto& o : pb.origins) {
    d.steerable.push_back(o.steerable);
    d.walkin.push_back(o.walkin);
  }
  return d;
}

DemandVector worstcase_demands(const Problem& pb) {
  DemandVector d;
  for (const auto& o : pb.origins) {
    d.steerable.push_back(o.st_hi);
    d.walkin.push_back(o.wk_hi);
  }
  return d;
}

std::vector<long long> residual_capacities(const Problem& pb, const std::vector<int>& x,
                                           const RouteVector& route,
                                           const std::vector<long long>& walkin_demand) {
  if (static_cast<int>(x.size()) != pb.num_sites())
    throw ModelError("residual_capacities: x size mismatch");
  if (static_cast<int>(route.size()) != pb.num_origins() ||
      static_cast<int>(walkin_demand.size()) != pb.num_origins())
    throw ModelError("residual_capacities: origin vector size mismatch");
  std::vector<long long> gamma(pb.num_facilities());
  for (int l = 0; l < pb.num_sites(); ++l) gamma[l] = pb.session_capacity * x[l];
  for (int p = 0; p < pb.num_practices(); ++p) gamma[pb.num_sites() + p] = pb.practice_cap[p];
  for (int v = 0; v < pb.num_origins(); ++v) {
    if (route[v] < 0) continue;
    Facility f = pb.origins[v].walkin_cons.at(route[v]);
    gamma[pb.fkey(f)] -= walkin_demand[v];
  }
  return gamma;
}

Plan make_plan(const Problem& pb, const std::vector<int>& y, const std::vector<int>& x,
               const RouteVector& route,
               const std::optional<std::vector<std::vector<long long>>>& assign,
               long long objective) {
  Plan plan;
  for (int g = 0; g < pb.num_groups(); ++g) plan.setup[pb.group_ids[g]] = y[g];
  for (int l = 0; l < pb.num_sites(); ++l) plan.sessions[pb.site_ids[l]] = x[l];
  for (int v = 0; v < pb.num_origins(); ++v)
    if (route[v] >= 0)
      plan.walkin_route[pb.origin_ids[v]] =
          pb.facility_id(pb.origins[v].walkin_cons.at(route[v]));
  if (assign) {
    std::map<std::string, std::map<std::string, long long>> out;
    for (int v = 0; v < pb.num_origins(); ++v) {
      std::map<std::string, long long> row;
      for (size_t i = 0; i < (*assign)[v].size(); ++i)
        if ((*assign)[v][i] != 0)
          row[pb.facility_id(pb.origins[v].steer_cons[i])] = (*assign)[v][i];
      out[pb.origin_ids[v]] = std::move(row);
    }
    plan.steerable_assign = std::move(out);
  }
  plan.cost = objective;
  return plan;
}

}  // namespace mmu
