#include "mmu/compact.hpp"

#include <cmath>
#include <map>

namespace mmu {

CoreVars append_core(milp::Model& m, const Problem& pb) {
  CoreVars vars;
  const int S = pb.num_sites();

  vars.y.reserve(pb.group_cost.size());
  for (double cost : pb.group_cost)
    vars.y.push_back(m.add_var(0, 1, milp::VarType::integer, cost));

  vars.x.reserve(S);
  for (int s = 0; s < S; ++s)
    vars.x.push_back(m.add_var(0, pb.site_session_bound[s], milp::VarType::integer,
                               pb.session_cost));

  // Branch on the operating decisions first: once y and x are integral the
  // closest-open rows below pin every w, so the routing binaries never need
  // their own subtree.
  for (int id : vars.y) m.set_branch_priority(id, 1);
  for (int id : vars.x) m.set_branch_priority(id, 1);

  // x_l <= b_l * y_g(l)
  for (int s = 0; s < S; ++s)
    m.add_constraint({{vars.x[s], 1.0},
                      {vars.y[pb.site_group[s]], -double(pb.site_session_bound[s])}},
                     milp::RowSense::le, 0.0);

  // Walk-in routing. A position's "operating" indicator is y of the site's
  // group when sites operate as a whole, or x of the single-session site
  // when each session is its own column.
  auto operating_var = [&](int s) {
    return pb.operate_by_sessions ? vars.x[s] : vars.y[pb.site_group[s]];
  };

  vars.w.resize(pb.origins.size());
  for (size_t v = 0; v < pb.origins.size(); ++v) {
    const auto& cons = pb.origins[v].walkin_cons;
    auto& wv = vars.w[v];
    wv.reserve(cons.size());
    for (size_t i = 0; i < cons.size(); ++i)
      wv.push_back(m.add_var(0, 1, milp::VarType::integer, 0.0));

    // Exactly-one is implied by >= 1 plus the closest-open rows; the cover
    // row keeps the relaxation tight when the consideration set is all sites.
    std::vector<milp::Term> cover;
    for (int id : wv) cover.push_back({id, 1.0});
    m.add_constraint(cover, milp::RowSense::ge, 1.0);

    for (size_t i = 0; i < cons.size(); ++i) {
      if (cons[i].kind == FacilityKind::site) {
        const int s = cons[i].index;
        // w_vi <= operating(s)
        m.add_constraint({{wv[i], 1.0}, {operating_var(s), -1.0}},
                         milp::RowSense::le, 0.0);
        // w_vi >= operating(s) - sum of closer w
        std::vector<milp::Term> row{{wv[i], 1.0}, {operating_var(s), -1.0}};
        for (size_t j = 0; j < i; ++j) row.push_back({wv[j], 1.0});
        m.add_constraint(row, milp::RowSense::ge, 0.0);
      } else {
        // Practices are always open: w_vi >= 1 - sum of closer w.
        std::vector<milp::Term> row{{wv[i], 1.0}};
        for (size_t j = 0; j < i; ++j) row.push_back({wv[j], 1.0});
        m.add_constraint(row, milp::RowSense::ge, 1.0);
      }
    }
  }
  return vars;
}

milp::Model build_compact(const Problem& pb, CompactVars* out) {
  milp::Model m(milp::Sense::minimize);
  CompactVars vars;
  vars.core = append_core(m, pb);

  vars.z.resize(pb.origins.size());
  for (size_t v = 0; v < pb.origins.size(); ++v) {
    const auto& o = pb.origins[v];
    auto& zv = vars.z[v];
    zv.reserve(o.steer_cons.size());
    for (size_t i = 0; i < o.steer_cons.size(); ++i)
      zv.push_back(m.add_var(0, double(o.steerable), milp::VarType::integer, 0.0));

    if (o.steerable > 0) {
      std::vector<milp::Term> row;
      for (int id : zv) row.push_back({id, 1.0});
      m.add_constraint(row, milp::RowSense::ge, double(o.steerable));
    }
  }

  // Facility load rows: steerable assignments plus routed walk-ins within
  // capacity. Gathered per facility key across all origins.
  const int K = pb.num_sites() + pb.num_practices();
  std::vector<std::vector<milp::Term>> load(K);
  for (size_t v = 0; v < pb.origins.size(); ++v) {
    const auto& o = pb.origins[v];
    for (size_t i = 0; i < o.steer_cons.size(); ++i)
      load[pb.fkey(o.steer_cons[i])].push_back({vars.z[v][i], 1.0});
    if (o.walkin > 0)
      for (size_t i = 0; i < o.walkin_cons.size(); ++i)
        load[pb.fkey(o.walkin_cons[i])].push_back({vars.core.w[v][i], double(o.walkin)});
  }
  for (int k = 0; k < K; ++k) {
    Facility f = pb.facility(k);
    if (f.kind == FacilityKind::site) {
      if (load[k].empty()) continue;
      auto row = load[k];
      row.push_back({vars.core.x[f.index], -double(pb.session_capacity)});
      m.add_constraint(row, milp::RowSense::le, 0.0);
    } else {
      if (load[k].empty()) continue;
      m.add_constraint(load[k], milp::RowSense::le, double(pb.practice_cap[f.index]));
    }
  }

  if (out) *out = std::move(vars);
  return m;
}

std::vector<int> extract_ints(const std::vector<double>& values, const std::vector<int>& ids) {
  std::vector<int> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(int(std::llround(values[id])));
  return out;
}

RouteVector extract_route(const Problem& pb, const std::vector<double>& values,
                          const std::vector<std::vector<int>>& w) {
  RouteVector route(pb.origins.size(), -1);
  for (size_t v = 0; v < pb.origins.size(); ++v)
    for (size_t i = 0; i < w[v].size(); ++i)
      if (values[w[v][i]] > 0.5) {
        route[v] = int(i);
        break;
      }
  return route;
}

PlanSolve solve_compact(const Problem& pb, const milp::SolveConfig& cfg) {
  CompactVars vars;
  milp::Model m = build_compact(pb, &vars);
  milp::SolveOutcome out = milp::solve_model(m, cfg);

  PlanSolve res;
  res.status = out.status;
  if (out.status != milp::Status::optimal) return res;

  res.objective = std::llround(out.objective);
  std::vector<int> y = extract_ints(out.values, vars.core.y);
  std::vector<int> x = extract_ints(out.values, vars.core.x);
  RouteVector route = extract_route(pb, out.values, vars.core.w);

  AssignMatrix assign(pb.origins.size());
  for (size_t v = 0; v < pb.origins.size(); ++v) {
    std::vector<long long> zv;
    zv.reserve(vars.z[v].size());
    for (int id : vars.z[v]) zv.push_back(std::llround(out.values[id]));
    assign[v] = trim_assignment_row(pb.origins[v].steerable, zv);
  }

  res.plan = make_plan(pb, y, x, route, assign, res.objective);
  return res;
}

}  // namespace mmu
