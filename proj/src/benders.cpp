#include "mmu/benders.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mmu/maxflow.hpp"

namespace mmu {

DemandVector demands_for(const Problem& pb, DemandMode mode) {
  return mode == DemandMode::nominal ? nominal_demands(pb) : worstcase_demands(pb);
}

namespace {

// Position of facility key k in origin v's walk-in consideration, -1 if absent.
int walkin_pos(const Problem& pb, int v, int key) {
  const auto& cons = pb.origins[v].walkin_cons;
  for (size_t i = 0; i < cons.size(); ++i)
    if (pb.fkey(cons[i]) == key) return static_cast<int>(i);
  return -1;
}

void check_residuals(const Problem& pb, const std::vector<long long>& gamma) {
  for (int k = 0; k < pb.num_facilities(); ++k)
    if (gamma[k] < 0)
      throw ModelError("negative residual capacity at facility '" +
                       pb.facility_id(pb.facility(k)) +
                       "': the master must carry the walk-in capacity rows");
}

}  // namespace

void enforce_assumption1(milp::Model& m, const CoreVars& vars, const Problem& pb,
                         UncertaintyKind kind) {
  const int K = pb.num_facilities();
  const int V = pb.num_origins();

  if (kind != UncertaintyKind::budgeted) {
    // sum_v load_v * w_vk <= cap_k with the nominal or upper-bound walk-ins.
    for (int k = 0; k < K; ++k) {
      std::vector<milp::Term> row;
      for (int v : pb.walkin_origins_of[k]) {
        long long load = kind == UncertaintyKind::deterministic ? pb.origins[v].walkin
                                                                : pb.origins[v].wk_hi;
        if (load != 0) row.push_back({vars.w[v][walkin_pos(pb, v, k)], double(load)});
      }
      Facility f = pb.facility(k);
      if (f.kind == FacilityKind::site) {
        row.push_back({vars.x[f.index], -double(pb.session_capacity)});
        m.add_constraint(row, milp::RowSense::le, 0.0);
      } else if (!row.empty()) {
        m.add_constraint(row, milp::RowSense::le, double(pb.practice_cap[f.index]));
      }
    }
    return;
  }

  // Budgeted: per facility a dual certificate that the worst-case walk-in
  // load stays within capacity. Every origin gets a row, including those that
  // cannot route to k: their sigma_v still relieves the budget.
  long long gamma2 = pb.uncertainty.gamma_walkin;
  for (int k = 0; k < K; ++k) {
    std::vector<int> eps(V), kap(V);
    for (int v = 0; v < V; ++v) {
      eps[v] = m.add_var(0, milp::kInf, milp::VarType::continuous, 0.0);
      kap[v] = m.add_var(0, milp::kInf, milp::VarType::continuous, 0.0);
    }
    int rho = m.add_var(0, milp::kInf, milp::VarType::continuous, 0.0);

    std::vector<milp::Term> value;
    for (int v = 0; v < V; ++v) {
      if (pb.origins[v].wk_hi != 0) value.push_back({eps[v], double(pb.origins[v].wk_hi)});
      if (pb.origins[v].wk_lo != 0) value.push_back({kap[v], -double(pb.origins[v].wk_lo)});
    }
    value.push_back({rho, double(gamma2)});
    Facility f = pb.facility(k);
    if (f.kind == FacilityKind::site) {
      value.push_back({vars.x[f.index], -double(pb.session_capacity)});
      m.add_constraint(value, milp::RowSense::le, 0.0);
    } else {
      m.add_constraint(value, milp::RowSense::le, double(pb.practice_cap[f.index]));
    }

    for (int v = 0; v < V; ++v) {
      std::vector<milp::Term> row{{eps[v], 1.0}, {kap[v], -1.0}, {rho, 1.0}};
      int pos = walkin_pos(pb, v, k);
      if (pos >= 0) row.push_back({vars.w[v][pos], -1.0});
      m.add_constraint(row, milp::RowSense::ge, 0.0);
    }
  }
}

std::vector<int> steer_neighborhood(const Problem& pb, const std::vector<int>& U) {
  std::set<int> keys;
  for (int v : U)
    for (const Facility& f : pb.origins[v].steer_cons) keys.insert(pb.fkey(f));
  return {keys.begin(), keys.end()};
}

long long evaluate_cut(const Problem& pb, const std::vector<int>& U,
                       const std::vector<int>& x, const RouteVector& route,
                       const DemandVector& dem) {
  std::vector<int> keys = steer_neighborhood(pb, U);
  std::vector<uint8_t> in_nu(pb.num_facilities(), 0);
  long long rhs = 0;
  for (int k : keys) {
    in_nu[k] = 1;
    rhs += pb.facility_cap(pb.facility(k), x);
  }

  long long lhs = 0;
  for (int v : U) lhs += dem.steerable[v];
  for (int v = 0; v < pb.num_origins(); ++v) {
    if (route[v] < 0) continue;
    if (in_nu[pb.fkey(pb.origins[v].walkin_cons[route[v]])]) lhs += dem.walkin[v];
  }
  return rhs - lhs;
}

SeparationResult separate_mincut(const Problem& pb, const std::vector<int>& x,
                                 const RouteVector& route, const DemandVector& dem) {
  std::vector<long long> gamma = residual_capacities(pb, x, route, dem.walkin);
  check_residuals(pb, gamma);
  BendersNetwork bn = build_benders_network(pb, dem.steerable, gamma);

  SeparationResult res;
  long long flow = bn.net.max_flow(bn.source, bn.sink);
  if (flow == bn.total_demand) return res;

  std::vector<uint8_t> side = bn.net.min_cut_source_side(bn.source);
  for (int v = 0; v < pb.num_origins(); ++v)
    if (side[1 + v]) {
      res.U.push_back(v);
      res.witness_cut.push_back(1 + v);
    }
  for (int k = 0; k < pb.num_facilities(); ++k)
    if (side[1 + pb.num_origins() + k]) res.witness_cut.push_back(1 + pb.num_origins() + k);

  res.violated = true;
  res.violation = evaluate_cut(pb, res.U, x, route, dem);
  res.value = double(bn.total_demand - flow);
  if (res.violation >= 0)
    throw ModelError("min-cut separation produced a non-violated subset");
  return res;
}

SeparationResult separate_lp(const Problem& pb, const std::vector<int>& x,
                             const RouteVector& route, const DemandVector& dem) {
  std::vector<long long> gamma = residual_capacities(pb, x, route, dem.walkin);
  check_residuals(pb, gamma);

  // max sum_v d_v o_v - sum_k gamma_k n_k  s.t.  o_v <= n_k for steerable
  // pairs, all variables in [0,1]. The constraint matrix is an interval
  // system, so some optimal vertex is integral and reads off a subset U.
  const int V = pb.num_origins();
  const int K = pb.num_facilities();
  milp::Model m(milp::Sense::maximize);
  std::vector<int> o(V), n(K);
  for (int v = 0; v < V; ++v)
    o[v] = m.add_var(0, 1, milp::VarType::continuous, double(dem.steerable[v]));
  for (int k = 0; k < K; ++k)
    n[k] = m.add_var(0, 1, milp::VarType::continuous, -double(gamma[k]));
  for (int v = 0; v < V; ++v)
    for (const Facility& f : pb.origins[v].steer_cons)
      m.add_constraint({{o[v], 1.0}, {n[pb.fkey(f)], -1.0}}, milp::RowSense::le, 0.0);

  milp::SolveOutcome out = m.solve();
  if (out.status != milp::Status::optimal)
    throw ModelError("covering separation LP did not solve to optimality");

  SeparationResult res;
  res.value = out.objective;
  res.witness_duals.reserve(V + K);
  for (int v = 0; v < V; ++v) res.witness_duals.push_back(out.values[o[v]]);
  for (int k = 0; k < K; ++k) res.witness_duals.push_back(out.values[n[k]]);
  if (out.objective <= 1e-6) return res;

  for (int v = 0; v < V; ++v)
    if (out.values[o[v]] >= 0.5) res.U.push_back(v);
  res.violated = true;
  res.violation = evaluate_cut(pb, res.U, x, route, dem);
  if (res.violation >= 0)
    throw ModelError("covering LP separation produced a non-violated subset");
  return res;
}

void add_coverage_cut(milp::Model& m, const CoreVars& vars, const Problem& pb,
                      const std::vector<int>& U, const DemandVector& dem) {
  std::vector<int> keys = steer_neighborhood(pb, U);
  std::vector<milp::Term> row;
  long long rhs = 0;
  for (int k : keys) {
    Facility f = pb.facility(k);
    if (f.kind == FacilityKind::site)
      row.push_back({vars.x[f.index], -double(pb.session_capacity)});
    else
      rhs += pb.practice_cap[f.index];
    for (int v : pb.walkin_origins_of[k])
      if (dem.walkin[v] != 0)
        row.push_back({vars.w[v][walkin_pos(pb, v, k)], double(dem.walkin[v])});
  }
  for (int v : U) rhs -= dem.steerable[v];
  m.add_constraint(row, milp::RowSense::le, double(rhs));
}

namespace {

// Nominal steerable assignment for a finished plan; empty when the nominal
// demands do not fit (possible for robust plans on inconsistent data).
std::optional<AssignMatrix> nominal_completion(const Problem& pb, const std::vector<int>& x,
                                               const RouteVector& route) {
  DemandVector nom = nominal_demands(pb);
  std::vector<long long> gamma = residual_capacities(pb, x, route, nom.walkin);
  for (long long g : gamma)
    if (g < 0) return std::nullopt;
  BendersNetwork bn = build_benders_network(pb, nom.steerable, gamma);
  if (bn.net.max_flow(bn.source, bn.sink) != bn.total_demand) return std::nullopt;
  return recover_assignment(pb, bn);
}

}  // namespace

PlanSolve solve_benders(const Problem& pb, const BendersOptions& opt) {
  milp::Model master(milp::Sense::minimize);
  CoreVars vars = append_core(master, pb);
  UncertaintyKind load_kind = opt.mode == DemandMode::nominal ? UncertaintyKind::deterministic
                                                              : UncertaintyKind::interval;
  enforce_assumption1(master, vars, pb, load_kind);
  DemandVector dem = demands_for(pb, opt.mode);

  PlanSolve res;
  std::set<std::vector<int>> pool;
  for (int iter = 1; iter <= opt.max_iterations; ++iter) {
    milp::SolveOutcome out = master.solve(opt.milp);
    res.iterations = iter;
    if (out.status != milp::Status::optimal) {
      res.status = out.status;
      return res;
    }

    std::vector<int> x = extract_ints(out.values, vars.x);
    RouteVector route = extract_route(pb, out.values, vars.w);
    SeparationResult sep = opt.separation == SeparationKind::mincut
                               ? separate_mincut(pb, x, route, dem)
                               : separate_lp(pb, x, route, dem);

    long long obj = std::llround(out.objective);
    std::ostringstream line;
    line << "iter=" << iter << " obj=" << obj << " violated_U_size=" << sep.U.size()
         << " slack=" << sep.violation;
    res.log.push_back(line.str());

    if (!sep.violated) {
      res.status = milp::Status::optimal;
      res.objective = obj;
      std::vector<int> y = extract_ints(out.values, vars.y);
      res.plan = make_plan(pb, y, x, route, nominal_completion(pb, x, route), obj);
      return res;
    }

    if (!pool.insert(sep.U).second)
      throw ModelError("separation returned an already-cut subset; loop would not terminate");
    res.cut_pool.push_back(sep.U);
    add_coverage_cut(master, vars, pb, sep.U, dem);
  }
  throw ModelError("cut loop exceeded the iteration limit");
}

}  // namespace mmu
