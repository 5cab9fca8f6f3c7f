#include "mmu/robust.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mmu/maxflow.hpp"

namespace mmu {

PlanSolve solve_interval(const Problem& pb, SeparationKind separation,
                         const milp::SolveConfig& cfg) {
  BendersOptions opt;
  opt.mode = DemandMode::worstcase;
  opt.separation = separation;
  opt.milp = cfg;
  return solve_benders(pb, opt);
}

namespace {

void require_budgeted(const Problem& pb) {
  if (pb.uncertainty.kind != UncertaintyKind::budgeted)
    throw ModelError("operation requires budgeted uncertainty");
}

long long capacity_of(const Problem& pb, const std::vector<int>& keys,
                      const std::vector<int>& x) {
  long long cap = 0;
  for (int k : keys) cap += pb.facility_cap(pb.facility(k), x);
  return cap;
}

}  // namespace

long long worst_case_steerable(const Problem& pb, const std::vector<int>& U) {
  require_budgeted(pb);
  std::vector<uint8_t> in(pb.num_origins(), 0);
  long long tops = 0;
  for (int v : U) {
    in[v] = 1;
    tops += pb.origins[v].st_hi;
  }
  long long budget = pb.uncertainty.gamma_steerable;
  for (int v = 0; v < pb.num_origins(); ++v)
    if (!in[v]) budget -= pb.origins[v].st_lo;
  return std::min(tops, budget);
}

long long worst_case_walkin(const Problem& pb, const std::vector<int>& U,
                            const RouteVector& route) {
  require_budgeted(pb);
  std::vector<uint8_t> in_nu(pb.num_facilities(), 0);
  for (int k : steer_neighborhood(pb, U)) in_nu[k] = 1;

  long long tops = 0, budget = pb.uncertainty.gamma_walkin;
  for (int v = 0; v < pb.num_origins(); ++v) {
    bool routed_in = route[v] >= 0 && in_nu[pb.fkey(pb.origins[v].walkin_cons[route[v]])];
    if (routed_in)
      tops += pb.origins[v].wk_hi;
    else
      budget -= pb.origins[v].wk_lo;
  }
  return std::min(tops, budget);
}

BudgetedMaster build_budgeted_master(const Problem& pb) {
  require_budgeted(pb);
  BudgetedMaster master;
  master.vars = append_core(master.model, pb);
  enforce_assumption1(master.model, master.vars, pb, UncertaintyKind::budgeted);
  return master;
}

void add_cut_block(BudgetedMaster& master, const Problem& pb, const std::vector<int>& U) {
  std::vector<int> canon = U;
  std::sort(canon.begin(), canon.end());
  if (std::find(master.pool.begin(), master.pool.end(), canon) != master.pool.end())
    throw ModelError("coverage subset already registered in the budgeted master");

  const int V = pb.num_origins();
  milp::Model& m = master.model;
  std::vector<int> eps(V), kap(V);
  for (int v = 0; v < V; ++v) {
    eps[v] = m.add_var(0, milp::kInf, milp::VarType::continuous, 0.0);
    kap[v] = m.add_var(0, milp::kInf, milp::VarType::continuous, 0.0);
  }
  int rho = m.add_var(0, milp::kInf, milp::VarType::continuous, 0.0);

  // Value row: worst-case steerable demand of U plus the certified walk-in
  // load fit within the capacity reachable from U.
  std::vector<int> keys = steer_neighborhood(pb, canon);
  long long rhs = -worst_case_steerable(pb, canon);
  std::vector<milp::Term> value;
  for (int v = 0; v < V; ++v) {
    if (pb.origins[v].wk_hi != 0) value.push_back({eps[v], double(pb.origins[v].wk_hi)});
    if (pb.origins[v].wk_lo != 0) value.push_back({kap[v], -double(pb.origins[v].wk_lo)});
  }
  value.push_back({rho, double(pb.uncertainty.gamma_walkin)});
  for (int k : keys) {
    Facility f = pb.facility(k);
    if (f.kind == FacilityKind::site)
      value.push_back({master.vars.x[f.index], -double(pb.session_capacity)});
    else
      rhs += pb.practice_cap[f.index];
  }
  m.add_constraint(value, milp::RowSense::le, double(rhs));

  // Certificate rows: eps_v - kap_v + rho covers the routing indicators of v
  // that land inside N(U).
  std::vector<uint8_t> in_nu(pb.num_facilities(), 0);
  for (int k : keys) in_nu[k] = 1;
  for (int v = 0; v < V; ++v) {
    std::vector<milp::Term> row{{eps[v], 1.0}, {kap[v], -1.0}, {rho, 1.0}};
    const auto& cons = pb.origins[v].walkin_cons;
    for (size_t i = 0; i < cons.size(); ++i)
      if (in_nu[pb.fkey(cons[i])]) row.push_back({master.vars.w[v][i], -1.0});
    m.add_constraint(row, milp::RowSense::ge, 0.0);
  }

  master.pool.push_back(std::move(canon));
}

SeparationResult separate_budgeted_mip(const Problem& pb, const std::vector<int>& x,
                                       const RouteVector& route,
                                       const milp::SolveConfig& cfg) {
  require_budgeted(pb);
  const int V = pb.num_origins();
  const int K = pb.num_facilities();

  // max d1 + d2 - sum_k cap_k n_k. o picks the subset, n its neighborhood,
  // r the origins whose walk-in route lands inside it; d1 and d2 take the
  // worst-case box-plus-budget values on each side.
  milp::Model m(milp::Sense::maximize);
  std::vector<int> o(V), r(V), n(K);
  for (int v = 0; v < V; ++v) o[v] = m.add_var(0, 1, milp::VarType::integer, 0.0);
  for (int v = 0; v < V; ++v) {
    bool can_route = route[v] >= 0;
    r[v] = m.add_var(0, can_route ? 1 : 0, milp::VarType::integer, 0.0);
  }
  for (int k = 0; k < K; ++k)
    n[k] = m.add_var(0, 1, milp::VarType::integer,
                     -double(pb.facility_cap(pb.facility(k), x)));
  int d1 = m.add_var(0, milp::kInf, milp::VarType::continuous, 1.0);
  int d2 = m.add_var(0, milp::kInf, milp::VarType::continuous, 1.0);

  for (int v = 0; v < V; ++v)
    for (const Facility& f : pb.origins[v].steer_cons)
      m.add_constraint({{o[v], 1.0}, {n[pb.fkey(f)], -1.0}}, milp::RowSense::le, 0.0);

  // r_v can be on only if the routed facility is steerable-considered by
  // some selected origin.
  for (int v = 0; v < V; ++v) {
    if (route[v] < 0) continue;
    int key = pb.fkey(pb.origins[v].walkin_cons[route[v]]);
    std::vector<milp::Term> row{{r[v], 1.0}};
    for (int v2 : pb.steer_origins_of[key]) row.push_back({o[v2], -1.0});
    m.add_constraint(row, milp::RowSense::le, 0.0);
  }

  long long alpha_sum = 0, sigma_sum = 0;
  std::vector<milp::Term> cap1{{d1, 1.0}}, bud1{{d1, 1.0}};
  std::vector<milp::Term> cap2{{d2, 1.0}}, bud2{{d2, 1.0}};
  for (int v = 0; v < V; ++v) {
    const auto& ov = pb.origins[v];
    alpha_sum += ov.st_lo;
    sigma_sum += ov.wk_lo;
    if (ov.st_hi != 0) cap1.push_back({o[v], -double(ov.st_hi)});
    if (ov.st_lo != 0) bud1.push_back({o[v], -double(ov.st_lo)});
    if (ov.wk_hi != 0) cap2.push_back({r[v], -double(ov.wk_hi)});
    if (ov.wk_lo != 0) bud2.push_back({r[v], -double(ov.wk_lo)});
  }
  m.add_constraint(cap1, milp::RowSense::le, 0.0);
  m.add_constraint(bud1, milp::RowSense::le, double(pb.uncertainty.gamma_steerable - alpha_sum));
  m.add_constraint(cap2, milp::RowSense::le, 0.0);
  m.add_constraint(bud2, milp::RowSense::le, double(pb.uncertainty.gamma_walkin - sigma_sum));

  milp::SolveConfig exact = cfg;
  exact.gap_tol = 0.0;  // callers compare the value against an oracle
  milp::SolveOutcome out = m.solve(exact);
  if (out.status != milp::Status::optimal)
    throw ModelError("budgeted separation MIP did not solve to optimality");

  SeparationResult res;
  res.value = out.objective;
  res.violation = -std::llround(out.objective);
  if (res.value > 1e-6) {
    res.violated = true;
    for (int v = 0; v < V; ++v)
      if (out.values[o[v]] >= 1.0 - 1e-6) res.U.push_back(v);
  }
  return res;
}

SeparationResult separate_budgeted_bruteforce(const Problem& pb, const std::vector<int>& x,
                                              const RouteVector& route) {
  require_budgeted(pb);
  const int V = pb.num_origins();
  if (V > 20) throw ModelError("brute-force separation is limited to 20 origins");

  long long best = 0;
  std::vector<int> best_U;
  std::vector<int> U;
  for (uint32_t mask = 1; mask < (1u << V); ++mask) {
    U.clear();
    for (int v = 0; v < V; ++v)
      if (mask & (1u << v)) U.push_back(v);
    long long value = worst_case_steerable(pb, U) + worst_case_walkin(pb, U, route) -
                      capacity_of(pb, steer_neighborhood(pb, U), x);
    if (value > best) {
      best = value;
      best_U = U;
    }
  }

  SeparationResult res;
  res.value = double(best);
  res.violation = -best;
  if (best > 0) {
    res.violated = true;
    res.U = best_U;
  }
  return res;
}

PlanSolve solve_budgeted(const Problem& pb, const BudgetedOptions& opt) {
  BudgetedMaster master = build_budgeted_master(pb);

  PlanSolve res;
  for (int iter = 1; iter <= opt.max_iterations; ++iter) {
    milp::SolveOutcome out = master.model.solve(opt.milp);
    res.iterations = iter;
    if (out.status != milp::Status::optimal) {
      res.status = out.status;
      return res;
    }

    std::vector<int> x = extract_ints(out.values, master.vars.x);
    RouteVector route = extract_route(pb, out.values, master.vars.w);
    SeparationResult sep = separate_budgeted_mip(pb, x, route, opt.milp);

    long long obj = std::llround(out.objective);
    std::ostringstream line;
    line << "iter=" << iter << " obj=" << obj << " violated_U_size=" << sep.U.size()
         << " slack=" << sep.violation << " sep_value=" << std::llround(sep.value);
    res.log.push_back(line.str());

    if (!sep.violated) {
      res.status = milp::Status::optimal;
      res.objective = obj;
      std::vector<int> y = extract_ints(out.values, master.vars.y);

      // Nominal completion mirrors the deterministic loop: attached only
      // when the nominal demands fit under this plan.
      std::optional<AssignMatrix> assign;
      DemandVector nom = nominal_demands(pb);
      std::vector<long long> gamma = residual_capacities(pb, x, route, nom.walkin);
      if (std::all_of(gamma.begin(), gamma.end(), [](long long g) { return g >= 0; })) {
        BendersNetwork bn = build_benders_network(pb, nom.steerable, gamma);
        if (bn.net.max_flow(bn.source, bn.sink) == bn.total_demand)
          assign = recover_assignment(pb, bn);
      }
      res.plan = make_plan(pb, y, x, route, assign, obj);
      return res;
    }

    res.cut_pool.push_back(sep.U);
    add_cut_block(master, pb, sep.U);  // throws if the subset repeats
  }
  throw ModelError("budgeted cut loop exceeded the iteration limit");
}

SubsetSumReduction build_subsetsum_reduction(const std::vector<long long>& values,
                                             long long target) {
  if (values.empty()) throw ModelError("subset-sum reduction needs at least one value");
  if (target < 1) throw ModelError("subset-sum target must be positive");
  for (long long a : values)
    if (a < 1) throw ModelError("subset-sum values must be positive");

  const int n = static_cast<int>(values.size());
  SubsetSumReduction red;
  Instance& inst = red.instance;
  inst.session_cost = 1;
  inst.session_capacity = 1;
  inst.uncertainty.kind = UncertaintyKind::budgeted;

  long long beta_sum = 0;
  for (long long a : values) beta_sum += 2 * a;
  // Gamma1 = 2B; capped at the box total so the uncertainty set description
  // stays consistent when B exceeds the sum of all values (a trivial
  // no-instance either way).
  inst.uncertainty.gamma_steerable = std::min(2 * target, beta_sum);
  inst.uncertainty.gamma_walkin = 0;

  std::string shared_id = "p" + std::to_string(n + 1);
  for (int i = 0; i < n; ++i) {
    Practice p;
    p.id = "p" + std::to_string(i + 1);
    p.capacity = values[i];
    p.coord = {double(i + 1), 0.0};
    inst.practices.push_back(p);
  }
  Practice shared;
  shared.id = shared_id;
  shared.capacity = target - 1;
  shared.coord = {0.0, 0.0};
  inst.practices.push_back(shared);

  for (int i = 0; i < n; ++i) {
    DemandOrigin v;
    v.id = "v" + std::to_string(i + 1);
    v.steerable = 0;
    v.walkin = 0;
    v.steerable_lo = 0;
    v.steerable_hi = 2 * values[i];
    v.walkin_lo = 0;
    v.walkin_hi = 0;
    v.coord = {double(i + 1), 1.0};
    v.consideration.push_back({inst.practices[i].id, 100, {}});
    v.consideration.push_back({shared_id, 200, {}});
    inst.origins.push_back(v);
  }

  inst.resolve_references();
  require_valid(inst);
  red.route.assign(n, 0);  // private practice first in every consideration list
  return red;
}

}  // namespace mmu
