#ifndef MMU_TESTS_HELPERS_HPP
#define MMU_TESTS_HELPERS_HPP

// Fixtures, random instance builders and independent oracles shared by the
// unit tests and the acceptance suite.
//
// The oracles deliberately avoid the code paths under test: steerable
// feasibility is decided by Hall's condition over origin subsets instead of
// the max-flow module, optima come from enumerating every (setup, session)
// combination, and the evaluation metric is cross-checked against a direct
// minimum-overage program.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mmu/evaluate.hpp"
#include "mmu/instance.hpp"
#include "mmu/milp.hpp"
#include "mmu/plan.hpp"
#include "mmu/problem.hpp"

namespace mmu::testing {

// One candidate site (setup 2, up to 10 sessions), one practice (capacity 4),
// one origin with 30 steerable and 3 walk-in patients considering the
// practice at 500 m and the site at 1000 m. Session capacity 28, cost 1.
// The optimum is 4: set up l1 and run 2 sessions.
inline Instance tiny_instance() {
  Instance inst;
  inst.session_cost = 1;
  inst.session_capacity = 28;
  inst.sites.push_back({"l1", 2, 10, {1.0, 0.0}});
  inst.practices.push_back({"p1", 4, {0.5, 0.0}});
  DemandOrigin v;
  v.id = "v1";
  v.steerable = 30;
  v.walkin = 3;
  v.steerable_lo = v.steerable_hi = 30;
  v.walkin_lo = v.walkin_hi = 3;
  v.consideration.push_back({"p1", 500, {}});
  v.consideration.push_back({"l1", 1000, {}});
  inst.origins.push_back(std::move(v));
  inst.resolve_references();
  return inst;
}

// Budgeted variant of tiny_instance. The infeasible parameterization pins
// walk-ins at tau = 5 > practice capacity 4, so no robust plan can carry the
// forced closest-facility load. The feasible one (tau = 4) separates the
// three models: nominal 4, budgeted 5, interval-worst-case 6.
inline Instance tiny_budgeted(bool feasible) {
  Instance inst = tiny_instance();
  inst.uncertainty.kind = UncertaintyKind::budgeted;
  DemandOrigin& v = inst.origins[0];
  if (feasible) {
    v.steerable_lo = 25;
    v.steerable_hi = 88;
    v.walkin_lo = 2;
    v.walkin_hi = 4;
    inst.uncertainty.gamma_steerable = 58;
    inst.uncertainty.gamma_walkin = 4;
  } else {
    v.steerable_lo = 25;
    v.steerable_hi = 88;
    v.walkin_lo = 2;
    v.walkin_hi = 5;
    inst.uncertainty.gamma_steerable = 58;
    inst.uncertainty.gamma_walkin = 5;
  }
  return inst;
}

struct RandomSpec {
  int min_sites = 1, max_sites = 5;
  int min_practices = 1, max_practices = 3;
  int min_origins = 2, max_origins = 12;
  int max_session_bound = 4;
  int max_setup_cost = 6;
  int max_session_capacity = 6;
  int max_practice_cap = 12;
  int max_steerable = 10;
  int max_walkin = 4;
  int max_consider = 4;  // consideration entries per origin
  UncertaintyKind kind = UncertaintyKind::deterministic;
};

// Valid random instance: distinct per-origin distances keep consideration
// lists strictly ordered, interval bounds bracket the nominal demands, and
// budgets are drawn inside [sum lo, sum hi] so the uncertainty sets are
// nonempty.
inline Instance random_instance(std::mt19937_64& rng, const RandomSpec& spec = {}) {
  auto uniform = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };

  Instance inst;
  inst.session_cost = 1;
  inst.session_capacity = uniform(2, spec.max_session_capacity);

  const int S = uniform(spec.min_sites, spec.max_sites);
  const int P = uniform(spec.min_practices, spec.max_practices);
  for (int l = 0; l < S; ++l)
    inst.sites.push_back({"l" + std::to_string(l + 1), uniform(1, spec.max_setup_cost),
                          uniform(1, spec.max_session_bound), {double(l), 0.0}});
  for (int p = 0; p < P; ++p)
    inst.practices.push_back(
        {"p" + std::to_string(p + 1), uniform(0, spec.max_practice_cap), {double(p), 1.0}});

  const int V = uniform(spec.min_origins, spec.max_origins);
  std::vector<int> fac_ids(S + P);
  std::iota(fac_ids.begin(), fac_ids.end(), 0);
  for (int v = 0; v < V; ++v) {
    DemandOrigin o;
    o.id = "v" + std::to_string(v + 1);
    o.steerable = uniform(0, spec.max_steerable);
    o.walkin = uniform(0, spec.max_walkin);
    if (spec.kind == UncertaintyKind::deterministic) {
      o.steerable_lo = o.steerable_hi = o.steerable;
      o.walkin_lo = o.walkin_hi = o.walkin;
    } else {
      o.steerable_lo = uniform(0, o.steerable);
      o.steerable_hi = o.steerable + uniform(0, 4);
      o.walkin_lo = uniform(0, o.walkin);
      o.walkin_hi = o.walkin + uniform(0, 2);
    }

    std::shuffle(fac_ids.begin(), fac_ids.end(), rng);
    const int c = uniform(1, std::min(spec.max_consider, S + P));
    std::vector<std::pair<int, int>> picks;  // (distance, facility key)
    for (int i = 0; i < c; ++i) picks.push_back({100 * uniform(1, 30) + i, fac_ids[i]});
    std::sort(picks.begin(), picks.end());
    for (auto [dist, key] : picks) {
      std::string id = key < S ? inst.sites[key].id : inst.practices[key - S].id;
      o.consideration.push_back({id, dist, {}});
    }
    inst.origins.push_back(std::move(o));
  }

  inst.uncertainty.kind = spec.kind;
  if (spec.kind == UncertaintyKind::budgeted) {
    long long alo = 0, ahi = 0, wlo = 0, whi = 0;
    for (const auto& o : inst.origins) {
      alo += o.steerable_lo;
      ahi += o.steerable_hi;
      wlo += o.walkin_lo;
      whi += o.walkin_hi;
    }
    inst.uncertainty.gamma_steerable =
        alo + std::uniform_int_distribution<long long>(0, ahi - alo)(rng);
    inst.uncertainty.gamma_walkin =
        wlo + std::uniform_int_distribution<long long>(0, whi - wlo)(rng);
  }

  inst.resolve_references();
  require_valid(inst);
  return inst;
}

// Closest operating facility per origin over the walk-in consideration list,
// independent of the library's routing helpers. -1 when every entry is a
// closed site.
inline RouteVector route_for(const Problem& pb, const std::vector<uint8_t>& site_open) {
  RouteVector route(pb.num_origins(), -1);
  for (int v = 0; v < pb.num_origins(); ++v) {
    const auto& cons = pb.origins[v].walkin_cons;
    for (size_t i = 0; i < cons.size(); ++i) {
      if (cons[i].kind == FacilityKind::practice || site_open[cons[i].index]) {
        route[v] = int(i);
        break;
      }
    }
  }
  return route;
}

// Hall's condition for assigning `demand` within the steerable consideration
// sets into residual capacities `gamma`: feasible iff every origin subset U
// satisfies sum_U demand <= sum of gamma over N(U). Subset-DP over bitmasks.
inline bool hall_feasible(const Problem& pb, const std::vector<long long>& demand,
                          const std::vector<long long>& gamma) {
  const int V = pb.num_origins();
  const int K = pb.num_facilities();
  if (V > 20) throw std::runtime_error("hall_feasible: too many origins");

  std::vector<uint32_t> nb(V, 0);
  for (int v = 0; v < V; ++v)
    for (const Facility& f : pb.origins[v].steer_cons) nb[v] |= 1u << pb.fkey(f);

  std::vector<long long> dsum(size_t(1) << V, 0);
  std::vector<uint32_t> nbm(size_t(1) << V, 0);
  for (uint32_t mask = 1; mask < (1u << V); ++mask) {
    int v = std::countr_zero(mask);
    dsum[mask] = dsum[mask & (mask - 1)] + demand[v];
    nbm[mask] = nbm[mask & (mask - 1)] | nb[v];
    long long cap = 0;
    for (int k = 0; k < K; ++k)
      if (nbm[mask] & (1u << k)) cap += gamma[k];
    if (dsum[mask] > cap) return false;
  }
  return true;
}

// Exhaustive optimum over every setup vector y and session vector x. A
// combination is feasible when every origin has an operating facility in
// range, routed walk-in loads fit the capacities, and the steerable demand
// passes Hall's condition against the residuals. Returns nullopt when no
// combination is feasible.
inline std::optional<long long> enumerate_optimum(const Problem& pb, const DemandVector& dem) {
  const int G = pb.num_groups();
  const int S = pb.num_sites();
  std::optional<long long> best;

  for (uint32_t ymask = 0; ymask < (1u << G); ++ymask) {
    std::vector<int> bound(S, 0);
    for (int s = 0; s < S; ++s)
      if (ymask & (1u << pb.site_group[s])) bound[s] = pb.site_session_bound[s];

    std::vector<int> x(S, 0);
    while (true) {
      std::vector<uint8_t> site_open(S, 0);
      for (int s = 0; s < S; ++s)
        site_open[s] = pb.operate_by_sessions ? x[s] > 0 : (ymask >> pb.site_group[s]) & 1;

      RouteVector route = route_for(pb, site_open);
      bool covered = std::all_of(route.begin(), route.end(), [](int r) { return r >= 0; });
      if (covered) {
        std::vector<long long> gamma = residual_capacities(pb, x, route, dem.walkin);
        bool fits = std::all_of(gamma.begin(), gamma.end(), [](long long g) { return g >= 0; });
        if (fits && hall_feasible(pb, dem.steerable, gamma)) {
          long long cost = 0;
          for (int g = 0; g < G; ++g)
            if (ymask & (1u << g)) cost += pb.group_cost[g];
          for (int s = 0; s < S; ++s) cost += pb.session_cost * x[s];
          if (!best || cost < *best) best = cost;
        }
      }

      int s = 0;
      while (s < S && x[s] == bound[s]) x[s++] = 0;
      if (s == S) break;
      ++x[s];
    }
  }
  return best;
}

// Minimum total capacity overage of serving `real` under `plan`, solved as
// one linear program: steerable demand is assigned freely within the
// consideration sets, walk-ins are fixed at the closest operating facility,
// and each facility pays its load above capacity. Origins with no operating
// facility at all are unserved and counted on top. Integral data makes the
// LP optimum integral (transportation structure).
inline long long min_overage_oracle(const Instance& inst, const Plan& plan,
                                    const Realization& real) {
  const int S = int(inst.sites.size());
  const int P = int(inst.practices.size());
  const int V = int(inst.origins.size());

  std::vector<uint8_t> site_open(S, 0);
  std::vector<long long> cap(S + P, 0);
  for (int s = 0; s < S; ++s) {
    auto it = plan.setup.find(inst.sites[s].id);
    site_open[s] = it != plan.setup.end() && it->second > 0;
    auto xs = plan.sessions.find(inst.sites[s].id);
    cap[s] = inst.session_capacity * (xs == plan.sessions.end() ? 0 : xs->second);
  }
  for (int p = 0; p < P; ++p) cap[S + p] = inst.practices[p].capacity;

  long long unserved = 0;
  std::vector<long long> wload(S + P, 0);
  std::vector<uint8_t> routable(V, 0);
  for (int v = 0; v < V; ++v) {
    int key = -1;
    for (const ConsiderEntry& e : inst.origins[v].consideration) {
      if (e.fac.kind == FacilityKind::practice || site_open[e.fac.index]) {
        key = e.fac.kind == FacilityKind::site ? e.fac.index : S + e.fac.index;
        break;
      }
    }
    if (key < 0) {
      unserved += real.steerable[v] + real.walkin[v];
      continue;
    }
    routable[v] = 1;
    wload[key] += real.walkin[v];
  }

  milp::Model m(milp::Sense::minimize);
  std::vector<int> over(S + P);
  for (int k = 0; k < S + P; ++k) over[k] = m.add_var(0, milp::kInf, milp::VarType::continuous, 1.0);
  std::vector<std::vector<milp::Term>> load_row(S + P);
  for (int v = 0; v < V; ++v) {
    if (!routable[v] || real.steerable[v] == 0) continue;
    std::vector<milp::Term> assign;
    for (const ConsiderEntry& e : inst.origins[v].consideration) {
      int key = e.fac.kind == FacilityKind::site ? e.fac.index : S + e.fac.index;
      int z = m.add_var(0, milp::kInf, milp::VarType::continuous, 0.0);
      assign.push_back({z, 1.0});
      load_row[key].push_back({z, 1.0});
    }
    m.add_constraint(assign, milp::RowSense::eq, double(real.steerable[v]));
  }
  for (int k = 0; k < S + P; ++k) {
    auto row = load_row[k];
    row.push_back({over[k], -1.0});
    m.add_constraint(row, milp::RowSense::le, double(cap[k] - wload[k]));
  }

  milp::SolveOutcome out = m.solve();
  if (out.status != milp::Status::optimal)
    throw std::runtime_error("overage oracle LP failed to solve");
  return std::llround(out.objective) + unserved;
}

}  // namespace mmu::testing

#endif  // MMU_TESTS_HELPERS_HPP
