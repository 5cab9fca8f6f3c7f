#include "mmu/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "mmu/maxflow.hpp"

namespace mmu {

std::vector<Realization> sample_realizations(const Instance& inst, const CellSet* cells,
                                             const SampleSpec& spec) {
  if (spec.count < 1) throw ModelError("realization count must be at least 1");
  std::mt19937_64 rng(spec.seed);
  std::vector<Realization> out;
  out.reserve(spec.count);

  if (spec.mode == SampleMode::history) {
    if (!cells) throw ModelError("history sampling requires the generator's cell sidecar");
    for (int i = 0; i < spec.count; ++i) {
      CellRealization cr = sample_cell_realization(*cells, spec.omega, rng);
      std::string tag = "sampled-history";
      if (spec.outbreaks > 0) {
        cr = apply_outbreaks(*cells, std::move(cr), spec.outbreaks, spec.outbreak_radius_km,
                             spec.outbreak_factor, rng);
        tag = "outbreak-perturbed";
      }
      out.push_back(aggregate_to_origins(inst, *cells, cr, tag));
    }
    return out;
  }

  // Uniform draws from the uncertainty boxes; under budgeted uncertainty the
  // whole vector is redrawn until both budget rows hold.
  const bool budgeted = inst.uncertainty.kind == UncertaintyKind::budgeted;
  constexpr int kMaxAttempts = 10000;
  for (int i = 0; i < spec.count; ++i) {
    Realization real;
    real.tag = "budget-set";
    real.steerable.resize(inst.origins.size());
    real.walkin.resize(inst.origins.size());
    bool accepted = false;
    for (int attempt = 0; attempt < kMaxAttempts && !accepted; ++attempt) {
      long long sum_st = 0, sum_wk = 0;
      for (size_t v = 0; v < inst.origins.size(); ++v) {
        const DemandOrigin& o = inst.origins[v];
        real.steerable[v] = std::uniform_int_distribution<long long>(
            o.steerable_lo, o.steerable_hi)(rng);
        real.walkin[v] = std::uniform_int_distribution<long long>(
            o.walkin_lo, o.walkin_hi)(rng);
        sum_st += real.steerable[v];
        sum_wk += real.walkin[v];
      }
      accepted = !budgeted || (sum_st <= inst.uncertainty.gamma_steerable &&
                               sum_wk <= inst.uncertainty.gamma_walkin);
    }
    if (!accepted)
      throw ModelError("rejection sampling failed: no draw satisfied the budget rows in " +
                       std::to_string(kMaxAttempts) + " attempts (realization " +
                       std::to_string(i) + "); the boxes barely intersect the budgets");
    out.push_back(std::move(real));
  }
  return out;
}

CellRealization sample_cell_realization(const CellSet& cells, double omega,
                                        std::mt19937_64& rng) {
  CellRealization cr;
  cr.steerable.resize(cells.cells.size());
  cr.walkin.resize(cells.cells.size());
  for (size_t c = 0; c < cells.cells.size(); ++c) {
    long long visits = 0;
    double mean = cells.cells[c].mean;
    if (mean > 0.0) {
      std::gamma_distribution<double> gamma(cells.dispersion, mean / cells.dispersion);
      double rate = gamma(rng);
      if (rate > 0.0) visits = std::poisson_distribution<long long>(rate)(rng);
    }
    long long walkins = 0;
    if (omega >= 1.0)
      walkins = visits;
    else if (omega > 0.0 && visits > 0)
      walkins = std::binomial_distribution<long long>(visits, omega)(rng);
    cr.walkin[c] = walkins;
    cr.steerable[c] = visits - walkins;
  }
  return cr;
}

CellRealization apply_outbreaks(const CellSet& cells, CellRealization real, int k,
                                double radius_km, long long factor, std::mt19937_64& rng) {
  const int n = static_cast<int>(cells.cells.size());
  if (k <= 0 || n == 0) return real;
  if (k > n) throw ModelError("more outbreak centers than cells");

  // k distinct centers, chosen successively.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  for (int i = 0; i < k; ++i) {
    int j = i + int(std::uniform_int_distribution<int>(0, n - 1 - i)(rng));
    std::swap(order[i], order[j]);
  }

  for (int i = 0; i < k; ++i) {
    const Point& center = cells.cells[order[i]].coord;
    for (int c = 0; c < n; ++c) {
      double dist = std::hypot(cells.cells[c].coord.x - center.x,
                               cells.cells[c].coord.y - center.y);
      if (dist <= radius_km) {
        real.steerable[c] *= factor;
        real.walkin[c] *= factor;
      }
    }
  }
  return real;
}

Realization aggregate_to_origins(const Instance& inst, const CellSet& cells,
                                 const CellRealization& cr, std::string tag) {
  if (cr.steerable.size() != cells.cells.size() || cr.walkin.size() != cells.cells.size())
    throw ModelError("cell realization size does not match the cell sidecar");
  Realization real;
  real.tag = std::move(tag);
  real.steerable.assign(inst.origins.size(), 0);
  real.walkin.assign(inst.origins.size(), 0);
  for (size_t c = 0; c < cells.cells.size(); ++c) {
    int g = cells.cells[c].origin;
    if (g < 0) continue;  // cell was outside every consideration radius
    if (g >= int(inst.origins.size()))
      throw ModelError("cell sidecar references an origin the instance does not have");
    real.steerable[g] += cr.steerable[c];
    real.walkin[g] += cr.walkin[c];
  }
  return real;
}

long long min_total_violations(const Instance& inst, const Plan& plan,
                               const Realization& real) {
  if (real.steerable.size() != inst.origins.size() ||
      real.walkin.size() != inst.origins.size())
    throw ModelError("realization size does not match the instance");

  const int S = static_cast<int>(inst.sites.size());
  const int P = static_cast<int>(inst.practices.size());
  auto lookup = [](const std::map<std::string, int>& m, const std::string& id) {
    auto it = m.find(id);
    return it == m.end() ? 0 : it->second;
  };

  std::vector<uint8_t> site_open(S, 0);
  std::vector<long long> cap(S + P, 0);
  for (int s = 0; s < S; ++s) {
    site_open[s] = lookup(plan.setup, inst.sites[s].id) > 0;
    cap[s] = inst.session_capacity * lookup(plan.sessions, inst.sites[s].id);
  }
  for (int p = 0; p < P; ++p) cap[S + p] = inst.practices[p].capacity;

  // Walk-ins to the closest operating facility; origins with none contribute
  // all their demand as violations.
  long long violations = 0;
  std::vector<long long> load(S + P, 0);
  std::vector<uint8_t> routable(inst.origins.size(), 0);
  for (size_t v = 0; v < inst.origins.size(); ++v) {
    std::optional<Facility> fac = closest_operating_facility(inst, int(v), site_open);
    if (!fac) {
      violations += real.steerable[v] + real.walkin[v];
      continue;
    }
    routable[v] = 1;
    int key = fac->kind == FacilityKind::site ? fac->index : S + fac->index;
    load[key] += real.walkin[v];
  }

  std::vector<long long> gamma(S + P, 0);
  for (int k = 0; k < S + P; ++k) {
    violations += std::max(0LL, load[k] - cap[k]);
    gamma[k] = std::max(0LL, cap[k] - load[k]);
  }

  // Minimum unassignable steerable demand = total - max flow into residuals.
  const int V = static_cast<int>(inst.origins.size());
  FlowNetwork net(V + S + P + 2);
  const int source = 0, sink = V + S + P + 1;
  long long total = 0;
  for (int v = 0; v < V; ++v) {
    if (!routable[v] || real.steerable[v] == 0) continue;
    total += real.steerable[v];
    net.add_arc(source, 1 + v, real.steerable[v]);
    for (const ConsiderEntry& e : inst.origins[v].consideration) {
      int key = e.fac.kind == FacilityKind::site ? e.fac.index : S + e.fac.index;
      net.add_arc(1 + v, 1 + V + key, real.steerable[v]);
    }
  }
  for (int k = 0; k < S + P; ++k)
    if (gamma[k] > 0) net.add_arc(1 + V + k, sink, gamma[k]);

  violations += total - net.max_flow(source, sink);
  return violations;
}

EvaluationReport evaluate_models(const Instance& inst,
                                 const std::vector<std::pair<std::string, Plan>>& plans,
                                 const std::vector<Realization>& realizations) {
  EvaluationReport report;
  for (const auto& [model, plan] : plans) {
    report.models.push_back(model);
    std::vector<long long> row;
    row.reserve(realizations.size());
    for (const Realization& real : realizations)
      row.push_back(min_total_violations(inst, plan, real));

    ModelSummary sum;
    sum.model = model;
    sum.cost = plan_cost(inst, plan);
    if (!row.empty()) {
      long long total = 0;
      for (long long x : row) total += x;
      sum.mean = double(total) / double(row.size());
      std::vector<long long> sorted = row;
      std::sort(sorted.begin(), sorted.end());
      sum.max = sorted.back();
      size_t idx = size_t(std::ceil(0.95 * double(sorted.size())));
      sum.p95 = sorted[idx == 0 ? 0 : idx - 1];
    }
    report.summaries.push_back(std::move(sum));
    report.violations.push_back(std::move(row));
  }
  return report;
}

void write_report_csv(const EvaluationReport& report, const std::string& realizations_path,
                      const std::string& summary_path) {
  std::ofstream rows(realizations_path);
  if (!rows) throw ModelError("cannot write '" + realizations_path + "'");
  rows << "model,realization_id,violations\n";
  for (size_t m = 0; m < report.models.size(); ++m)
    for (size_t i = 0; i < report.violations[m].size(); ++i)
      rows << report.models[m] << "," << i << "," << report.violations[m][i] << "\n";

  std::ofstream sum(summary_path);
  if (!sum) throw ModelError("cannot write '" + summary_path + "'");
  sum << "model,mean,max,p95,cost\n";
  for (const ModelSummary& s : report.summaries)
    sum << s.model << "," << s.mean << "," << s.max << "," << s.p95 << "," << s.cost << "\n";
}

}  // namespace mmu
