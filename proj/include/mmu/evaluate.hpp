#ifndef MMU_EVALUATE_HPP
#define MMU_EVALUATE_HPP

// Monte-Carlo plan evaluation.
//
// A realization fixes demand per origin. Walk-ins go to the closest operating
// facility under the plan; steerable demand is then assigned within
// consideration sets so that the total capacity overage is minimal. Because
// every overage unit costs the same, that minimum decomposes exactly into
//   sum_k max(0, walk-in load_k - cap_k)
//   + (total steerable demand - max flow into the clamped residuals),
// with origins that have no operating facility at all contributing their
// entire demand. Sampling either replays the generator's demand process
// (fresh weekly draws split by a walk-in coin) or draws uniformly from the
// instance's uncertainty sets; outbreak perturbation doubles realized cell
// demands around randomly chosen centers before aggregation.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mmu/instance.hpp"
#include "mmu/instgen.hpp"
#include "mmu/plan.hpp"

namespace mmu {

struct Realization {
  std::vector<long long> steerable, walkin;  // per origin
  std::string tag;  // sampled-history | budget-set | outbreak-perturbed
};

enum class SampleMode { history, budgeted_set };

struct SampleSpec {
  SampleMode mode = SampleMode::budgeted_set;
  int count = 100;
  double omega = 0.2;  // walk-in coin for history mode
  uint64_t seed = 1;
  // Outbreak perturbation, history mode only. outbreaks = number of centers.
  int outbreaks = 0;
  double outbreak_radius_km = 1.0;
  long long outbreak_factor = 2;
};

// History mode requires the generator's cell sidecar (pass nullptr
// otherwise). Budgeted-set mode rejection-samples the box draws against the
// budget rows and reports an error when acceptance fails persistently.
std::vector<Realization> sample_realizations(const Instance& inst, const CellSet* cells,
                                             const SampleSpec& spec);

// Per-cell demand draws behind history mode, exposed for the outbreak tests.
struct CellRealization {
  std::vector<long long> steerable, walkin;  // per cell
};
CellRealization sample_cell_realization(const CellSet& cells, double omega,
                                        std::mt19937_64& rng);
// Multiplies demands of every cell within the radius of each of k randomly
// chosen distinct centers; overlapping zones compound.
CellRealization apply_outbreaks(const CellSet& cells, CellRealization real, int k,
                                double radius_km, long long factor, std::mt19937_64& rng);
Realization aggregate_to_origins(const Instance& inst, const CellSet& cells,
                                 const CellRealization& cr, std::string tag);

long long min_total_violations(const Instance& inst, const Plan& plan,
                               const Realization& real);

struct ModelSummary {
  std::string model;
  double mean = 0.0;
  long long max = 0;
  long long p95 = 0;
  long long cost = 0;
};

struct EvaluationReport {
  std::vector<std::string> models;
  std::vector<std::vector<long long>> violations;  // per model, per realization
  std::vector<ModelSummary> summaries;
};

EvaluationReport evaluate_models(const Instance& inst,
                                 const std::vector<std::pair<std::string, Plan>>& plans,
                                 const std::vector<Realization>& realizations);

// CSV emission: per-realization rows `model,realization_id,violations` and
// summary rows `model,mean,max,p95,cost`.
void write_report_csv(const EvaluationReport& report, const std::string& realizations_path,
                      const std::string& summary_path);

}  // namespace mmu

#endif  // MMU_EVALUATE_HPP
