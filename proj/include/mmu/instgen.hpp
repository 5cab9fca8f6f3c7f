#ifndef MMU_INSTGEN_HPP
#define MMU_INSTGEN_HPP

// Synthetic instance generator.
//
// Population cells sit on a jittered grid over a square region; sites and
// practices are scattered uniformly. Driving distances are Euclidean times a
// detour factor, rounded to meters. Each cell considers every facility within
// the maximum driving distance delta; cells with identical ordered
// consideration sets merge into one demand origin.
//
// Demands come from simulated weekly visit histories (negative binomial per
// cell). Per origin, with round(x) = floor(x + 0.5) and omega the walk-in
// fraction:
//   avg = round(mean weekly visits), u = round(omega*avg), d = avg - u
//   sigma = round(omega*min),  alpha = min - sigma
//   tau   = round(omega*max),  beta  = max - tau
// and with M the maximum simulated total across weeks, Gamma2 =
// round(omega*M), Gamma1 = M - Gamma2.
//
// The nominal vector is expected to land inside the derived uncertainty sets;
// rounding can break that on very small histories, in which case the demand
// simulation retries under a shifted stream (bounded, deterministic).

#include <cstdint>
#include <string>
#include <vector>

#include "mmu/instance.hpp"

namespace mmu {

struct GeneratorConfig {
  uint64_t seed = 1;
  int n_cells = 120;
  int n_sites = 28;
  int n_practices = 16;
  double region_km = 10.0;
  double delta_km = 2.0;           // maximum driving distance for consideration
  double omega = 0.2;              // walk-in fraction
  int weeks = 52;
  double cell_mean = 6.0;          // weekly visits per cell, average level
  double cell_mean_spread = 0.5;   // relative spread of per-cell means
  double dispersion = 8.0;         // negative binomial size; larger -> Poisson
  double road_detour_factor = 1.3;
  long long session_capacity = 28;  // bhat
  long long session_cost = 1;       // chat
  long long site_setup_cost = 2;    // c
  int site_session_cap = 10;        // b
  long long practice_cap_lo = 206;
  long long practice_cap_hi = 602;
  UncertaintyKind kind = UncertaintyKind::budgeted;
};

// Pre-aggregation cell, kept as a sidecar so the evaluator can resample
// demand histories and perturb outbreaks spatially.
struct Cell {
  std::string id;
  Point coord;
  double mean = 0.0;  // weekly visit mean
  int origin = -1;    // origin index after aggregation; -1 = dropped
};

struct CellSet {
  std::vector<Cell> cells;
  double omega = 0.0;
  double dispersion = 0.0;
  int weeks = 0;
  uint64_t seed = 0;
  int attempt = 0;        // demand stream retries used
  int dropped_cells = 0;  // cells with no facility within delta
};

// Per cell, per week visit counts.
using DemandHistory = std::vector<std::vector<long long>>;

struct Geometry {
  std::vector<Cell> cells;
  std::vector<Site> sites;
  std::vector<Practice> practices;
  // Driving distance in meters per cell, facility keys sites-then-practices.
  std::vector<std::vector<int>> distance_m;
};

// floor(x + 0.5), the rounding used throughout the derivation.
long long round_half_up(double x);

Geometry generate_geometry(const GeneratorConfig& cfg);
DemandHistory simulate_weekly_demands(const GeneratorConfig& cfg, const std::vector<Cell>& cells,
                                      int attempt = 0);

// Cells grouped by identical ordered consideration set. Each group lists its
// member cell indices; the consideration entries are ordered by (distance,
// facility id).
struct OriginGroup {
  std::vector<ConsiderEntry> consideration;
  std::vector<int> members;
};
std::vector<OriginGroup> aggregate_cells(const Geometry& geo, double delta_km);

struct DerivedDemand {
  long long steerable = 0, walkin = 0;
  long long st_lo = 0, st_hi = 0;
  long long wk_lo = 0, wk_hi = 0;
};
DerivedDemand derive_demands(const std::vector<long long>& weekly, double omega);
// (Gamma1, Gamma2) from the maximum weekly total across all cells.
std::pair<long long, long long> derive_budgets(const DemandHistory& history, double omega);

struct GeneratedInstance {
  Instance instance;
  CellSet cells;
};
GeneratedInstance generate_instance(const GeneratorConfig& cfg);

// Sidecar serialization (JSON).
void write_cells(const std::string& path, const CellSet& cs);
CellSet read_cells(const std::string& path);

}  // namespace mmu

#endif  // MMU_INSTGEN_HPP
