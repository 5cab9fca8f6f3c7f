#include "mmu/instgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

namespace mmu {

long long round_half_up(double x) { return static_cast<long long>(std::floor(x + 0.5)); }

namespace {

void check_config(const GeneratorConfig& cfg) {
  std::vector<std::string> bad;
  if (cfg.omega < 0.0 || cfg.omega > 1.0) bad.push_back("omega must lie in [0,1]");
  if (cfg.weeks < 1) bad.push_back("weeks must be at least 1");
  if (cfg.delta_km <= 0.0) bad.push_back("delta_km must be positive");
  if (cfg.n_cells < 1) bad.push_back("n_cells must be at least 1");
  if (cfg.n_sites + cfg.n_practices < 1) bad.push_back("at least one facility is required");
  if (cfg.n_sites < 0 || cfg.n_practices < 0) bad.push_back("facility counts must be nonnegative");
  if (cfg.region_km <= 0.0) bad.push_back("region_km must be positive");
  if (cfg.dispersion <= 0.0) bad.push_back("dispersion must be positive");
  if (cfg.cell_mean < 0.0) bad.push_back("cell_mean must be nonnegative");
  if (cfg.cell_mean_spread < 0.0 || cfg.cell_mean_spread > 1.0)
    bad.push_back("cell_mean_spread must lie in [0,1]");
  if (cfg.road_detour_factor < 1.0) bad.push_back("road_detour_factor must be at least 1");
  if (cfg.practice_cap_lo < 0 || cfg.practice_cap_hi < cfg.practice_cap_lo)
    bad.push_back("practice capacity range is empty");
  if (!bad.empty()) {
    std::string msg = "invalid generator config:";
    for (const auto& b : bad) msg += "\n  - " + b;
    throw ModelError(msg);
  }
}

std::mt19937_64 stage_rng(uint64_t seed, uint64_t stage, uint64_t attempt = 0) {
  std::seed_seq seq{seed, stage, attempt};
  return std::mt19937_64(seq);
}

long long draw_negbin(double mean, double dispersion, std::mt19937_64& rng) {
  if (mean <= 0.0) return 0;
  std::gamma_distribution<double> gamma(dispersion, mean / dispersion);
  double rate = gamma(rng);
  if (rate <= 0.0) return 0;
  std::poisson_distribution<long long> pois(rate);
  return pois(rng);
}

}  // namespace

Geometry generate_geometry(const GeneratorConfig& cfg) {
  check_config(cfg);
  std::mt19937_64 rng = stage_rng(cfg.seed, 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Geometry geo;
  int grid = static_cast<int>(std::ceil(std::sqrt(double(cfg.n_cells))));
  double step = cfg.region_km / grid;
  double mean_lo = cfg.cell_mean * (1.0 - cfg.cell_mean_spread);
  double mean_hi = cfg.cell_mean * (1.0 + cfg.cell_mean_spread);
  for (int idx = 0; idx < cfg.n_cells; ++idx) {
    int gx = idx % grid, gy = idx / grid;
    Cell c;
    c.id = "c" + std::to_string(idx + 1);
    c.coord.x = (gx + 0.5) * step + (unit(rng) - 0.5) * 0.6 * step;
    c.coord.y = (gy + 0.5) * step + (unit(rng) - 0.5) * 0.6 * step;
    c.mean = mean_lo + (mean_hi - mean_lo) * unit(rng);
    geo.cells.push_back(c);
  }

  for (int i = 0; i < cfg.n_sites; ++i) {
    Site s;
    s.id = "l" + std::to_string(i + 1);
    s.setup_cost = cfg.site_setup_cost;
    s.session_cap = cfg.site_session_cap;
    s.coord = {unit(rng) * cfg.region_km, unit(rng) * cfg.region_km};
    geo.sites.push_back(s);
  }
  std::uniform_int_distribution<long long> cap(cfg.practice_cap_lo, cfg.practice_cap_hi);
  for (int i = 0; i < cfg.n_practices; ++i) {
    Practice p;
    p.id = "p" + std::to_string(i + 1);
    p.capacity = cap(rng);
    p.coord = {unit(rng) * cfg.region_km, unit(rng) * cfg.region_km};
    geo.practices.push_back(p);
  }

  auto driving_m = [&](const Point& a, const Point& b) {
    double km = std::hypot(a.x - b.x, a.y - b.y) * cfg.road_detour_factor;
    return static_cast<int>(round_half_up(km * 1000.0));
  };
  geo.distance_m.assign(geo.cells.size(), {});
  for (size_t c = 0; c < geo.cells.size(); ++c) {
    auto& row = geo.distance_m[c];
    row.reserve(geo.sites.size() + geo.practices.size());
    for (const Site& s : geo.sites) row.push_back(driving_m(geo.cells[c].coord, s.coord));
    for (const Practice& p : geo.practices) row.push_back(driving_m(geo.cells[c].coord, p.coord));
  }
  return geo;
}

DemandHistory simulate_weekly_demands(const GeneratorConfig& cfg, const std::vector<Cell>& cells,
                                      int attempt) {
  std::mt19937_64 rng = stage_rng(cfg.seed, 2, uint64_t(attempt));
  DemandHistory history(cells.size());
  for (size_t c = 0; c < cells.size(); ++c) {
    history[c].reserve(cfg.weeks);
    for (int wk = 0; wk < cfg.weeks; ++wk)
      history[c].push_back(draw_negbin(cells[c].mean, cfg.dispersion, rng));
  }
  return history;
}

std::vector<OriginGroup> aggregate_cells(const Geometry& geo, double delta_km) {
  const int n_sites = static_cast<int>(geo.sites.size());
  long long limit_m = round_half_up(delta_km * 1000.0);
  auto facility_id = [&](int key) {
    return key < n_sites ? geo.sites[key].id : geo.practices[key - n_sites].id;
  };

  // Keyed by the ordered consideration set; groups keep first-seen order.
  std::map<std::vector<std::pair<int, std::string>>, int> seen;
  std::vector<OriginGroup> groups;
  for (size_t c = 0; c < geo.cells.size(); ++c) {
    std::vector<std::pair<int, std::string>> key;
    for (size_t k = 0; k < geo.distance_m[c].size(); ++k)
      if (geo.distance_m[c][k] <= limit_m)
        key.push_back({geo.distance_m[c][k], facility_id(int(k))});
    if (key.empty()) continue;
    std::sort(key.begin(), key.end());

    auto it = seen.find(key);
    if (it == seen.end()) {
      OriginGroup g;
      for (const auto& [dist, id] : key) g.consideration.push_back({id, dist, {}});
      it = seen.emplace(std::move(key), int(groups.size())).first;
      groups.push_back(std::move(g));
    }
    groups[it->second].members.push_back(int(c));
  }

  // Deterministic origin order: by first member cell.
  std::sort(groups.begin(), groups.end(),
            [](const OriginGroup& a, const OriginGroup& b) {
              return a.members.front() < b.members.front();
            });
  return groups;
}

DerivedDemand derive_demands(const std::vector<long long>& weekly, double omega) {
  if (weekly.empty()) throw ModelError("demand history must cover at least one week");
  long long total = 0, mn = weekly.front(), mx = weekly.front();
  for (long long g : weekly) {
    total += g;
    mn = std::min(mn, g);
    mx = std::max(mx, g);
  }
  DerivedDemand d;
  long long avg = round_half_up(double(total) / double(weekly.size()));
  d.walkin = round_half_up(omega * double(avg));
  d.steerable = avg - d.walkin;
  d.wk_lo = round_half_up(omega * double(mn));
  d.st_lo = mn - d.wk_lo;
  d.wk_hi = round_half_up(omega * double(mx));
  d.st_hi = mx - d.wk_hi;
  return d;
}

std::pair<long long, long long> derive_budgets(const DemandHistory& history, double omega) {
  if (history.empty()) throw ModelError("demand history must cover at least one cell");
  size_t weeks = history.front().size();
  if (weeks == 0) throw ModelError("demand history must cover at least one week");
  long long m = 0;
  for (size_t wk = 0; wk < weeks; ++wk) {
    long long total = 0;
    for (const auto& row : history) {
      if (row.size() != weeks) throw ModelError("demand history rows differ in length");
      total += row[wk];
    }
    m = std::max(m, total);
  }
  long long gamma2 = round_half_up(omega * double(m));
  return {m - gamma2, gamma2};
}

namespace {

// Why a generated instance's nominal demands might fall outside its derived
// uncertainty sets: sums of per-origin roundings need not round like the
// total. Returns diagnostics, empty when consistent.
std::vector<std::string> budget_diagnostics(const std::vector<DerivedDemand>& ds,
                                            long long gamma1, long long gamma2) {
  long long sum_d = 0, sum_u = 0, sum_alpha = 0, sum_beta = 0, sum_sigma = 0, sum_tau = 0;
  for (const auto& d : ds) {
    sum_d += d.steerable;
    sum_u += d.walkin;
    sum_alpha += d.st_lo;
    sum_beta += d.st_hi;
    sum_sigma += d.wk_lo;
    sum_tau += d.wk_hi;
  }
  std::vector<std::string> bad;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) bad.push_back(what);
  };
  expect(sum_d <= gamma1, "sum of nominal steerable demands exceeds Gamma1");
  expect(sum_u <= gamma2, "sum of nominal walk-in demands exceeds Gamma2");
  expect(sum_alpha <= gamma1, "steerable lower bounds exceed Gamma1");
  expect(gamma1 <= sum_beta, "Gamma1 exceeds the steerable upper bounds");
  expect(sum_sigma <= gamma2, "walk-in lower bounds exceed Gamma2");
  expect(gamma2 <= sum_tau, "Gamma2 exceeds the walk-in upper bounds");
  return bad;
}

}  // namespace

GeneratedInstance generate_instance(const GeneratorConfig& cfg) {
  Geometry geo = generate_geometry(cfg);
  std::vector<OriginGroup> groups = aggregate_cells(geo, cfg.delta_km);
  if (groups.empty())
    throw ModelError("no cell has a facility within delta; increase delta_km");

  constexpr int kMaxAttempts = 32;
  std::vector<std::string> last_bad;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    DemandHistory cell_history = simulate_weekly_demands(cfg, geo.cells, attempt);

    DemandHistory origin_history(groups.size());
    for (size_t g = 0; g < groups.size(); ++g) {
      origin_history[g].assign(cfg.weeks, 0);
      for (int c : groups[g].members)
        for (int wk = 0; wk < cfg.weeks; ++wk) origin_history[g][wk] += cell_history[c][wk];
    }

    std::vector<DerivedDemand> demands;
    demands.reserve(groups.size());
    for (const auto& h : origin_history) demands.push_back(derive_demands(h, cfg.omega));
    auto [gamma1, gamma2] = derive_budgets(origin_history, cfg.omega);

    last_bad = budget_diagnostics(demands, gamma1, gamma2);
    if (!last_bad.empty()) continue;

    GeneratedInstance out;
    Instance& inst = out.instance;
    inst.sites = geo.sites;
    inst.practices = geo.practices;
    inst.session_cost = cfg.session_cost;
    inst.session_capacity = cfg.session_capacity;
    inst.uncertainty.kind = cfg.kind;
    if (cfg.kind == UncertaintyKind::budgeted) {
      inst.uncertainty.gamma_steerable = gamma1;
      inst.uncertainty.gamma_walkin = gamma2;
    }
    for (size_t g = 0; g < groups.size(); ++g) {
      DemandOrigin v;
      v.id = "v" + std::to_string(g + 1);
      v.steerable = demands[g].steerable;
      v.walkin = demands[g].walkin;
      v.steerable_lo = demands[g].st_lo;
      v.steerable_hi = demands[g].st_hi;
      v.walkin_lo = demands[g].wk_lo;
      v.walkin_hi = demands[g].wk_hi;
      v.consideration = groups[g].consideration;
      double cx = 0, cy = 0;
      for (int c : groups[g].members) {
        cx += geo.cells[c].coord.x;
        cy += geo.cells[c].coord.y;
      }
      v.coord = {cx / groups[g].members.size(), cy / groups[g].members.size()};
      inst.origins.push_back(std::move(v));
    }
    inst.resolve_references();
    require_valid(inst);

    out.cells.cells = geo.cells;
    for (size_t g = 0; g < groups.size(); ++g)
      for (int c : groups[g].members) out.cells.cells[c].origin = int(g);
    out.cells.omega = cfg.omega;
    out.cells.dispersion = cfg.dispersion;
    out.cells.weeks = cfg.weeks;
    out.cells.seed = cfg.seed;
    out.cells.attempt = attempt;
    for (const Cell& c : out.cells.cells)
      if (c.origin < 0) ++out.cells.dropped_cells;
    return out;
  }

  std::string msg = "demand derivation failed to place the nominal vector inside the "
                    "uncertainty sets after " + std::to_string(kMaxAttempts) + " attempts:";
  for (const auto& b : last_bad) msg += "\n  - " + b;
  throw ModelError(msg);
}

void write_cells(const std::string& path, const CellSet& cs) {
  nlohmann::json j;
  j["omega"] = cs.omega;
  j["dispersion"] = cs.dispersion;
  j["weeks"] = cs.weeks;
  j["seed"] = cs.seed;
  j["attempt"] = cs.attempt;
  j["dropped_cells"] = cs.dropped_cells;
  j["cells"] = nlohmann::json::array();
  for (const Cell& c : cs.cells) {
    nlohmann::json jc;
    jc["id"] = c.id;
    jc["coord"] = {c.coord.x, c.coord.y};
    jc["mean"] = c.mean;
    jc["origin"] = c.origin;
    j["cells"].push_back(std::move(jc));
  }
  std::ofstream out(path);
  if (!out) throw ModelError("cannot write cells file '" + path + "'");
  out << j.dump(2) << "\n";
}

CellSet read_cells(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot read cells file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelError("cells file '" + path + "' is not valid JSON: " + e.what());
  }

  CellSet cs;
  cs.omega = j.at("omega").get<double>();
  cs.dispersion = j.at("dispersion").get<double>();
  cs.weeks = j.at("weeks").get<int>();
  cs.seed = j.at("seed").get<uint64_t>();
  cs.attempt = j.value("attempt", 0);
  cs.dropped_cells = j.value("dropped_cells", 0);
  for (const auto& jc : j.at("cells")) {
    Cell c;
    c.id = jc.at("id").get<std::string>();
    c.coord.x = jc.at("coord").at(0).get<double>();
    c.coord.y = jc.at("coord").at(1).get<double>();
    c.mean = jc.at("mean").get<double>();
    c.origin = jc.at("origin").get<int>();
    cs.cells.push_back(std::move(c));
  }
  return cs;
}

}  // namespace mmu
