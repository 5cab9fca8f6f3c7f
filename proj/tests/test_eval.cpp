#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mmu/evaluate.hpp"
#include "mmu/instgen.hpp"

#include "helpers.hpp"

using namespace mmu;

namespace {

// One practice (capacity `cap`) and one origin considering it; demands are
// set per test through the realization, the plan stays empty.
Instance practice_only(int cap) {
  Instance inst;
  inst.session_cost = 1;
  inst.session_capacity = 28;
  inst.practices.push_back({"p1", cap, {0.0, 0.0}});
  DemandOrigin v;
  v.id = "v1";
  v.consideration.push_back({"p1", 500, {}});
  inst.origins.push_back(std::move(v));
  inst.resolve_references();
  return inst;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(bool(in));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("walk-in overload counts the excess at the routed facility") {
  Instance inst = practice_only(200);
  Realization real{{0}, {220}, "t"};
  CHECK(min_total_violations(inst, Plan{}, real) == 20);
  real.walkin[0] = 200;
  CHECK(min_total_violations(inst, Plan{}, real) == 0);
}

TEST_CASE("origins without an operating facility forfeit all their demand") {
  Instance inst;
  inst.session_cost = 1;
  inst.session_capacity = 28;
  inst.sites.push_back({"l1", 2, 10, {0.0, 0.0}});
  DemandOrigin v;
  v.id = "v1";
  v.steerable = 7;
  v.walkin = 5;
  v.steerable_lo = v.steerable_hi = 7;
  v.walkin_lo = v.walkin_hi = 5;
  v.consideration.push_back({"l1", 800, {}});
  inst.origins.push_back(std::move(v));
  inst.resolve_references();

  Realization real{{7}, {5}, "t"};
  CHECK(min_total_violations(inst, Plan{}, real) == 12);

  Plan open;
  open.setup["l1"] = 1;
  open.sessions["l1"] = 1;
  CHECK(min_total_violations(inst, open, real) == 0);
}

TEST_CASE("steerable demand spreads across the consideration set first") {
  Instance inst;
  inst.session_cost = 1;
  inst.session_capacity = 28;
  inst.practices.push_back({"p1", 4, {0.0, 0.0}});
  inst.practices.push_back({"p2", 4, {1.0, 0.0}});
  DemandOrigin v;
  v.id = "v1";
  v.steerable = 10;
  v.steerable_lo = v.steerable_hi = 10;
  v.consideration.push_back({"p1", 500, {}});
  v.consideration.push_back({"p2", 600, {}});
  inst.origins.push_back(std::move(v));
  inst.resolve_references();

  Realization real{{10}, {0}, "t"};
  CHECK(min_total_violations(inst, Plan{}, real) == 2);

  // Walk-ins claim their share of the closest facility before steering.
  real = {{8}, {4}, "t"};
  CHECK(min_total_violations(inst, Plan{}, real) == 4);  // 12 into 4 + 4
}

TEST_CASE("realization size must match the instance") {
  Instance inst = practice_only(10);
  CHECK_THROWS_AS(min_total_violations(inst, Plan{}, Realization{{1, 2}, {0, 0}, "t"}),
                  ModelError);
}

TEST_CASE("metric equals the direct minimum-overage program") {
  std::mt19937_64 rng(91);
  auto uniform = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  int nonzero = 0;
  for (int rep = 0; rep < 20; ++rep) {
    testing::RandomSpec spec;
    spec.max_origins = 8;
    Instance inst = testing::random_instance(rng, spec);

    Plan plan;
    for (const Site& s : inst.sites) {
      int y = uniform(0, 1);
      plan.setup[s.id] = y;
      plan.sessions[s.id] = y ? uniform(0, s.session_cap) : 0;
    }
    Realization real;
    real.tag = "t";
    for (size_t v = 0; v < inst.origins.size(); ++v) {
      real.steerable.push_back(uniform(0, 12));
      real.walkin.push_back(uniform(0, 6));
    }

    long long got = min_total_violations(inst, plan, real);
    CHECK(got == testing::min_overage_oracle(inst, plan, real));
    if (got > 0) ++nonzero;

    // One extra patient changes the minimum by at most one.
    Realization bumped = real;
    bumped.steerable[uniform(0, int(inst.origins.size()) - 1)] += 1;
    long long after = min_total_violations(inst, plan, bumped);
    CHECK(after >= got);
    CHECK(after <= got + 1);
  }
  CHECK(nonzero > 3);
}

TEST_CASE("budget-set sampling respects boxes and budget rows") {
  Instance inst = testing::tiny_budgeted(true);
  SampleSpec spec;
  spec.mode = SampleMode::budgeted_set;
  spec.count = 50;
  spec.seed = 9;
  std::vector<Realization> reals = sample_realizations(inst, nullptr, spec);
  REQUIRE(reals.size() == 50);
  for (const Realization& r : reals) {
    CHECK(r.tag == "budget-set");
    CHECK(r.steerable[0] >= 25);
    CHECK(r.steerable[0] <= 58);  // the budget bites below the box top of 88
    CHECK(r.walkin[0] >= 2);
    CHECK(r.walkin[0] <= 4);
  }

  // Same seed, same stream.
  std::vector<Realization> again = sample_realizations(inst, nullptr, spec);
  for (int i = 0; i < 50; ++i) CHECK(reals[i].steerable == again[i].steerable);
}

TEST_CASE("interval instances sample the plain boxes, no budget gate") {
  Instance inst = testing::tiny_budgeted(true);
  inst.uncertainty.kind = UncertaintyKind::interval;
  inst.uncertainty.gamma_steerable = 0;  // would reject everything if it were applied
  inst.uncertainty.gamma_walkin = 0;
  SampleSpec spec;
  spec.count = 40;
  spec.seed = 10;
  std::vector<Realization> reals = sample_realizations(inst, nullptr, spec);
  bool above_gamma = false;
  for (const Realization& r : reals) {
    CHECK(r.steerable[0] >= 25);
    CHECK(r.steerable[0] <= 88);
    above_gamma = above_gamma || r.steerable[0] > 58;
  }
  CHECK(above_gamma);
}

TEST_CASE("persistent rejection is an error, not a hang") {
  // Twelve origins drawing uniformly from [0,10] while Gamma1 = 0: the budget
  // row only accepts the all-zero vector.
  Instance inst;
  inst.session_cost = 1;
  inst.session_capacity = 28;
  inst.practices.push_back({"p1", 10, {0.0, 0.0}});
  for (int v = 0; v < 12; ++v) {
    DemandOrigin o;
    o.id = "v" + std::to_string(v + 1);
    o.steerable_hi = 10;
    o.consideration.push_back({"p1", 500, {}});
    inst.origins.push_back(std::move(o));
  }
  inst.uncertainty.kind = UncertaintyKind::budgeted;
  inst.resolve_references();
  require_valid(inst);

  SampleSpec spec;
  spec.count = 1;
  spec.seed = 3;
  CHECK_THROWS_WITH_AS(sample_realizations(inst, nullptr, spec),
                       doctest::Contains("rejection sampling failed"), ModelError);
}

TEST_CASE("history sampling needs the cell sidecar") {
  Instance inst = practice_only(10);
  SampleSpec spec;
  spec.mode = SampleMode::history;
  CHECK_THROWS_AS(sample_realizations(inst, nullptr, spec), ModelError);
  spec.mode = SampleMode::budgeted_set;
  spec.count = 0;
  CHECK_THROWS_AS(sample_realizations(inst, nullptr, spec), ModelError);
}

TEST_CASE("history sampling replays the generator's demand process") {
  GeneratorConfig cfg;
  cfg.seed = 12;
  cfg.n_cells = 20;
  cfg.n_sites = 4;
  cfg.n_practices = 3;
  cfg.region_km = 6.0;
  cfg.delta_km = 3.0;
  cfg.weeks = 8;
  GeneratedInstance gen = generate_instance(cfg);

  SampleSpec spec;
  spec.mode = SampleMode::history;
  spec.count = 6;
  spec.omega = cfg.omega;
  spec.seed = 42;
  std::vector<Realization> reals = sample_realizations(gen.instance, &gen.cells, spec);
  REQUIRE(reals.size() == 6);
  long long total = 0;
  for (const Realization& r : reals) {
    CHECK(r.tag == "sampled-history");
    REQUIRE(r.steerable.size() == gen.instance.origins.size());
    for (size_t v = 0; v < r.steerable.size(); ++v) {
      CHECK(r.steerable[v] >= 0);
      total += r.steerable[v] + r.walkin[v];
    }
  }
  CHECK(total > 0);

  std::vector<Realization> again = sample_realizations(gen.instance, &gen.cells, spec);
  for (int i = 0; i < 6; ++i) {
    CHECK(reals[i].steerable == again[i].steerable);
    CHECK(reals[i].walkin == again[i].walkin);
  }

  spec.outbreaks = 1;
  std::vector<Realization> shocked = sample_realizations(gen.instance, &gen.cells, spec);
  for (const Realization& r : shocked) CHECK(r.tag == "outbreak-perturbed");
}

TEST_CASE("outbreak zones compound multiplicatively") {
  CellSet cs;
  cs.cells.push_back({"c1", {0.0, 0.0}, 5.0, 0});
  cs.cells.push_back({"c2", {0.0, 0.0}, 5.0, 0});  // same spot: every center hits both
  cs.omega = 0.2;
  cs.dispersion = 8.0;
  cs.weeks = 4;

  CellRealization cr;
  cr.steerable = {3, 5};
  cr.walkin = {1, 2};

  std::mt19937_64 rng(7);
  CellRealization out = apply_outbreaks(cs, cr, 2, 1.0, 2, rng);
  CHECK(out.steerable == std::vector<long long>{12, 20});  // doubled twice
  CHECK(out.walkin == std::vector<long long>{4, 8});

  CHECK_THROWS_AS(apply_outbreaks(cs, cr, 3, 1.0, 2, rng), ModelError);

  Instance inst = practice_only(10);
  Realization agg = aggregate_to_origins(inst, cs, out, "outbreak-perturbed");
  CHECK(agg.steerable == std::vector<long long>{32});
  CHECK(agg.walkin == std::vector<long long>{12});

  CellRealization wrong;
  wrong.steerable = {1};
  wrong.walkin = {1};
  CHECK_THROWS_AS(aggregate_to_origins(inst, cs, wrong, "t"), ModelError);
}

TEST_CASE("dropped cells stay out of the aggregation") {
  CellSet cs;
  cs.cells.push_back({"c1", {0.0, 0.0}, 5.0, 0});
  cs.cells.push_back({"c2", {9.0, 9.0}, 5.0, -1});  // outside every radius
  CellRealization cr;
  cr.steerable = {3, 100};
  cr.walkin = {1, 100};
  Realization agg = aggregate_to_origins(practice_only(10), cs, cr, "t");
  CHECK(agg.steerable == std::vector<long long>{3});
  CHECK(agg.walkin == std::vector<long long>{1});
}

TEST_CASE("model comparison summarizes violations per plan") {
  Instance inst;
  inst.session_cost = 1;
  inst.session_capacity = 28;
  inst.sites.push_back({"l1", 2, 10, {0.0, 0.0}});
  inst.practices.push_back({"p1", 10, {1.0, 0.0}});
  DemandOrigin v;
  v.id = "v1";
  v.walkin = 10;
  v.walkin_lo = v.walkin_hi = 10;
  v.consideration.push_back({"l1", 400, {}});
  v.consideration.push_back({"p1", 500, {}});
  inst.origins.push_back(std::move(v));
  inst.resolve_references();

  Plan base;  // nothing set up, walk-ins fall to the practice
  Plan robust;
  robust.setup["l1"] = 1;
  robust.sessions["l1"] = 1;

  std::vector<Realization> reals;
  for (long long w : {10, 13, 17, 12}) reals.push_back({{0}, {w}, "t"});

  EvaluationReport rep = evaluate_models(inst, {{"base", base}, {"robust", robust}}, reals);
  REQUIRE(rep.models == std::vector<std::string>{"base", "robust"});
  CHECK(rep.violations[0] == std::vector<long long>{0, 3, 7, 2});
  CHECK(rep.violations[1] == std::vector<long long>{0, 0, 0, 0});

  const ModelSummary& s0 = rep.summaries[0];
  CHECK(s0.mean == doctest::Approx(3.0));
  CHECK(s0.max == 7);
  CHECK(s0.p95 == 7);  // nearest-rank: ceil(0.95 * 4) = 4th of the sorted values
  CHECK(s0.cost == 0);
  CHECK(rep.summaries[1].cost == 3);
  CHECK(rep.summaries[1].max == 0);

  // Nearest-rank percentile on a larger spread: 0..19 gives the 19th value.
  std::vector<Realization> spread;
  for (long long i = 0; i < 20; ++i) spread.push_back({{0}, {10 + i}, "t"});
  EvaluationReport wide = evaluate_models(inst, {{"base", base}}, spread);
  CHECK(wide.summaries[0].p95 == 18);
  CHECK(wide.summaries[0].max == 19);

  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "mmu_eval_test";
  fs::create_directories(dir);
  std::string rows_path = (dir / "rows.csv").string();
  std::string sum_path = (dir / "summary.csv").string();
  write_report_csv(rep, rows_path, sum_path);

  std::vector<std::string> rows = read_lines(rows_path);
  REQUIRE(rows.size() == 9);  // header + 2 models * 4 realizations
  CHECK(rows[0] == "model,realization_id,violations");
  CHECK(rows[1] == "base,0,0");
  CHECK(rows[3] == "base,2,7");
  CHECK(rows[5] == "robust,0,0");

  std::vector<std::string> sum = read_lines(sum_path);
  REQUIRE(sum.size() == 3);
  CHECK(sum[0] == "model,mean,max,p95,cost");
  CHECK(sum[1] == "base,3,7,7,0");
  CHECK(sum[2] == "robust,0,0,0,3");
  fs::remove_all(dir);
}
