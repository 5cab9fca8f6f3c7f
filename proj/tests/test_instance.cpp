#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "mmu/instance.hpp"
#include "mmu/instance_io.hpp"
#include "mmu/plan.hpp"

#include "helpers.hpp"

using namespace mmu;

TEST_CASE("tiny fixture is well formed") {
  Instance inst = testing::tiny_instance();
  CHECK(validate_instance(inst).empty());
  CHECK(inst.site_index("l1") == 0);
  CHECK(inst.practice_index("p1") == 0);
  CHECK(inst.origin_index("v1") == 0);
  CHECK(inst.origins[0].consideration[0].fac == practice_ref(0));
  CHECK(inst.origins[0].consideration[1].fac == site_ref(0));
}

TEST_CASE("validation catches structural defects") {
  Instance inst = testing::tiny_instance();

  SUBCASE("duplicate id") {
    inst.practices.push_back({"l1", 5, {}});
    auto diags = validate_instance(inst);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].find("duplicate id 'l1'") != std::string::npos);
  }
  SUBCASE("unknown facility reference") {
    inst.origins[0].consideration[0].facility_id = "p9";
    inst.resolve_references();
    auto diags = validate_instance(inst);
    REQUIRE(!diags.empty());
    CHECK(diags[0].find("unknown facility 'p9'") != std::string::npos);
  }
  SUBCASE("consideration out of distance order") {
    std::swap(inst.origins[0].consideration[0], inst.origins[0].consideration[1]);
    auto diags = validate_instance(inst);
    REQUIRE(!diags.empty());
    CHECK(diags[0].find("(distance, id)") != std::string::npos);
  }
  SUBCASE("distance tie must be id ordered") {
    inst.sites.push_back({"a1", 1, 2, {}});
    inst.origins[0].consideration.push_back({"a1", 1000, {}});
    inst.resolve_references();
    // p1@500, l1@1000, a1@1000 breaks the tie rule ('a1' < 'l1').
    CHECK(!validate_instance(inst).empty());
    std::swap(inst.origins[0].consideration[1], inst.origins[0].consideration[2]);
    CHECK(validate_instance(inst).empty());
  }
  SUBCASE("positive demand needs a consideration set") {
    inst.origins[0].consideration.clear();
    CHECK(!validate_instance(inst).empty());
    inst.origins[0].steerable = 0;
    inst.origins[0].walkin = 0;
    inst.origins[0].steerable_lo = inst.origins[0].steerable_hi = 0;
    inst.origins[0].walkin_lo = inst.origins[0].walkin_hi = 0;
    CHECK(validate_instance(inst).empty());
  }
  SUBCASE("interval bounds must be ordered") {
    inst.origins[0].steerable_lo = 31;
    inst.origins[0].steerable_hi = 30;
    CHECK(!validate_instance(inst).empty());
  }
  SUBCASE("budgets must keep the uncertainty set nonempty") {
    inst = testing::tiny_budgeted(true);
    inst.uncertainty.gamma_steerable = 24;  // below alpha = 25
    auto diags = validate_instance(inst);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].find("Gamma1") != std::string::npos);
    inst.uncertainty.gamma_steerable = 89;  // above beta = 88
    CHECK(validate_instance(inst).size() == 1);
  }
  SUBCASE("require_valid throws with all diagnostics") {
    inst.origins[0].steerable = -1;
    inst.session_cost = 0;
    CHECK_THROWS_AS(require_valid(inst), ModelError);
  }
}

TEST_CASE("closest operating facility follows the consideration order") {
  Instance inst = testing::tiny_instance();
  // p1 is closest and always open.
  CHECK(closest_operating_facility(inst, 0, {0}) == practice_ref(0));
  CHECK(closest_operating_facility(inst, 0, {1}) == practice_ref(0));

  // Swap priorities: site first.
  inst.origins[0].consideration = {{"l1", 400, {}}, {"p1", 500, {}}};
  inst.resolve_references();
  CHECK(closest_operating_facility(inst, 0, {1}) == site_ref(0));
  CHECK(closest_operating_facility(inst, 0, {0}) == practice_ref(0));

  // Only closed sites -> nothing operates.
  inst.origins[0].consideration = {{"l1", 400, {}}};
  inst.resolve_references();
  CHECK(!closest_operating_facility(inst, 0, {0}).has_value());
}

TEST_CASE("instance json round trip") {
  Instance inst = testing::tiny_budgeted(true);
  std::string text = instance_to_json(inst);
  Instance back = instance_from_json(text);
  CHECK(validate_instance(back).empty());
  CHECK(back.sites.size() == 1);
  CHECK(back.sites[0].setup_cost == 2);
  CHECK(back.practices[0].capacity == 4);
  CHECK(back.origins[0].steerable == 30);
  CHECK(back.origins[0].steerable_hi == 88);
  CHECK(back.origins[0].consideration[1].distance_m == 1000);
  CHECK(back.uncertainty.kind == UncertaintyKind::budgeted);
  CHECK(back.uncertainty.gamma_steerable == 58);
  CHECK(instance_to_json(back) == text);
}

TEST_CASE("instance json reports schema problems") {
  SUBCASE("not json") {
    CHECK_THROWS_AS(instance_from_json("not json"), ModelError);
  }
  SUBCASE("missing required field is named") {
    try {
      instance_from_json(R"({"sites": [{"id": "l1"}], "practices": [], "origins": []})");
      FAIL("expected ModelError");
    } catch (const ModelError& e) {
      CHECK(std::string(e.what()).find("setup_cost") != std::string::npos);
    }
  }
  SUBCASE("unknown fields warn but parse") {
    std::vector<std::string> warnings;
    Instance inst = instance_from_json(
        R"({"sites": [], "practices": [], "origins": [], "session_cost": 1,
            "session_capacity": 1, "uncertainty": {"kind": "deterministic"},
            "color": "green"})",
        &warnings);
    CHECK(inst.sites.empty());
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("color") != std::string::npos);
  }
  SUBCASE("unknown uncertainty kind") {
    CHECK_THROWS_AS(instance_from_json(
                        R"({"sites": [], "practices": [], "origins": [], "session_cost": 1,
                            "session_capacity": 1, "uncertainty": {"kind": "fuzzy"}})"),
                    ModelError);
  }
}

TEST_CASE("instance and plan files") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "mmu_io_test";
  fs::create_directories(dir);

  Instance inst = testing::tiny_instance();
  write_instance((dir / "inst.json").string(), inst);
  Instance back = read_instance((dir / "inst.json").string());
  CHECK(instance_to_json(back) == instance_to_json(inst));

  Plan plan;
  plan.setup["l1"] = 1;
  plan.sessions["l1"] = 2;
  plan.walkin_route["v1"] = "p1";
  plan.steerable_assign = {{"v1", {{"l1", 29}, {"p1", 1}}}};
  plan.cost = 4;
  write_plan((dir / "plan.json").string(), plan);
  Plan pback = read_plan((dir / "plan.json").string());
  CHECK(pback.setup == plan.setup);
  CHECK(pback.sessions == plan.sessions);
  CHECK(pback.walkin_route == plan.walkin_route);
  CHECK(pback.steerable_assign == plan.steerable_assign);
  CHECK(pback.cost == 4);

  CHECK_THROWS_AS(read_instance((dir / "missing.json").string()), ModelError);
  fs::remove_all(dir);
}

TEST_CASE("plan cost counts setup only for running sites") {
  Instance inst = testing::tiny_instance();
  Plan plan;
  plan.setup["l1"] = 1;
  plan.sessions["l1"] = 2;
  CHECK(plan_cost(inst, plan) == 4);  // 2 setup + 2 sessions
  plan.sessions["l1"] = 0;
  CHECK(plan_cost(inst, plan) == 0);
  plan.sessions["nope"] = 1;
  CHECK_THROWS_AS(plan_cost(inst, plan), ModelError);
}

TEST_CASE("plan validation") {
  Instance inst = testing::tiny_instance();
  Plan plan;
  plan.setup["l1"] = 1;
  plan.sessions["l1"] = 2;
  plan.walkin_route["v1"] = "p1";
  plan.steerable_assign = {{"v1", {{"l1", 29}, {"p1", 1}}}};
  CHECK(validate_plan(inst, plan).empty());

  SUBCASE("sessions above the cap") {
    plan.sessions["l1"] = 11;
    CHECK(!validate_plan(inst, plan).empty());
  }
  SUBCASE("sessions without setup") {
    plan.setup["l1"] = 0;
    CHECK(!validate_plan(inst, plan).empty());
  }
  SUBCASE("walk-ins to a closed site") {
    plan.setup["l1"] = 0;
    plan.sessions["l1"] = 0;
    plan.walkin_route["v1"] = "l1";
    auto diags = validate_plan(inst, plan);
    REQUIRE(!diags.empty());
    CHECK(diags.back().find("closed site") != std::string::npos);
  }
  SUBCASE("walk-ins outside the consideration set") {
    plan.walkin_route["v1"] = "p9";
    CHECK(!validate_plan(inst, plan).empty());
  }
  SUBCASE("assignment must sum to the steerable demand") {
    (*plan.steerable_assign)["v1"]["l1"] = 28;
    auto diags = validate_plan(inst, plan);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].find("sums to 29") != std::string::npos);
  }
}

TEST_CASE("walk-in normalization keeps the first hit") {
  Instance inst = testing::tiny_instance();
  WalkinMatrix w = {{0, 1}};
  CHECK(normalize_walkin_assignment(inst, w) == WalkinMatrix{{0, 1}});
  w = {{1, 1}};
  CHECK(normalize_walkin_assignment(inst, w) == WalkinMatrix{{1, 0}});
  CHECK_THROWS_AS(normalize_walkin_assignment(inst, {{1}}), ModelError);
}

TEST_CASE("assignment trimming removes surplus from the front") {
  CHECK(trim_assignment_row(5, {3, 4}) == std::vector<long long>{1, 4});
  CHECK(trim_assignment_row(5, {3, 2}) == std::vector<long long>{3, 2});
  CHECK(trim_assignment_row(0, {2, 3}) == std::vector<long long>{0, 0});
  CHECK(trim_assignment_row(4, {1, 1, 8}) == std::vector<long long>{0, 0, 4});
  CHECK_THROWS_AS(trim_assignment_row(6, {3, 2}), ModelError);
  CHECK_THROWS_AS(trim_assignment_row(1, {-1, 2}), ModelError);
}

TEST_CASE("random instances satisfy the validator") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 25; ++i) {
    testing::RandomSpec spec;
    spec.kind = i % 2 ? UncertaintyKind::budgeted : UncertaintyKind::deterministic;
    Instance inst = testing::random_instance(rng, spec);
    CHECK(validate_instance(inst).empty());
  }
}
