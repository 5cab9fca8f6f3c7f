#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <random>

#include "mmu/milp.hpp"

using namespace mmu;
using milp::Model;
using milp::RowSense;
using milp::Sense;
using milp::Status;
using milp::VarType;

TEST_CASE("lp: hand-checked optima") {
  // max 3a + 2b  s.t.  a + b <= 4, a <= 2  ->  10 at (2, 2).
  Model m(Sense::maximize);
  int a = m.add_var(0, milp::kInf, VarType::continuous, 3.0);
  int b = m.add_var(0, milp::kInf, VarType::continuous, 2.0);
  m.add_constraint({{a, 1.0}, {b, 1.0}}, RowSense::le, 4.0);
  m.add_constraint({{a, 1.0}}, RowSense::le, 2.0);
  auto out = m.solve();
  REQUIRE(out.status == Status::optimal);
  CHECK(out.objective == doctest::Approx(10.0));
  CHECK(out.values[a] == doctest::Approx(2.0));
  CHECK(out.values[b] == doctest::Approx(2.0));
}

TEST_CASE("lp: equality rows and variable bounds") {
  // min a + 4b  s.t.  a + 2b = 6, 1 <= a <= 3, b >= 0  ->  a = 3, b = 1.5.
  Model m(Sense::minimize);
  int a = m.add_var(1, 3, VarType::continuous, 1.0);
  int b = m.add_var(0, milp::kInf, VarType::continuous, 4.0);
  m.add_constraint({{a, 1.0}, {b, 2.0}}, RowSense::eq, 6.0);
  auto out = m.solve();
  REQUIRE(out.status == Status::optimal);
  CHECK(out.objective == doctest::Approx(9.0));
  CHECK(out.values[a] == doctest::Approx(3.0));
  CHECK(out.values[b] == doctest::Approx(1.5));
}

TEST_CASE("lp: infeasible and unbounded are told apart") {
  {
    Model m(Sense::minimize);
    int a = m.add_var(0, 1, VarType::continuous, 1.0);
    m.add_constraint({{a, 1.0}}, RowSense::ge, 2.0);
    CHECK(m.solve().status == Status::infeasible);
  }
  {
    Model m(Sense::maximize);
    m.add_var(0, milp::kInf, VarType::continuous, 1.0);
    CHECK(m.solve().status == Status::unbounded);
  }
}

TEST_CASE("branch and bound needs to branch on a fractional relaxation") {
  // max 5a + 4b  s.t.  3a + 2b <= 4, binary. Relaxation gives (1, 0.5) with
  // value 7; the integer optimum is 5.
  Model m(Sense::maximize);
  int a = m.add_var(0, 1, VarType::integer, 5.0);
  int b = m.add_var(0, 1, VarType::integer, 4.0);
  m.add_constraint({{a, 3.0}, {b, 2.0}}, RowSense::le, 4.0);
  auto out = m.solve();
  REQUIRE(out.status == Status::optimal);
  CHECK(out.objective == doctest::Approx(5.0));
  CHECK(out.values[a] == doctest::Approx(1.0));
  CHECK(out.values[b] == doctest::Approx(0.0));
  CHECK(out.nodes >= 1);
}

namespace {

struct GridModel {
  Model model{Sense::minimize};
  std::vector<int> vars;
  std::vector<int> ub;
  // Rows mirrored for the enumeration side.
  std::vector<std::vector<int>> coef;
  std::vector<RowSense> sense;
  std::vector<int> rhs;
  std::vector<int> obj;
  bool maximize = false;
};

GridModel random_grid_model(std::mt19937_64& rng) {
  auto uniform = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  GridModel g;
  g.maximize = uniform(0, 1) == 1;
  g.model = Model(g.maximize ? Sense::maximize : Sense::minimize);
  const int n = uniform(2, 4);
  for (int j = 0; j < n; ++j) {
    g.ub.push_back(uniform(1, 4));
    g.obj.push_back(uniform(-5, 5));
    g.vars.push_back(g.model.add_var(0, g.ub[j], VarType::integer, g.obj[j]));
  }
  const int rows = uniform(1, 5);
  for (int i = 0; i < rows; ++i) {
    std::vector<int> c(n);
    std::vector<milp::Term> terms;
    for (int j = 0; j < n; ++j) {
      c[j] = uniform(-3, 3);
      if (c[j] != 0) terms.push_back({g.vars[j], double(c[j])});
    }
    RowSense s = std::array{RowSense::le, RowSense::ge, RowSense::eq}[uniform(0, 2)];
    int rhs = uniform(-4, 10);
    g.coef.push_back(c);
    g.sense.push_back(s);
    g.rhs.push_back(rhs);
    g.model.add_constraint(terms, s, double(rhs));
  }
  return g;
}

// Best objective over the full integer grid, nullopt when infeasible.
std::optional<int> grid_optimum(const GridModel& g) {
  const int n = int(g.ub.size());
  std::vector<int> x(n, 0);
  std::optional<int> best;
  while (true) {
    bool ok = true;
    for (size_t i = 0; i < g.coef.size() && ok; ++i) {
      long long lhs = 0;
      for (int j = 0; j < n; ++j) lhs += (long long)g.coef[i][j] * x[j];
      switch (g.sense[i]) {
        case RowSense::le: ok = lhs <= g.rhs[i]; break;
        case RowSense::ge: ok = lhs >= g.rhs[i]; break;
        case RowSense::eq: ok = lhs == g.rhs[i]; break;
      }
    }
    if (ok) {
      int val = 0;
      for (int j = 0; j < n; ++j) val += g.obj[j] * x[j];
      if (!best || (g.maximize ? val > *best : val < *best)) best = val;
    }
    int j = 0;
    while (j < n && x[j] == g.ub[j]) x[j++] = 0;
    if (j == n) break;
    ++x[j];
  }
  return best;
}

}  // namespace

TEST_CASE("branch and bound matches grid enumeration on random models") {
  std::mt19937_64 rng(42);
  int solved = 0;
  for (int rep = 0; rep < 60; ++rep) {
    GridModel g = random_grid_model(rng);
    std::optional<int> want = grid_optimum(g);
    auto out = g.model.solve();
    if (!want) {
      CHECK(out.status == Status::infeasible);
      continue;
    }
    ++solved;
    REQUIRE(out.status == Status::optimal);
    CHECK(std::llround(out.objective) == *want);
    // The incumbent itself must be integral and feasible.
    long long val = 0;
    for (size_t j = 0; j < g.vars.size(); ++j) {
      double v = out.values[g.vars[j]];
      CHECK(v == doctest::Approx(std::llround(v)));
      val += g.obj[j] * std::llround(v);
    }
    CHECK(val == *want);
  }
  CHECK(solved > 10);  // the draw must not be degenerate
}

TEST_CASE("integral objectives close the default gap exactly") {
  // With every cost integral the solver may stop once the bound rounds to
  // the incumbent, and the reported gap collapses to zero.
  Model m(Sense::minimize);
  std::vector<int> v;
  for (int j = 0; j < 6; ++j) v.push_back(m.add_var(0, 3, VarType::integer, 2 + j % 3));
  std::vector<milp::Term> row;
  for (int j = 0; j < 6; ++j) row.push_back({v[j], double(1 + j % 2)});
  m.add_constraint(row, RowSense::ge, 11.0);
  auto out = m.solve();
  REQUIRE(out.status == Status::optimal);
  CHECK(out.gap == doctest::Approx(0.0));
}

TEST_CASE("node limit reports a limit status") {
  std::mt19937_64 rng(9001);
  milp::SolveConfig cfg;
  cfg.node_limit = 1;
  bool limited = false;
  for (int rep = 0; rep < 20 && !limited; ++rep) {
    GridModel g = random_grid_model(rng);
    limited = g.model.solve(cfg).status == Status::limit;
  }
  CHECK(limited);  // at least one draw needs branching
}

TEST_CASE("mixed continuous and integer variables") {
  // min 2a + c  s.t.  a + c >= 3.5, a integer in [0,5], c in [0,1].
  // c tops out at 1, a must round up to 3.
  Model m(Sense::minimize);
  int a = m.add_var(0, 5, VarType::integer, 2.0);
  int c = m.add_var(0, 1, VarType::continuous, 1.0);
  m.add_constraint({{a, 1.0}, {c, 1.0}}, RowSense::ge, 3.5);
  auto out = m.solve();
  REQUIRE(out.status == Status::optimal);
  CHECK(out.values[a] == doctest::Approx(3.0));
  CHECK(out.objective == doctest::Approx(6.5));
}

TEST_CASE("add_constraint_and_resolve tightens the optimum") {
  Model m(Sense::maximize);
  int a = m.add_var(0, 10, VarType::integer, 1.0);
  auto out = m.solve();
  REQUIRE(out.status == Status::optimal);
  CHECK(out.objective == doctest::Approx(10.0));
  out = m.add_constraint_and_resolve({{a, 1.0}}, RowSense::le, 6.0);
  REQUIRE(out.status == Status::optimal);
  CHECK(out.objective == doctest::Approx(6.0));
  CHECK(m.num_rows() == 1);
}

TEST_CASE("backend selection by environment variable") {
  auto names = milp::backend_names();
  CHECK(std::find(names.begin(), names.end(), "builtin") != names.end());

  Model m(Sense::minimize);
  m.add_var(0, 1, VarType::integer, 1.0);

  setenv("MMU_MILP_BACKEND", "does-not-exist", 1);
  try {
    m.solve();
    unsetenv("MMU_MILP_BACKEND");
    FAIL("expected ModelError for unknown backend");
  } catch (const ModelError& e) {
    unsetenv("MMU_MILP_BACKEND");
    CHECK(std::string(e.what()).find("builtin") != std::string::npos);
  }

  setenv("MMU_MILP_BACKEND", "builtin", 1);
  CHECK(m.solve().status == Status::optimal);
  unsetenv("MMU_MILP_BACKEND");
}

TEST_CASE("config validation") {
  Model m(Sense::minimize);
  m.add_var(0, 1, VarType::integer, 1.0);
  milp::SolveConfig cfg;
  cfg.threads = 0;
  CHECK_THROWS_AS(m.solve(cfg), ModelError);
  cfg.threads = 4;  // accepted, backend runs single threaded
  cfg.gap_tol = -0.1;
  CHECK_THROWS_AS(m.solve(cfg), ModelError);
  CHECK_THROWS_AS(m.add_var(2, 1, VarType::integer, 0.0), ModelError);
  CHECK_THROWS_AS(m.add_constraint({{5, 1.0}}, RowSense::le, 0.0), ModelError);
}
