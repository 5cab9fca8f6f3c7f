#ifndef MMU_SIMPLEX_HPP
#define MMU_SIMPLEX_HPP

// Bounded-variable primal simplex over a dense basis inverse (Eigen).
//
// Internal form: structural columns x with bounds lo <= x <= hi plus one
// slack per row, a_i x + s_i = rhs_i. Slack bounds encode the row sense
// (<=: s >= 0, >=: s <= 0, =: s = 0). Phase 1 starts from the all-slack
// basis; rows whose slack value violates its bounds get an artificial
// column (+-1 on the diagonal) and the phase-1 objective minimizes the sum
// of artificials. Phase 2 minimizes the real objective. Pricing is Dantzig
// with a Bland fallback after a stretch of degenerate pivots; all
// tie-breaks go to the lowest index, so runs are reproducible.

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace mmu::milp {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense : uint8_t { le, ge, eq };

enum class LpStatus : uint8_t { optimal, infeasible, unbounded };

struct LpRow {
  std::vector<std::pair<int, double>> terms;  // (structural var, coeff)
  RowSense sense = RowSense::le;
  double rhs = 0.0;
};

struct LpModel {
  std::vector<double> obj;  // minimized
  std::vector<double> lo, hi;
  std::vector<LpRow> rows;

  int num_vars() const { return static_cast<int>(obj.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }
};

struct LpResult {
  LpStatus status = LpStatus::optimal;
  double objective = 0.0;
  std::vector<double> x;  // structural values, empty unless optimal
  long long iterations = 0;
};

// Throws ModelError on iteration blowup or a numerically unusable basis,
// never returns a silently wrong status.
LpResult solve_lp(const LpModel& model);

}  // namespace mmu::milp

#endif  // MMU_SIMPLEX_HPP
