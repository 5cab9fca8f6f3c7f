#ifndef MMU_MILP_HPP
#define MMU_MILP_HPP

// Mixed-integer linear models and the exact solver behind every formulation
// in this project.
//
// The built-in backend runs best-first branch and bound over the bounded
// simplex from simplex.hpp: nodes ordered by parent LP bound (ties by
// creation order), branching on the most fractional integer variable of the
// highest branch priority present (ties by lowest index), so repeated runs
// of the same model give the same optimum. When the objective is provably
// integral on integer-feasible points (integral coefficients, zero cost on
// continuous variables), LP bounds are lifted by rounding up, which also
// closes gaps exactly.
//
// The MMU_MILP_BACKEND environment variable selects the backend by name;
// "builtin" is the only one registered.

#include <string>
#include <utility>
#include <vector>

#include "mmu/core.hpp"
#include "mmu/simplex.hpp"

namespace mmu::milp {

enum class Sense : uint8_t { minimize, maximize };
enum class VarType : uint8_t { continuous, integer };
enum class Status : uint8_t { optimal, infeasible, unbounded, limit };

using Term = std::pair<int, double>;  // (variable id, coefficient)

const char* to_string(Status s);

struct SolveConfig {
  double time_limit_s = 0.0;  // 0 = no limit
  int threads = 1;            // accepted for interface parity; backend runs one thread
  double gap_tol = 1e-4;      // relative gap below which the search stops as optimal
  long long node_limit = 0;   // 0 = no limit
};

struct SolveOutcome {
  Status status = Status::infeasible;
  double objective = 0.0;       // in the model's sense; +-inf when no incumbent at a limit
  std::vector<double> values;   // integer variables exactly integral
  double gap = 0.0;             // relative gap proven at termination
  long long nodes = 0;
  long long lp_iterations = 0;
};

class Model {
 public:
  explicit Model(Sense sense = Sense::minimize) : sense_(sense) {}

  int add_var(double lo, double hi, VarType type, double obj = 0.0);
  int add_constraint(const std::vector<std::pair<int, double>>& terms, RowSense sense,
                     double rhs);
  // Higher-priority variables are branched first; default 0. Useful when a
  // subset of the integer variables decides the rest (their integrality then
  // follows from the constraints instead of from branching).
  void set_branch_priority(int var, int priority);

  SolveOutcome solve(const SolveConfig& cfg = {}) const;
  // Appends the row and solves from scratch.
  SolveOutcome add_constraint_and_resolve(const std::vector<std::pair<int, double>>& terms,
                                          RowSense sense, double rhs,
                                          const SolveConfig& cfg = {});

  Sense sense() const { return sense_; }
  int num_vars() const { return lp_.num_vars(); }
  int num_rows() const { return lp_.num_rows(); }
  const LpModel& lp() const { return lp_; }
  const std::vector<VarType>& var_types() const { return types_; }
  const std::vector<int>& branch_priorities() const { return priorities_; }

 private:
  Sense sense_;
  LpModel lp_;  // objective stored in the model's own sense
  std::vector<VarType> types_;
  std::vector<int> priorities_;
};

std::vector<std::string> backend_names();
// Backend chosen by MMU_MILP_BACKEND (default "builtin"); unknown names
// raise ModelError listing the registered ones.
SolveOutcome solve_model(const Model& model, const SolveConfig& cfg);

}  // namespace mmu::milp

#endif  // MMU_MILP_HPP
