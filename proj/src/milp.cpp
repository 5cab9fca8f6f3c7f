#include "mmu/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <queue>

#include "mmu/core.hpp"

namespace mmu::milp {

namespace {

constexpr double kIntTol = 1e-6;

struct Node {
  double bound;   // LP objective of the parent (root: its own relaxation)
  long long id;   // creation order, breaks bound ties
  std::vector<std::pair<int, std::pair<double, double>>> tight;  // var -> (lo, hi)
};

struct NodeWorse {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const Model& model, const SolveConfig& cfg) : model_(model), cfg_(cfg) {
    lp_ = model.lp();
    if (model.sense() == Sense::maximize)
      for (double& c : lp_.obj) c = -c;

    // Integral objective on integer points: integer variables with integral
    // coefficients, continuous variables costless.
    integral_obj_ = true;
    for (int j = 0; j < lp_.num_vars(); ++j) {
      bool intvar = model.var_types()[j] == VarType::integer;
      if (intvar && std::abs(lp_.obj[j] - std::round(lp_.obj[j])) > 1e-9) integral_obj_ = false;
      if (!intvar && lp_.obj[j] != 0.0) integral_obj_ = false;
    }
    // Integer variables only contain integer points; shave their bounds.
    for (int j = 0; j < lp_.num_vars(); ++j) {
      if (model.var_types()[j] != VarType::integer) continue;
      if (lp_.lo[j] > -kInf) lp_.lo[j] = std::ceil(lp_.lo[j] - kIntTol);
      if (lp_.hi[j] < kInf) lp_.hi[j] = std::floor(lp_.hi[j] + kIntTol);
    }
  }

  SolveOutcome run() {
    auto t0 = std::chrono::steady_clock::now();
    auto out_of_time = [&] {
      if (cfg_.time_limit_s <= 0.0) return false;
      std::chrono::duration<double> el = std::chrono::steady_clock::now() - t0;
      return el.count() >= cfg_.time_limit_s;
    };

    std::priority_queue<Node, std::vector<Node>, NodeWorse> open;
    open.push(Node{-kInf, next_id_++, {}});

    // How the main loop ended decides what bound the result may claim.
    enum class Exit { drained, proven, gap_met, limit } exit = Exit::drained;
    double bound_at_exit = -kInf;

    while (!open.empty()) {
      double bb = lift(open.top().bound);  // valid for everything still open
      if (out_of_time() || (cfg_.node_limit > 0 && nodes_ >= cfg_.node_limit)) {
        exit = Exit::limit;
        bound_at_exit = bb;
        break;
      }
      if (have_incumbent_) {
        if (bb >= inc_obj_ - 1e-9) {
          exit = Exit::proven;  // nothing open can improve on the incumbent
          break;
        }
        if (inc_obj_ - bb <= cfg_.gap_tol * std::max(1.0, std::abs(inc_obj_))) {
          exit = Exit::gap_met;
          bound_at_exit = bb;
          break;
        }
      }

      Node node = open.top();
      open.pop();
      if (have_incumbent_ && lift(node.bound) >= inc_obj_ - 1e-9) continue;

      LpModel local = lp_;
      for (auto& [j, b] : node.tight) {
        local.lo[j] = std::max(local.lo[j], b.first);
        local.hi[j] = std::min(local.hi[j], b.second);
      }
      bool bound_conflict = false;
      for (int j = 0; j < local.num_vars() && !bound_conflict; ++j)
        bound_conflict = local.lo[j] > local.hi[j];
      if (bound_conflict) continue;

      LpResult lp = solve_lp(local);
      ++nodes_;
      lp_iters_ += lp.iterations;
      if (lp.status == LpStatus::infeasible) continue;
      if (lp.status == LpStatus::unbounded) return finish_unbounded();

      double bound = lift(lp.objective);
      if (have_incumbent_ && bound >= inc_obj_ - 1e-9) continue;

      int branch = pick_branch_var(lp.x);
      if (branch < 0) {
        accept_incumbent(lp.x);
        continue;
      }
      double v = lp.x[branch];
      Node down{lp.objective, next_id_++, node.tight};
      down.tight.push_back({branch, {-kInf, std::floor(v)}});
      Node up{lp.objective, next_id_++, node.tight};
      up.tight.push_back({branch, {std::ceil(v), kInf}});
      open.push(std::move(down));
      open.push(std::move(up));
    }

    if (exit == Exit::limit) return finish(Status::limit, bound_at_exit);
    if (!have_incumbent_) return finish(Status::infeasible, -kInf);
    // drained/proven: complete enumeration, every discard was dominated, so
    // the incumbent is exact. gap_met: the open bound limits the gap.
    double bound = exit == Exit::gap_met ? bound_at_exit : inc_obj_;
    return finish(Status::optimal, bound);
  }

 private:
  double lift(double b) const {
    if (b == -kInf) return b;
    return integral_obj_ ? std::ceil(b - 1e-6) : b;
  }

  int pick_branch_var(const std::vector<double>& x) const {
    const std::vector<int>& prio = model_.branch_priorities();
    int best = -1, best_prio = 0;
    double best_frac = kIntTol;
    for (int j = 0; j < lp_.num_vars(); ++j) {
      if (model_.var_types()[j] != VarType::integer) continue;
      double f = std::abs(x[j] - std::round(x[j]));
      if (f <= kIntTol) continue;
      int p = prio.empty() ? 0 : prio[j];
      if (best >= 0 && p < best_prio) continue;
      if (best >= 0 && p == best_prio && f <= best_frac + 1e-12) continue;
      best = j;
      best_prio = p;
      best_frac = f;
    }
    return best;
  }

  void accept_incumbent(const std::vector<double>& x) {
    std::vector<double> vals = x;
    double obj = 0.0;
    for (int j = 0; j < lp_.num_vars(); ++j) {
      if (model_.var_types()[j] == VarType::integer) {
        double r = std::round(vals[j]);
        if (std::abs(vals[j] - r) > kIntTol)
          throw ModelError("branch and bound: non-integral value accepted as incumbent");
        vals[j] = r;
      }
      obj += lp_.obj[j] * vals[j];
    }
    if (!have_incumbent_ || obj < inc_obj_ - 1e-9) {
      have_incumbent_ = true;
      inc_obj_ = obj;
      inc_values_ = std::move(vals);
    }
  }

  SolveOutcome finish_unbounded() {
    SolveOutcome out;
    out.nodes = nodes_;
    out.lp_iterations = lp_iters_;
    out.status = Status::unbounded;
    out.objective = model_.sense() == Sense::maximize ? kInf : -kInf;
    return out;
  }

  SolveOutcome finish(Status st, double bound) {
    SolveOutcome out;
    out.nodes = nodes_;
    out.lp_iterations = lp_iters_;
    out.status = st;
    bool negate = model_.sense() == Sense::maximize;
    if (st == Status::infeasible) return out;
    if (!have_incumbent_) {
      out.objective = negate ? -kInf : kInf;
      out.gap = kInf;
      return out;
    }
    out.gap = std::max(0.0, (inc_obj_ - bound) / std::max(1.0, std::abs(inc_obj_)));
    out.objective = negate ? -inc_obj_ : inc_obj_;
    out.values = inc_values_;
    return out;
  }

  const Model& model_;
  SolveConfig cfg_;
  LpModel lp_;  // minimization copy
  bool integral_obj_ = false;
  long long next_id_ = 0;
  long long nodes_ = 0;
  long long lp_iters_ = 0;
  bool have_incumbent_ = false;
  double inc_obj_ = kInf;
  std::vector<double> inc_values_;
};

SolveOutcome builtin_solve(const Model& model, const SolveConfig& cfg) {
  BranchAndBound bb(model, cfg);
  return bb.run();
}

using BackendFn = SolveOutcome (*)(const Model&, const SolveConfig&);

const std::map<std::string, BackendFn>& registry() {
  static const std::map<std::string, BackendFn> reg = {{"builtin", &builtin_solve}};
  return reg;
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::limit: return "limit";
  }
  return "?";
}

int Model::add_var(double lo, double hi, VarType type, double obj) {
  if (lo > hi) throw ModelError("add_var: lo > hi");
  lp_.obj.push_back(obj);
  lp_.lo.push_back(lo);
  lp_.hi.push_back(hi);
  types_.push_back(type);
  if (!priorities_.empty()) priorities_.push_back(0);
  return lp_.num_vars() - 1;
}

void Model::set_branch_priority(int var, int priority) {
  if (var < 0 || var >= num_vars())
    throw ModelError("set_branch_priority: unknown variable index");
  if (priorities_.empty()) priorities_.resize(num_vars(), 0);
  priorities_[var] = priority;
}

int Model::add_constraint(const std::vector<std::pair<int, double>>& terms, RowSense sense,
                          double rhs) {
  for (auto [j, a] : terms) {
    (void)a;
    if (j < 0 || j >= num_vars()) throw ModelError("add_constraint: unknown variable index");
  }
  lp_.rows.push_back(LpRow{terms, sense, rhs});
  return lp_.num_rows() - 1;
}

SolveOutcome Model::solve(const SolveConfig& cfg) const { return solve_model(*this, cfg); }

SolveOutcome Model::add_constraint_and_resolve(const std::vector<std::pair<int, double>>& terms,
                                               RowSense sense, double rhs,
                                               const SolveConfig& cfg) {
  add_constraint(terms, sense, rhs);
  return solve(cfg);
}

std::vector<std::string> backend_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : registry()) names.push_back(name);
  return names;
}

SolveOutcome solve_model(const Model& model, const SolveConfig& cfg) {
  const char* env = std::getenv("MMU_MILP_BACKEND");
  std::string name = env && *env ? env : "builtin";
  auto it = registry().find(name);
  if (it == registry().end()) {
    std::string msg = "unknown MILP backend '" + name + "'; registered:";
    for (const auto& n : backend_names()) msg += " " + n;
    throw ModelError(msg);
  }
  if (cfg.threads < 1) throw ModelError("SolveConfig.threads must be >= 1");
  if (cfg.gap_tol < 0) throw ModelError("SolveConfig.gap_tol must be >= 0");
  return it->second(model, cfg);
}

}  // namespace mmu::milp
