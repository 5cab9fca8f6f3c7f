#include "mmu/simplex.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "mmu/core.hpp"

namespace mmu::milp {

namespace {

constexpr double kFeasTol = 1e-7;
constexpr double kOptTol = 1e-8;
constexpr double kPivTol = 1e-9;
constexpr double kRatioTieTol = 1e-10;
constexpr int kRefactorEvery = 100;
constexpr int kDegenLimit = 300;  // degenerate pivots before switching to Bland

struct Column {
  std::vector<std::pair<int, double>> nz;  // (row, coeff)
};

class Simplex {
 public:
  explicit Simplex(const LpModel& model)
      : n_(model.num_vars()), m_(model.num_rows()) {
    lo_ = model.lo;
    hi_ = model.hi;
    cost_ = model.obj;
    if (static_cast<int>(lo_.size()) != n_ || static_cast<int>(hi_.size()) != n_)
      throw ModelError("simplex: bound vector size mismatch");
    for (int j = 0; j < n_; ++j)
      if (lo_[j] > hi_[j]) throw ModelError("simplex: variable with lo > hi");

    cols_.resize(n_);
    rhs_ = Eigen::VectorXd::Zero(m_);
    std::vector<double> acc(n_, 0.0);
    for (int i = 0; i < m_; ++i) {
      std::vector<int> touched;
      for (auto [j, a] : model.rows[i].terms) {
        if (j < 0 || j >= n_) throw ModelError("simplex: constraint references unknown variable");
        if (acc[j] == 0.0 && a != 0.0) touched.push_back(j);
        acc[j] += a;
      }
      for (int j : touched) {
        if (acc[j] != 0.0) cols_[j].nz.push_back({i, acc[j]});
        acc[j] = 0.0;
      }
      rhs_[i] = model.rows[i].rhs;
    }
    // One slack per row; its bounds encode the row sense.
    for (int i = 0; i < m_; ++i) {
      Column c;
      c.nz.push_back({i, 1.0});
      cols_.push_back(std::move(c));
      switch (model.rows[i].sense) {
        case RowSense::le: lo_.push_back(0.0), hi_.push_back(kInf); break;
        case RowSense::ge: lo_.push_back(-kInf), hi_.push_back(0.0); break;
        case RowSense::eq: lo_.push_back(0.0), hi_.push_back(0.0); break;
      }
      cost_.push_back(0.0);
    }
  }

  LpResult run() {
    init_basis();
    refactor();
    compute_basics();

    if (first_artificial_ < num_vars()) {
      phase1_ = true;
      if (!iterate()) throw ModelError("simplex: unbounded phase-1 ray");
      double infeas = 0.0;
      for (int j = first_artificial_; j < num_vars(); ++j) infeas += xval_[j];
      if (infeas > 1e-7) {
        LpResult r;
        r.status = LpStatus::infeasible;
        r.iterations = iters_;
        return r;
      }
      // Pin the artificials at zero and switch to the real objective. Basic
      // artificials may linger at value 0; the pinned bounds keep them there.
      for (int j = first_artificial_; j < num_vars(); ++j) {
        lo_[j] = hi_[j] = 0.0;
        if (!in_basis_[j]) {
          xval_[j] = 0.0;
          at_upper_[j] = 0;
        }
      }
      phase1_ = false;
      refactor();
      compute_basics();
    }

    if (!iterate()) {
      LpResult r;
      r.status = LpStatus::unbounded;
      r.iterations = iters_;
      return r;
    }

    verify();
    LpResult r;
    r.status = LpStatus::optimal;
    r.iterations = iters_;
    r.x.assign(xval_.begin(), xval_.begin() + n_);
    r.objective = 0.0;
    for (int j = 0; j < n_; ++j) r.objective += cost_[j] * xval_[j];
    return r;
  }

 private:
  int num_vars() const { return static_cast<int>(cols_.size()); }
  bool is_artificial(int j) const { return j >= first_artificial_; }
  double eff_cost(int j) const { return phase1_ ? (is_artificial(j) ? 1.0 : 0.0) : cost_[j]; }
  double nb_value(int j) const {
    if (at_upper_[j]) return hi_[j];
    return lo_[j] > -kInf ? lo_[j] : 0.0;  // free variables rest at 0
  }

  void init_basis() {
    const int total = n_ + m_;
    xval_.assign(total, 0.0);
    at_upper_.assign(total, 0);
    for (int j = 0; j < total; ++j) {
      at_upper_[j] = (lo_[j] <= -kInf && hi_[j] < kInf) ? 1 : 0;
      xval_[j] = nb_value(j);
    }

    // Row activity of the nonbasic structurals decides whether the slack can
    // start basic. Rows whose slack value breaks its bounds get an artificial
    // unit column instead and the slack starts nonbasic at the broken bound.
    Eigen::VectorXd act = Eigen::VectorXd::Zero(m_);
    for (int j = 0; j < n_; ++j) {
      if (xval_[j] == 0.0) continue;
      for (auto [i, a] : cols_[j].nz) act[i] += a * xval_[j];
    }
    basis_.assign(m_, -1);
    first_artificial_ = total;
    for (int i = 0; i < m_; ++i) {
      int sj = n_ + i;
      double sv = rhs_[i] - act[i];
      if (sv >= lo_[sj] - kFeasTol && sv <= hi_[sj] + kFeasTol) {
        basis_[i] = sj;
        continue;
      }
      bool above = sv > hi_[sj];
      at_upper_[sj] = above ? 1 : 0;
      xval_[sj] = above ? hi_[sj] : lo_[sj];
      double resid = sv - xval_[sj];
      Column c;
      c.nz.push_back({i, resid >= 0 ? 1.0 : -1.0});
      cols_.push_back(std::move(c));
      lo_.push_back(0.0);
      hi_.push_back(kInf);
      cost_.push_back(0.0);
      xval_.push_back(std::abs(resid));
      at_upper_.push_back(0);
      basis_[i] = static_cast<int>(cols_.size()) - 1;
    }

    in_basis_.assign(cols_.size(), 0);
    for (int k : basis_) in_basis_[k] = 1;
  }

  void refactor() {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m_, m_);
    for (int i = 0; i < m_; ++i)
      for (auto [r, a] : cols_[basis_[i]].nz) b(r, i) = a;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
    if (m_ > 0 && !lu.isInvertible()) throw ModelError("simplex: singular basis");
    binv_ = lu.inverse();
  }

  void compute_basics() {
    Eigen::VectorXd r = rhs_;
    for (int j = 0; j < num_vars(); ++j) {
      if (in_basis_[j] || xval_[j] == 0.0) continue;
      for (auto [i, a] : cols_[j].nz) r[i] -= a * xval_[j];
    }
    Eigen::VectorXd xb = binv_ * r;
    for (int i = 0; i < m_; ++i) xval_[basis_[i]] = xb[i];
  }

  double current_obj() const {
    double o = 0.0;
    for (int j = 0; j < num_vars(); ++j) o += eff_cost(j) * xval_[j];
    return o;
  }

  // Runs the current phase to optimality. Returns false on an unbounded ray.
  bool iterate() {
    const long long limit = 50000 + 500LL * m_;
    int degen = 0;
    bool bland = false;
    double last_obj = current_obj();

    for (;;) {
      if (++iters_ > limit)
        throw ModelError("simplex: iteration limit reached (" + std::to_string(limit) + ")");
      if (iters_ % kRefactorEvery == 0) {
        refactor();
        compute_basics();
      }

      Eigen::VectorXd cb(m_);
      for (int i = 0; i < m_; ++i) cb[i] = eff_cost(basis_[i]);
      Eigen::VectorXd y = binv_.transpose() * cb;

      // Entering candidates: nonbasic with a profitable reduced cost in a
      // direction its bound allows. Dantzig order normally, plain index
      // order once degeneracy forced Bland's rule.
      struct Cand {
        double score;
        int j;
        int dir;
      };
      std::vector<Cand> cands;
      for (int j = 0; j < num_vars(); ++j) {
        if (in_basis_[j] || lo_[j] == hi_[j]) continue;
        double d = eff_cost(j);
        for (auto [i, a] : cols_[j].nz) d -= y[i] * a;
        bool free_var = lo_[j] <= -kInf && hi_[j] >= kInf;
        if (at_upper_[j]) {
          if (d > kOptTol) cands.push_back({d, j, -1});
        } else if (free_var) {
          if (d < -kOptTol) cands.push_back({-d, j, +1});
          else if (d > kOptTol) cands.push_back({d, j, -1});
        } else {
          if (d < -kOptTol) cands.push_back({-d, j, +1});
        }
        if (bland && !cands.empty()) break;
      }
      if (cands.empty()) return true;  // phase optimal
      if (!bland)
        std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
          if (a.score != b.score) return a.score > b.score;
          return a.j < b.j;
        });

      bool pivoted = false;
      for (const Cand& cand : cands) {
        const int j = cand.j;
        const int dir = cand.dir;
        Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m_);
        for (auto [i, a] : cols_[j].nz) alpha += a * binv_.col(i);

        // Ratio test. The entering variable moves by t >= 0 away from its
        // bound; basic i changes by -dir * alpha_i * t. The entering
        // variable's own range is a blocker too (bound flip).
        double t_best = (lo_[j] > -kInf && hi_[j] < kInf) ? hi_[j] - lo_[j] : kInf;
        int leave = -1;
        bool leave_at_upper = false;
        for (int i = 0; i < m_; ++i) {
          double delta = -dir * alpha[i];
          int k = basis_[i];
          double t;
          bool to_upper;
          if (delta > kPivTol) {
            if (hi_[k] >= kInf) continue;
            t = (hi_[k] - xval_[k]) / delta;
            to_upper = true;
          } else if (delta < -kPivTol) {
            if (lo_[k] <= -kInf) continue;
            t = (lo_[k] - xval_[k]) / delta;
            to_upper = false;
          } else {
            continue;
          }
          if (t < 0.0) t = 0.0;
          bool take = false;
          if (t < t_best - kRatioTieTol) {
            take = true;
          } else if (t < t_best + kRatioTieTol) {
            if (leave < 0) {
              take = t <= t_best;
            } else if (bland) {
              take = basis_[i] < basis_[leave];  // Bland: lowest leaving index
            } else {
              double cur = std::abs(alpha[leave]);
              double alt = std::abs(alpha[i]);
              take = alt > cur + 1e-12 || (std::abs(alt - cur) <= 1e-12 && i < leave);
            }
          }
          if (take) {
            t_best = t;
            leave = i;
            leave_at_upper = to_upper;
          }
        }

        if (t_best >= kInf) {
          if (phase1_) throw ModelError("simplex: unbounded phase-1 ray");
          return false;
        }

        if (leave < 0) {
          // Bound flip: the entering variable crosses its own range; the
          // basics absorb the move without a basis change.
          for (int i = 0; i < m_; ++i) xval_[basis_[i]] -= dir * alpha[i] * t_best;
          at_upper_[j] = at_upper_[j] ? 0 : 1;
          xval_[j] = nb_value(j);
          pivoted = true;
          break;
        }

        double rho = alpha[leave];
        if (std::abs(rho) < kPivTol) continue;  // unusable pivot, try next candidate

        // Move the basics along the ray before swapping the basis.
        for (int i = 0; i < m_; ++i) xval_[basis_[i]] -= dir * alpha[i] * t_best;
        xval_[j] += dir * t_best;

        int k = basis_[leave];
        in_basis_[k] = 0;
        at_upper_[k] = leave_at_upper ? 1 : 0;
        xval_[k] = leave_at_upper ? hi_[k] : lo_[k];

        basis_[leave] = j;
        in_basis_[j] = 1;

        // Product-form update of the basis inverse as one rank-1 op; the
        // row loop it replaces strides a column-major matrix.
        Eigen::RowVectorXd prow = binv_.row(leave) / rho;
        Eigen::VectorXd f = alpha;
        f[leave] = 0.0;
        binv_.noalias() -= f * prow;
        binv_.row(leave) = prow;
        pivoted = true;
        break;
      }

      if (!pivoted) {
        // Every profitable column had a numerically unusable pivot. Rebuild
        // the inverse and accept the point rather than loop forever.
        refactor();
        compute_basics();
        return true;
      }

      double obj = current_obj();
      if (obj < last_obj - 1e-11) {
        degen = 0;
        bland = false;
      } else if (++degen > kDegenLimit) {
        bland = true;
      }
      last_obj = obj;
    }
  }

  void verify() const {
    for (int j = 0; j < num_vars(); ++j) {
      double scale = 1.0 + std::max(std::abs(lo_[j]) < kInf ? std::abs(lo_[j]) : 0.0,
                                    std::abs(hi_[j]) < kInf ? std::abs(hi_[j]) : 0.0);
      if (xval_[j] < lo_[j] - 1e-5 * scale || xval_[j] > hi_[j] + 1e-5 * scale)
        throw ModelError("simplex: solution violates variable bounds");
    }
    Eigen::VectorXd act = Eigen::VectorXd::Zero(m_);
    for (int j = 0; j < num_vars(); ++j) {
      if (xval_[j] == 0.0) continue;
      for (auto [i, a] : cols_[j].nz) act[i] += a * xval_[j];
    }
    for (int i = 0; i < m_; ++i)
      if (std::abs(act[i] - rhs_[i]) > 1e-5 * (1.0 + std::abs(rhs_[i])))
        throw ModelError("simplex: solution violates a row");
  }

  int n_;  // structural variables
  int m_;  // rows
  std::vector<Column> cols_;
  std::vector<double> lo_, hi_, cost_;
  Eigen::VectorXd rhs_;
  std::vector<int> basis_;
  std::vector<uint8_t> in_basis_;
  std::vector<uint8_t> at_upper_;
  std::vector<double> xval_;
  Eigen::MatrixXd binv_;
  int first_artificial_ = 0;
  bool phase1_ = false;
  long long iters_ = 0;
};

}  // namespace

LpResult solve_lp(const LpModel& model) {
  Simplex s(model);
  return s.run();
}

}  // namespace mmu::milp
