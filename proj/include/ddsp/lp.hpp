#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddsp/core.hpp"

namespace ddsp {

struct Row {
  std::vector<double> coef;
  Relation rel = Relation::LessEqual;
  double rhs = 0.0;
};

struct LinearProgram {
  Sense sense = Sense::Minimize;
  std::vector<double> objective;
  std::vector<Row> rows;
  std::vector<double> lower;
  std::vector<double> upper;
  /// Optional secondary objective (same sense) optimized over the primary optimal face.
  std::vector<double> tiebreak;

  std::size_t num_vars() const { return objective.size(); }

  std::size_t add_variable(double cost, double lo = 0.0, double hi = kInf) {
    objective.push_back(cost);
    lower.push_back(lo);
    upper.push_back(hi);
    if (!tiebreak.empty()) tiebreak.push_back(0.0);
    for (auto& r : rows) r.coef.push_back(0.0);
    return objective.size() - 1;
  }

  void add_row(std::vector<double> coef, Relation rel, double rhs) {
    coef.resize(num_vars(), 0.0);
    rows.push_back(Row{std::move(coef), rel, rhs});
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline std::string_view to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

/// Duals are derivatives of the objective with respect to the row right-hand
/// sides: for a min problem a <= row has dual <= 0 and a >= row has dual >= 0.
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> primal;
  std::vector<double> dual;
  std::vector<double> reduced_cost;
  double objective = 0.0;
  /// Improving direction when Unbounded; phase-one row duals (Farkas certificate) when Infeasible.
  std::vector<double> ray;
  std::size_t iterations = 0;
};

struct LpConfig {
  double feas_tol = 1e-8;
  double opt_tol = 1e-9;
  double pivot_tol = 1e-9;
  double duality_gap_tol = 1e-7;
  std::size_t bland_after = 50;    // consecutive degenerate pivots before Bland's rule
  std::size_t max_iterations = 0;  // 0 picks a size-based limit
};

namespace detail {

class Simplex {
 public:
  Simplex(const LinearProgram& lp, std::span<const double> lower, std::span<const double> upper,
          const LpConfig& cfg)
      : lp_(lp), cfg_(cfg) {
    validate(lower, upper);
    m_ = lp.rows.size();
    n_ = lp.num_vars();
    sgn_ = lp.sense == Sense::Maximize ? -1.0 : 1.0;
    setup(lower, upper);
  }

  LpSolution solve() {
    LpSolution sol;
    std::size_t limit = cfg_.max_iterations ? cfg_.max_iterations : 200 * (m_ + cols_) + 10000;
    limit_ = limit;

    if (num_art_ > 0) {
      std::vector<double> c1(cols_, 0.0);
      for (std::size_t k = 0; k < num_art_; ++k) c1[n_ + m_ + k] = 1.0;
      std::vector<double> d1 = reduced_costs(c1);
      std::vector<std::vector<double>*> extra;
      run(c1, d1, extra, nullptr);
      refresh_basics();
      double infeas = 0.0;
      for (std::size_t k = 0; k < num_art_; ++k) infeas += x_[n_ + m_ + k];
      double scale = 1.0;
      for (const auto& r : lp_.rows) scale = std::max(scale, std::abs(r.rhs));
      if (infeas > cfg_.feas_tol * scale) {
        sol.status = LpStatus::Infeasible;
        sol.ray = row_duals(c1);
        sol.iterations = iterations_;
        return sol;
      }
      for (std::size_t k = 0; k < num_art_; ++k) {
        std::size_t j = n_ + m_ + k;
        lo_[j] = up_[j] = 0.0;
        if (pos_[j] < 0) {
          x_[j] = 0.0;
          state_[j] = State::Fixed;
        }
      }
      drive_out_artificials();
    }

    std::vector<double> c(cols_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) c[j] = sgn_ * lp_.objective[j];
    std::vector<double> d = reduced_costs(c);
    std::vector<std::vector<double>*> extra;
    auto unb = run(c, d, extra, nullptr);
    if (unb) {
      sol.status = LpStatus::Unbounded;
      sol.ray.assign(n_, 0.0);
      auto [q, dir] = *unb;
      if (q < n_) sol.ray[q] = dir * 1.0;
      for (std::size_t i = 0; i < m_; ++i) {
        std::size_t b = basis_[i];
        if (b < n_) sol.ray[b] = -dir * at(i, q);
      }
      sol.primal.assign(x_.begin(), x_.begin() + n_);
      sol.iterations = iterations_;
      return sol;
    }

    if (!lp_.tiebreak.empty()) {
      std::vector<double> c2(cols_, 0.0);
      for (std::size_t j = 0; j < n_; ++j) c2[j] = sgn_ * lp_.tiebreak[j];
      std::vector<double> d2 = reduced_costs(c2);
      std::vector<std::vector<double>*> rows{&d};
      run(c2, d2, rows, &d);
    }

    refresh_basics();
    check_primal();
    c_ = std::move(c);
    d_ = std::move(d);
    warm_ = lp_.tiebreak.empty();
    return optimal_solution();
  }

  /// Re-optimizes for new structural bounds with dual simplex, starting from
  /// the basis of the last optimal solve. Returns nullopt when that basis is
  /// unavailable or the result fails validation; solve from scratch then.
  std::optional<LpSolution> resolve(std::span<const double> lower, std::span<const double> upper) {
    if (!warm_) return std::nullopt;
    warm_ = false;
    validate(lower, upper);
    iterations_ = 0;
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = lower[j];
      up_[j] = upper[j];
      if (pos_[j] >= 0) continue;
      // keep the nonbasic side that matches the sign of the reduced cost
      if (lo_[j] == up_[j]) state_[j] = State::Fixed;
      else if (std::isfinite(lo_[j]) && (d_[j] >= 0.0 || !std::isfinite(up_[j]))) state_[j] = State::AtLower;
      else if (std::isfinite(up_[j])) state_[j] = State::AtUpper;
      else state_[j] = State::Free;
      x_[j] = state_[j] == State::AtUpper ? up_[j] : state_[j] == State::Free ? 0.0 : lo_[j];
    }
    refresh_basics();
    try {
      if (!dual_run()) {
        LpSolution sol;
        sol.status = LpStatus::Infeasible;
        sol.iterations = iterations_;
        warm_ = true;
        return sol;
      }
      std::vector<std::vector<double>*> extra;
      if (run(c_, d_, extra, nullptr)) return std::nullopt;
      refresh_basics();
      check_primal();
    } catch (const Error&) {
      return std::nullopt;
    }
    LpSolution sol = optimal_solution();
    double scale = 1.0;
    for (double v : sol.primal) scale = std::max(scale, std::abs(v));
    for (const Row& r : lp_.rows) {
      double act = 0.0;
      for (std::size_t j = 0; j < n_; ++j) act += r.coef[j] * sol.primal[j];
      double tol = 1e-7 * (scale + std::abs(r.rhs));
      if ((r.rel != Relation::GreaterEqual && act > r.rhs + tol) || (r.rel != Relation::LessEqual && act < r.rhs - tol))
        return std::nullopt;
    }
    warm_ = true;
    return sol;
  }

  LpSolution optimal_solution() const {
    const std::vector<double>& c = c_;
    LpSolution sol;
    sol.status = LpStatus::Optimal;
    sol.primal.assign(x_.begin(), x_.begin() + n_);
    std::vector<double> y = row_duals(c);
    sol.dual.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) sol.dual[i] = sgn_ * y[i];
    sol.reduced_cost.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      double v = lp_.objective[j];
      for (std::size_t i = 0; i < m_; ++i) v -= sol.dual[i] * lp_.rows[i].coef[j];
      sol.reduced_cost[j] = v;
    }
    double obj = 0.0;
    for (std::size_t j = 0; j < n_; ++j) obj += lp_.objective[j] * sol.primal[j];
    sol.objective = obj;
    sol.iterations = iterations_;
    return sol;
  }

  // Tableau view after an optimal solve(). Columns are the structural
  // variables followed by one slack per row with a_i x + s_i = rhs_i.
  std::size_t num_rows() const { return m_; }
  std::size_t basic(std::size_t row) const { return basis_[row]; }
  double value(std::size_t col) const { return x_[col]; }
  std::span<const double> tableau_row(std::size_t row) const { return {&t_[row * cols_], n_ + m_}; }
  /// -1 nonbasic at lower, +1 nonbasic at upper, 0 basic or fixed, 2 free.
  int side(std::size_t col) const {
    switch (state_[col]) {
      case State::AtLower: return -1;
      case State::AtUpper: return 1;
      case State::Free: return 2;
      default: return 0;
    }
  }

 private:
  enum class State { Basic, AtLower, AtUpper, Free, Fixed };

  void validate(std::span<const double> lower, std::span<const double> upper) const {
    std::size_t n = lp_.num_vars();
    if (lower.size() != n || upper.size() != n)
      throw Error(Errc::MalformedProgram, "bound vectors do not match variable count");
    if (!lp_.tiebreak.empty() && lp_.tiebreak.size() != n)
      throw Error(Errc::MalformedProgram, "tiebreak objective length mismatch");
    for (std::size_t j = 0; j < n; ++j) {
      if (!(lower[j] <= upper[j]) || lower[j] == kInf || upper[j] == -kInf)
        throw Error(Errc::MalformedProgram, "variable " + std::to_string(j) + " has empty bounds");
      if (!std::isfinite(lp_.objective[j]))
        throw Error(Errc::MalformedProgram, "non-finite objective coefficient");
    }
    for (std::size_t i = 0; i < lp_.rows.size(); ++i) {
      const Row& r = lp_.rows[i];
      if (r.coef.size() != n)
        throw Error(Errc::MalformedProgram, "row " + std::to_string(i) + " has wrong length");
      if (!std::isfinite(r.rhs))
        throw Error(Errc::MalformedProgram, "row " + std::to_string(i) + " has non-finite rhs");
    }
  }

  double& at(std::size_t i, std::size_t j) { return t_[i * cols_ + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * cols_ + j]; }

  void setup(std::span<const double> lower, std::span<const double> upper) {
    // initial nonbasic values of structural columns
    std::vector<double> xs(n_);
    std::vector<State> st(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      if (lower[j] == upper[j]) {
        xs[j] = lower[j];
        st[j] = State::Fixed;
      } else if (std::isfinite(lower[j])) {
        xs[j] = lower[j];
        st[j] = State::AtLower;
      } else if (std::isfinite(upper[j])) {
        xs[j] = upper[j];
        st[j] = State::AtUpper;
      } else {
        xs[j] = 0.0;
        st[j] = State::Free;
      }
    }
    std::vector<double> resid(m_);
    std::vector<double> slack_val(m_);
    std::vector<double> art_sign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const Row& r = lp_.rows[i];
      double act = 0.0;
      for (std::size_t j = 0; j < n_; ++j) act += r.coef[j] * xs[j];
      double res = r.rhs - act;
      resid[i] = res;
      bool ok = (r.rel == Relation::LessEqual && res >= 0.0) ||
                (r.rel == Relation::GreaterEqual && res <= 0.0) ||
                (r.rel == Relation::Equal && res == 0.0);
      if (ok) {
        slack_val[i] = res;
      } else {
        slack_val[i] = 0.0;
        art_sign[i] = res > 0.0 ? 1.0 : -1.0;
        ++num_art_;
      }
    }
    cols_ = n_ + m_ + num_art_;
    t_.assign(m_ * cols_, 0.0);
    lo_.assign(cols_, 0.0);
    up_.assign(cols_, 0.0);
    x_.assign(cols_, 0.0);
    state_.assign(cols_, State::AtLower);
    pos_.assign(cols_, -1);
    basis_.assign(m_, 0);
    art_row_.assign(num_art_, 0);
    art_sign_.assign(num_art_, 0.0);

    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = lower[j];
      up_[j] = upper[j];
      x_[j] = xs[j];
      state_[j] = st[j];
    }
    std::size_t k = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      const Row& r = lp_.rows[i];
      std::size_t s = n_ + i;
      switch (r.rel) {
        case Relation::LessEqual: lo_[s] = 0.0; up_[s] = kInf; break;
        case Relation::GreaterEqual: lo_[s] = -kInf; up_[s] = 0.0; break;
        case Relation::Equal: lo_[s] = 0.0; up_[s] = 0.0; break;
      }
      double scale = 1.0;
      if (art_sign[i] == 0.0) {
        basis_[i] = s;
        pos_[s] = static_cast<long>(i);
        state_[s] = State::Basic;
        x_[s] = slack_val[i];
      } else {
        std::size_t a = n_ + m_ + k;
        art_row_[k] = i;
        art_sign_[k] = art_sign[i];
        lo_[a] = 0.0;
        up_[a] = kInf;
        x_[a] = std::abs(resid[i]);
        basis_[i] = a;
        pos_[a] = static_cast<long>(i);
        state_[a] = State::Basic;
        x_[s] = 0.0;
        if (r.rel == Relation::LessEqual) state_[s] = State::AtLower;
        else if (r.rel == Relation::GreaterEqual) state_[s] = State::AtUpper;
        else state_[s] = State::Fixed;
        scale = art_sign[i];
        at(i, a) = 1.0;
        ++k;
      }
      for (std::size_t j = 0; j < n_; ++j) at(i, j) = scale * r.coef[j];
      at(i, s) = scale;
    }
    for (std::size_t j = n_; j < n_ + m_; ++j)
      if (pos_[j] < 0 && lo_[j] == up_[j]) state_[j] = State::Fixed;
  }

  std::vector<double> reduced_costs(const std::vector<double>& c) const {
    std::vector<double> d(c);
    for (std::size_t i = 0; i < m_; ++i) {
      double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &t_[i * cols_];
      for (std::size_t j = 0; j < cols_; ++j) d[j] -= cb * row[j];
    }
    for (std::size_t i = 0; i < m_; ++i) d[basis_[i]] = 0.0;
    return d;
  }

  /// y = c_B^T B^{-1}; the slack block of the tableau holds B^{-1}.
  std::vector<double> row_duals(const std::vector<double>& c) const {
    std::vector<double> y(m_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) {
      double cb = c[basis_[k]];
      if (cb == 0.0) continue;
      for (std::size_t i = 0; i < m_; ++i) y[i] += cb * at(k, n_ + i);
    }
    return y;
  }

  double column_entry(std::size_t row, std::size_t j) const {
    if (j < n_) return lp_.rows[row].coef[j];
    if (j < n_ + m_) return j - n_ == row ? 1.0 : 0.0;
    std::size_t k = j - n_ - m_;
    return art_row_[k] == row ? art_sign_[k] : 0.0;
  }

  /// Recompute basic values as B^{-1}(b - N x_N) to remove accumulated drift.
  void refresh_basics() {
    std::vector<double> r(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      double v = lp_.rows[i].rhs;
      const auto& coef = lp_.rows[i].coef;
      for (std::size_t j = 0; j < n_; ++j)
        if (pos_[j] < 0 && x_[j] != 0.0) v -= coef[j] * x_[j];
      std::size_t s = n_ + i;
      if (pos_[s] < 0) v -= x_[s];
      r[i] = v;
    }
    for (std::size_t k = 0; k < num_art_; ++k) {
      std::size_t a = n_ + m_ + k;
      if (pos_[a] < 0) r[art_row_[k]] -= art_sign_[k] * x_[a];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      double v = 0.0;
      for (std::size_t k = 0; k < m_; ++k) v += at(i, n_ + k) * r[k];
      x_[basis_[i]] = v;
    }
  }

  void check_primal() const {
    double scale = 1.0;
    for (std::size_t j = 0; j < n_; ++j)
      if (std::isfinite(x_[j])) scale = std::max(scale, std::abs(x_[j]));
    double tol = 1e-6 * scale;
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (x_[j] < lo_[j] - tol || x_[j] > up_[j] + tol)
        throw Error(Errc::NumericalFailure, "basic solution violates bounds after refactorization");
    }
  }

  bool enterable(std::size_t j, double dj, double tol, int& dir) const {
    switch (state_[j]) {
      case State::AtLower:
        if (dj < -tol) { dir = 1; return true; }
        return false;
      case State::AtUpper:
        if (dj > tol) { dir = -1; return true; }
        return false;
      case State::Free:
        if (std::abs(dj) > tol) { dir = dj < 0 ? 1 : -1; return true; }
        return false;
      default:
        return false;
    }
  }

  struct Ratio {
    long row = -1;   // -1: bound flip of the entering variable or unbounded
    double theta = kInf;
    bool to_upper = false;
  };

  Ratio ratio_test(std::size_t q, int dir, bool bland) const {
    Ratio best;
    if (std::isfinite(lo_[q]) && std::isfinite(up_[q])) best.theta = up_[q] - lo_[q];
    double best_alpha = 0.0;
    std::size_t best_var = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      double alpha = at(i, q);
      if (std::abs(alpha) <= cfg_.pivot_tol) continue;
      double change = -dir * alpha;  // rate of change of the basic variable
      std::size_t b = basis_[i];
      double limit;
      bool upper;
      if (change < 0) {
        if (!std::isfinite(lo_[b])) continue;
        limit = (x_[b] - lo_[b]) / -change;
        upper = false;
      } else {
        if (!std::isfinite(up_[b])) continue;
        limit = (up_[b] - x_[b]) / change;
        upper = true;
      }
      if (limit < 0) limit = 0;
      double tie = 1e-12 * (1.0 + std::abs(best.theta == kInf ? limit : best.theta));
      bool take = false;
      if (limit < best.theta - tie) {
        take = true;
      } else if (limit <= best.theta + tie && best.row >= 0) {
        if (bland) take = b < best_var;
        else take = std::abs(alpha) > best_alpha;
      }
      if (take) {
        best.row = static_cast<long>(i);
        best.theta = limit;
        best.to_upper = upper;
        best_alpha = std::abs(alpha);
        best_var = b;
      }
    }
    return best;
  }

  void pivot(std::size_t r, std::size_t q, std::vector<double>& d,
             std::vector<std::vector<double>*>& extra) {
    double* prow = &t_[r * cols_];
    double piv = prow[q];
    for (std::size_t j = 0; j < cols_; ++j) prow[j] /= piv;
    prow[q] = 1.0;
    nz_.clear();
    for (std::size_t j = 0; j < cols_; ++j)
      if (prow[j] != 0.0) nz_.push_back(j);
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &t_[i * cols_];
      double f = row[q];
      if (f == 0.0) continue;
      for (std::size_t j : nz_) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
    auto upd = [&](std::vector<double>& dv) {
      double f = dv[q];
      if (f == 0.0) return;
      for (std::size_t j : nz_) dv[j] -= f * prow[j];
      dv[q] = 0.0;
    };
    upd(d);
    for (auto* e : extra) upd(*e);
    pos_[basis_[r]] = -1;
    basis_[r] = q;
    pos_[q] = static_cast<long>(r);
    state_[q] = State::Basic;
  }

  /// Primal simplex on the given reduced-cost row. When `primary` is set only
  /// columns with zero primary reduced cost may enter. Returns the entering
  /// column and direction if the objective is unbounded.
  std::optional<std::pair<std::size_t, int>> run(const std::vector<double>& c, std::vector<double>& d,
                                                 std::vector<std::vector<double>*>& extra,
                                                 const std::vector<double>* primary) {
    (void)c;
    std::size_t degenerate = 0;
    bool bland = false;
    double tol = cfg_.opt_tol;
    for (;;) {
      if (iterations_ >= limit_)
        throw Error(Errc::NumericalFailure, "simplex iteration limit reached");
      std::size_t q = cols_;
      int dir = 0;
      double best = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (state_[j] == State::Basic || state_[j] == State::Fixed) continue;
        if (primary && std::abs((*primary)[j]) > 1e-9) continue;
        int dj_dir;
        if (!enterable(j, d[j], tol, dj_dir)) continue;
        if (bland) {
          q = j;
          dir = dj_dir;
          break;
        }
        if (std::abs(d[j]) > best) {
          best = std::abs(d[j]);
          q = j;
          dir = dj_dir;
        }
      }
      if (q == cols_) return std::nullopt;
      Ratio rt = ratio_test(q, dir, bland);
      ++iterations_;
      if (rt.theta == kInf) return std::make_pair(q, dir);

      double theta = rt.theta;
      if (theta > 0) {
        for (std::size_t i = 0; i < m_; ++i) {
          double alpha = at(i, q);
          if (alpha != 0.0) x_[basis_[i]] -= dir * theta * alpha;
        }
        x_[q] += dir * theta;
      }
      if (theta <= 1e-12) {
        if (++degenerate >= cfg_.bland_after) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }
      if (rt.row < 0) {
        // bound flip
        if (dir > 0) { x_[q] = up_[q]; state_[q] = State::AtUpper; }
        else { x_[q] = lo_[q]; state_[q] = State::AtLower; }
        continue;
      }
      std::size_t r = static_cast<std::size_t>(rt.row);
      std::size_t leaving = basis_[r];
      double entering_value = x_[q];
      pivot(r, q, d, extra);
      if (lo_[leaving] == up_[leaving]) {
        x_[leaving] = lo_[leaving];
        state_[leaving] = State::Fixed;
      } else if (rt.to_upper) {
        x_[leaving] = up_[leaving];
        state_[leaving] = State::AtUpper;
      } else {
        x_[leaving] = lo_[leaving];
        state_[leaving] = State::AtLower;
      }
      x_[q] = entering_value;
      if (iterations_ % 100 == 0) refresh_basics();
    }
  }

  /// Bounded dual simplex on d_. Returns false when the bounds admit no feasible point.
  bool dual_run() {
    std::vector<std::vector<double>*> extra;
    for (;;) {
      if (iterations_ >= limit_) throw Error(Errc::NumericalFailure, "dual simplex iteration limit reached");
      long r = -1;
      double worst = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        std::size_t b = basis_[i];
        double tol = cfg_.feas_tol * (1.0 + std::abs(x_[b]));
        double v = 0.0;
        if (x_[b] < lo_[b] - tol) v = lo_[b] - x_[b];
        else if (x_[b] > up_[b] + tol) v = x_[b] - up_[b];
        if (v > worst) {
          worst = v;
          r = static_cast<long>(i);
        }
      }
      if (r < 0) return true;
      std::size_t ri = static_cast<std::size_t>(r);
      std::size_t b = basis_[ri];
      bool raise = x_[b] < lo_[b];
      double target = raise ? lo_[b] : up_[b];
      const double* row = &t_[ri * cols_];
      std::size_t q = cols_;
      int qdir = 0;
      double best = kInf, best_alpha = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) {
        State st = state_[j];
        if (st == State::Basic || st == State::Fixed) continue;
        double alpha = row[j];
        if (std::abs(alpha) <= cfg_.pivot_tol) continue;
        // moving column j by dir changes x_b by -alpha * dir
        int dir = st == State::AtLower ? 1 : st == State::AtUpper ? -1 : ((alpha < 0) == raise ? 1 : -1);
        if ((-alpha * dir > 0) != raise) continue;
        double ratio = std::abs(d_[j]) / std::abs(alpha);
        if (ratio < best - 1e-12 || (ratio <= best + 1e-12 && std::abs(alpha) > best_alpha)) {
          best = ratio;
          best_alpha = std::abs(alpha);
          q = j;
          qdir = dir;
        }
      }
      if (q == cols_) return false;
      ++iterations_;
      double theta = (target - x_[b]) / (-row[q] * qdir);
      for (std::size_t i = 0; i < m_; ++i) {
        double a = at(i, q);
        if (a != 0.0) x_[basis_[i]] -= qdir * theta * a;
      }
      x_[q] += qdir * theta;
      double entering_value = x_[q];
      pivot(ri, q, d_, extra);
      x_[b] = target;
      state_[b] = lo_[b] == up_[b] ? State::Fixed : (raise ? State::AtLower : State::AtUpper);
      x_[q] = entering_value;
      if (iterations_ % 100 == 0) refresh_basics();
    }
  }

  void drive_out_artificials() {
    std::vector<double> dummy(cols_, 0.0);
    std::vector<std::vector<double>*> extra;
    for (std::size_t r = 0; r < m_; ++r) {
      std::size_t b = basis_[r];
      if (b < n_ + m_) continue;
      std::size_t best = cols_;
      double mag = 1e-7;
      for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (pos_[j] >= 0 || state_[j] == State::Fixed) continue;
        if (std::abs(at(r, j)) > mag) {
          mag = std::abs(at(r, j));
          best = j;
        }
      }
      if (best == cols_) continue;
      double v = x_[best];
      pivot(r, best, dummy, extra);
      x_[best] = v;
      x_[b] = 0.0;
      state_[b] = State::Fixed;
    }
    refresh_basics();
  }

  const LinearProgram& lp_;
  LpConfig cfg_;
  std::size_t m_ = 0, n_ = 0, cols_ = 0, num_art_ = 0;
  double sgn_ = 1.0;
  std::vector<double> t_;
  std::vector<double> lo_, up_, x_;
  std::vector<State> state_;
  std::vector<long> pos_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> art_row_;
  std::vector<double> art_sign_;
  std::vector<std::size_t> nz_;
  std::size_t iterations_ = 0;
  std::size_t limit_ = 0;
  std::vector<double> c_, d_;  // phase-two costs and reduced costs of the last optimal basis
  bool warm_ = false;
};

}  // namespace detail

inline LpSolution solve_lp(const LinearProgram& lp, std::span<const double> lower,
                           std::span<const double> upper, const LpConfig& cfg = {}) {
  detail::Simplex s(lp, lower, upper, cfg);
  return s.solve();
}

inline LpSolution solve_lp(const LinearProgram& lp, const LpConfig& cfg = {}) {
  return solve_lp(lp, lp.lower, lp.upper, cfg);
}

/// Phase-one measure min 1'w+ + 1'w- s.t. W y + w+ - w- (rel) rhs, lower <= y <= upper.
/// The returned dual is the multiplier vector sigma with -1 <= sigma <= 1.
inline LpSolution solve_phase_one(const Matrix& w, std::span<const Relation> rel, std::span<const double> rhs,
                                  std::span<const double> lower, std::span<const double> upper,
                                  const LpConfig& cfg = {}) {
  std::size_t m = w.rows(), n = w.cols();
  if (rel.size() != m || rhs.size() != m || lower.size() != n || upper.size() != n)
    throw Error(Errc::MalformedProgram, "phase-one dimensions disagree");
  LinearProgram lp;
  lp.objective.assign(n, 0.0);
  lp.objective.resize(n + 2 * m, 1.0);
  lp.lower.assign(lower.begin(), lower.end());
  lp.lower.resize(n + 2 * m, 0.0);
  lp.upper.assign(upper.begin(), upper.end());
  lp.upper.resize(n + 2 * m, kInf);
  for (std::size_t i = 0; i < m; ++i) {
    Row r;
    r.coef.assign(n + 2 * m, 0.0);
    for (std::size_t j = 0; j < n; ++j) r.coef[j] = w(i, j);
    r.coef[n + i] = 1.0;
    r.coef[n + m + i] = -1.0;
    r.rel = rel[i];
    r.rhs = rhs[i];
    lp.rows.push_back(std::move(r));
  }
  LpSolution sol = solve_lp(lp, cfg);
  if (sol.status != LpStatus::Optimal)
    throw Error(Errc::NumericalFailure, "phase-one problem not solved to optimality");
  return sol;
}

inline LpSolution solve_phase_one(const Matrix& w, std::span<const double> rhs, const LpConfig& cfg = {}) {
  std::vector<Relation> rel(w.rows(), Relation::Equal);
  std::vector<double> lo(w.cols(), 0.0), up(w.cols(), kInf);
  return solve_phase_one(w, rel, rhs, lo, up, cfg);
}

}  // namespace ddsp
