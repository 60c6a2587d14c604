#pragma once

// Independent reference solvers used by the tests: brute-force vertex
// enumeration for small bounded LPs and exhaustive enumeration for small
// binary programs. Neither shares code with the simplex or branch-and-bound.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "ddsp/milp.hpp"

namespace oracle {

/// Solves A x = b (square) by Gaussian elimination with partial pivoting.
inline std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> a, std::vector<double> b) {
  std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    if (std::abs(a[p][c]) < 1e-10) return std::nullopt;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      double f = a[r][c] / a[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

inline bool feasible(const ddsp::LinearProgram& lp, const std::vector<double>& x, double tol) {
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] < lp.lower[j] - tol || x[j] > lp.upper[j] + tol) return false;
  for (const auto& r : lp.rows) {
    double a = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) a += r.coef[j] * x[j];
    if (r.rel == ddsp::Relation::LessEqual && a > r.rhs + tol) return false;
    if (r.rel == ddsp::Relation::GreaterEqual && a < r.rhs - tol) return false;
    if (r.rel == ddsp::Relation::Equal && std::abs(a - r.rhs) > tol) return false;
  }
  return true;
}

/// Best objective over all basic feasible solutions of a bounded LP.
/// Each variable is fixed at a finite bound or left free; free variables are
/// pinned by choosing an equal number of rows to hold with equality.
inline std::optional<double> vertex_enumeration(const ddsp::LinearProgram& lp) {
  std::size_t n = lp.num_vars(), m = lp.rows.size();
  std::optional<double> best;
  std::vector<int> state(n, 0);  // 0 lower, 1 upper, 2 free
  auto consider = [&](const std::vector<double>& x) {
    if (!feasible(lp, x, 1e-7)) return;
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += lp.objective[j] * x[j];
    if (!best) best = obj;
    else if (lp.sense == ddsp::Sense::Minimize) best = std::min(*best, obj);
    else best = std::max(*best, obj);
  };
  for (;;) {
    std::vector<std::size_t> freev;
    std::vector<double> x(n);
    bool finite = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (state[j] == 2) freev.push_back(j);
      else x[j] = state[j] == 0 ? lp.lower[j] : lp.upper[j];
      finite = finite && std::isfinite(x[j]);
    }
    std::size_t k = freev.size();
    if (finite && k <= m) {
      // enumerate row subsets of size k via bitmask
      for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
        std::vector<std::vector<double>> a;
        std::vector<double> b;
        for (std::size_t i = 0; i < m; ++i) {
          if (!(mask & (1u << i))) continue;
          std::vector<double> row(k);
          double rhs = lp.rows[i].rhs;
          for (std::size_t j = 0; j < n; ++j) {
            if (state[j] == 2) continue;
            rhs -= lp.rows[i].coef[j] * x[j];
          }
          for (std::size_t t = 0; t < k; ++t) row[t] = lp.rows[i].coef[freev[t]];
          a.push_back(row);
          b.push_back(rhs);
        }
        if (k == 0) {
          consider(x);
          continue;
        }
        auto sol = solve_square(a, b);
        if (!sol) continue;
        for (std::size_t t = 0; t < k; ++t) x[freev[t]] = (*sol)[t];
        consider(x);
      }
    }
    std::size_t j = 0;
    while (j < n && state[j] == 2) state[j++] = 0;
    if (j == n) break;
    ++state[j];
  }
  return best;
}

/// Exhaustive optimum of a pure binary program given as an LP with all variables in {0,1}.
inline std::optional<double> binary_enumeration(const ddsp::LinearProgram& lp, std::vector<double>* arg = nullptr) {
  std::size_t n = lp.num_vars();
  std::optional<double> best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = (mask >> j) & 1u ? 1.0 : 0.0;
    if (!feasible(lp, x, 1e-9)) continue;
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += lp.objective[j] * x[j];
    bool better = !best || (lp.sense == ddsp::Sense::Minimize ? obj < *best : obj > *best);
    if (better) {
      best = obj;
      if (arg) *arg = x;
    }
  }
  return best;
}

/// Random bounded LP with `m` rows over `n` variables in a finite box; a
/// random interior point is made feasible unless `allow_infeasible`.
inline ddsp::LinearProgram random_lp(std::mt19937_64& rng, std::size_t m, std::size_t n,
                                     bool allow_infeasible = false) {
  std::uniform_int_distribution<int> coef(-5, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ddsp::LinearProgram lp;
  lp.sense = unit(rng) < 0.5 ? ddsp::Sense::Minimize : ddsp::Sense::Maximize;
  std::vector<double> x0(n);
  for (std::size_t j = 0; j < n; ++j) {
    lp.objective.push_back(coef(rng));
    double lo = std::floor(unit(rng) * 4.0) - 2.0;
    double hi = lo + 1.0 + std::floor(unit(rng) * 5.0);
    lp.lower.push_back(lo);
    lp.upper.push_back(hi);
    x0[j] = lo + (hi - lo) * unit(rng);
  }
  for (std::size_t i = 0; i < m; ++i) {
    ddsp::Row r;
    double act = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      r.coef.push_back(coef(rng));
      act += r.coef.back() * x0[j];
    }
    double u = unit(rng);
    r.rel = u < 0.4 ? ddsp::Relation::LessEqual : (u < 0.8 ? ddsp::Relation::GreaterEqual : ddsp::Relation::Equal);
    double slack = std::floor(unit(rng) * 4.0);
    if (allow_infeasible) slack -= 3.0;
    switch (r.rel) {
      case ddsp::Relation::LessEqual: r.rhs = std::round(act) + slack; break;
      case ddsp::Relation::GreaterEqual: r.rhs = std::round(act) - slack; break;
      case ddsp::Relation::Equal: r.rhs = act; break;
    }
    if (allow_infeasible && r.rel == ddsp::Relation::Equal) r.rhs = std::round(act) + slack;
    lp.rows.push_back(std::move(r));
  }
  return lp;
}

/// Random pure binary program with integer data; some draws are infeasible.
inline ddsp::MixedIntegerProgram random_binary_program(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::uniform_int_distribution<int> coef(-6, 9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ddsp::MixedIntegerProgram mip;
  mip.lp.sense = unit(rng) < 0.5 ? ddsp::Sense::Maximize : ddsp::Sense::Minimize;
  for (std::size_t j = 0; j < n; ++j) mip.add_variable(coef(rng), 0.0, 1.0, ddsp::Domain::Binary);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> a(n);
    double total = 0.0;
    for (auto& v : a) {
      v = coef(rng);
      total += std::abs(v);
    }
    double u = unit(rng);
    ddsp::Relation rel = u < 0.6 ? ddsp::Relation::LessEqual : ddsp::Relation::GreaterEqual;
    double rhs = std::round((unit(rng) - 0.3) * total * 0.5);
    mip.lp.add_row(a, rel, rhs);
  }
  return mip;
}

}  // namespace oracle
