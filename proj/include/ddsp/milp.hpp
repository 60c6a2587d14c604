#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "ddsp/lp.hpp"

namespace ddsp {

struct MixedIntegerProgram {
  LinearProgram lp;
  std::vector<Domain> domains;
  /// Optional branching priority per variable; higher values are branched first.
  std::vector<int> priority;

  std::size_t add_variable(double cost, double lo, double hi, Domain dom) {
    domains.push_back(dom);
    if (!priority.empty()) priority.push_back(0);
    return lp.add_variable(cost, lo, hi);
  }
};

enum class MilpStatus { Optimal, Infeasible, Unbounded, TimeLimit };

inline std::string_view to_string(MilpStatus s) {
  switch (s) {
    case MilpStatus::Optimal: return "Optimal";
    case MilpStatus::Infeasible: return "Infeasible";
    case MilpStatus::Unbounded: return "Unbounded";
    case MilpStatus::TimeLimit: return "TimeLimit";
  }
  return "?";
}

struct MilpSolution {
  MilpStatus status = MilpStatus::Infeasible;
  std::vector<double> incumbent;
  double objective = 0.0;
  double bound = 0.0;
  std::size_t node_count = 0;
  std::size_t lp_iterations = 0;
  std::size_t cuts_added = 0;
  /// Global dual bound after each processed node (nondecreasing for min problems).
  std::vector<double> bound_trace;
};

struct NodeInfo {
  double global_bound = -kInf;
  std::size_t node_count = 0;
  bool root = false;
};

/// Receives a node LP solution and returns rows to add to every node.
using CutCallback = std::function<std::vector<Row>(std::span<const double> x, const NodeInfo& info)>;

struct MilpConfig {
  double int_tol = 1e-6;
  double mip_gap = 1e-4;
  double time_limit = kInf;  // seconds
  std::size_t node_limit = 0;
  std::size_t root_cut_rounds = 20;
  /// Depth first until the first incumbent, best bound afterwards. Helps
  /// formulations whose relaxations rarely round to integer points.
  bool dive_first = false;
  /// Rounds of Gomory mixed-integer cuts at the root, each adding up to gomory_per_round rows.
  std::size_t gomory_rounds = 0;
  std::size_t gomory_per_round = 50;
  /// Re-optimize node LPs from the previous node's final basis with dual simplex.
  bool warm_start = true;
  LpConfig lp;
};

namespace detail {

inline void check_mip(const MixedIntegerProgram& mip) {
  std::size_t n = mip.lp.num_vars();
  if (mip.domains.size() != n)
    throw Error(Errc::MalformedProgram, "domain tags do not match variable count");
  if (!mip.priority.empty() && mip.priority.size() != n)
    throw Error(Errc::MalformedProgram, "priority vector does not match variable count");
  for (std::size_t j = 0; j < n; ++j) {
    if (mip.domains[j] == Domain::Binary && (mip.lp.lower[j] < 0.0 || mip.lp.upper[j] > 1.0))
      throw Error(Errc::MalformedProgram, "binary variable " + std::to_string(j) + " has bounds outside [0,1]");
  }
}

inline double row_violation(const Row& r, std::span<const double> x) {
  double a = dot(r.coef, x);
  switch (r.rel) {
    case Relation::LessEqual: return a - r.rhs;
    case Relation::GreaterEqual: return r.rhs - a;
    case Relation::Equal: return std::abs(a - r.rhs);
  }
  return 0.0;
}

/// Gomory mixed-integer cuts from the rows of an optimal tableau whose basic
/// variable is integer and fractional. Rows are returned as coef x >= rhs with
/// unit max-norm, deepest first, and are valid for the bounds the tableau was
/// solved with. Tableau rows that involve slacks of rows flagged in `derived`
/// are skipped, so cuts are never derived from earlier cuts.
inline std::vector<Row> gomory_cuts(const Simplex& sx, const LinearProgram& lp, std::span<const Domain> domains,
                                    std::span<const double> lo, std::span<const double> up,
                                    std::span<const char> derived, std::size_t max_cuts) {
  const std::size_t n = lp.num_vars(), m = sx.num_rows();
  std::vector<std::pair<double, Row>> found;
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = sx.value(j);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t b = sx.basic(i);
    if (b >= n || domains[b] == Domain::Continuous) continue;
    double f0 = sx.value(b) - std::floor(sx.value(b));
    if (f0 < 0.01 || f0 > 0.99) continue;
    auto t = sx.tableau_row(i);
    Row cut{std::vector<double>(n, 0.0), Relation::GreaterEqual, 1.0};
    bool ok = true;
    for (std::size_t j = 0; j < n + m && ok; ++j) {
      if (j == b || std::abs(t[j]) < 1e-11) continue;
      int side = sx.side(j);
      if (side == 2 || (j >= n && derived[j - n] && side != 0)) ok = false;
      if (side == 0 || side == 2) continue;
      // t_j >= 0 is the distance of column j from its active bound
      double a = side < 0 ? t[j] : -t[j];
      double g;
      if (j < n && domains[j] != Domain::Continuous) {
        double fj = a - std::floor(a);
        g = std::min(fj / f0, (1.0 - fj) / (1.0 - f0));
      } else {
        g = a > 0 ? a / f0 : -a / (1.0 - f0);
      }
      if (g == 0.0) continue;
      if (j < n) {
        if (side < 0) {
          cut.coef[j] += g;
          cut.rhs += g * lo[j];
        } else {
          cut.coef[j] -= g;
          cut.rhs -= g * up[j];
        }
      } else {
        const Row& r = lp.rows[j - n];
        double sg = side < 0 ? -g : g;
        for (std::size_t k = 0; k < n; ++k) cut.coef[k] += sg * r.coef[k];
        cut.rhs += sg * r.rhs;
      }
    }
    if (!ok) continue;
    double big = 0.0, small = kInf;
    for (double& c : cut.coef) {
      if (std::abs(c) < 1e-12) c = 0.0;
      if (c != 0.0) {
        big = std::max(big, std::abs(c));
        small = std::min(small, std::abs(c));
      }
    }
    if (big == 0.0 || big / small > 1e6) continue;
    for (double& c : cut.coef) c /= big;
    cut.rhs /= big;
    double act = 0.0;
    for (std::size_t k = 0; k < n; ++k) act += cut.coef[k] * x[k];
    double depth = cut.rhs - act;
    if (depth < 1e-6) continue;
    cut.rhs -= 1e-9 * (1.0 + std::abs(cut.rhs));
    found.emplace_back(depth, std::move(cut));
  }
  std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<Row> out;
  for (std::size_t k = 0; k < found.size() && k < max_cuts; ++k) out.push_back(std::move(found[k].second));
  return out;
}

}  // namespace detail

/// Best-bound branch and bound. `lazy` is invoked at integer-feasible nodes and
/// `root_cuts` on root relaxations; returned rows are added globally and the
/// node is re-solved.
inline MilpSolution solve_milp(const MixedIntegerProgram& mip, const CutCallback& lazy = {},
                               const MilpConfig& cfg = {}, const CutCallback& root_cuts = {}) {
  detail::check_mip(mip);
  using clock = std::chrono::steady_clock;
  auto start = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  const std::size_t n = mip.lp.num_vars();
  const double sgn = mip.lp.sense == Sense::Maximize ? -1.0 : 1.0;
  LinearProgram work = mip.lp;

  std::vector<double> root_lo = work.lower, root_up = work.upper;
  for (std::size_t j = 0; j < n; ++j) {
    if (mip.domains[j] != Domain::Continuous) {
      root_lo[j] = std::ceil(root_lo[j] - cfg.int_tol);
      root_up[j] = std::floor(root_up[j] + cfg.int_tol);
    }
  }

  constexpr std::size_t kNoNode = std::numeric_limits<std::size_t>::max();
  MilpSolution out;
  double inc = kInf;  // min-form incumbent value
  std::vector<double> inc_x;
  std::size_t next_id = 0;
  double last_bound = -kInf;
  bool timed_out = false;

  struct Node {
    double bound;  // min-form lower bound inherited from the parent
    std::size_t id;
    std::vector<double> lo, up;
    std::size_t var = 0;  // branching variable that created the node, n at the root
    int dir = 0;          // 0 down, 1 up
    double dist = 0.0;    // distance the branch moved the variable
    int pri = 0;          // priority of that variable
    std::vector<Row> local;  // cuts valid in this subtree only
    std::size_t local_tag = 0;  // identifies the content of `local`
  };
  // pseudo-costs: observed bound gain per unit of rounding, per direction
  std::vector<double> pc_sum[2] = {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  std::vector<std::size_t> pc_cnt[2] = {std::vector<std::size_t>(n, 0), std::vector<std::size_t>(n, 0)};
  double pc_total[2] = {0.0, 0.0};
  std::size_t pc_seen[2] = {0, 0};
  auto pseudo_cost = [&](std::size_t j, int dir) {
    if (pc_cnt[dir][j]) return pc_sum[dir][j] / static_cast<double>(pc_cnt[dir][j]);
    return pc_seen[dir] ? pc_total[dir] / static_cast<double>(pc_seen[dir]) : 1.0;
  };
  auto cmp = [](const Node& a, const Node& b) {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> open(cmp);
  std::vector<Node> dive;  // depth-first stack used until the first incumbent
  auto open_bound = [&] {
    double b = open.empty() ? kInf : open.top().bound;
    for (const auto& nd : dive) b = std::min(b, nd.bound);
    return b;
  };
  auto push = [&](Node nd) {
    if (cfg.dive_first && !std::isfinite(inc)) dive.push_back(std::move(nd));
    else open.push(std::move(nd));
  };

  auto fathomed = [&](double value) {
    return std::isfinite(inc) && value >= inc - cfg.mip_gap * (1.0 + std::abs(inc));
  };

  // tableau of the last LP solved, reused by nodes with the same rows
  std::optional<detail::Simplex> sx;
  LinearProgram sx_lp;  // work plus local cuts when the node has any
  std::size_t sx_rows = 0, sx_tag = kNoNode, next_tag = 1, warm_chain = 0;

  std::vector<char> derived(work.rows.size(), 0);  // rows that are Gomory cuts
  auto add_rows = [&](std::vector<Row>& rows) {
    for (auto& r : rows) {
      if (r.coef.size() != n) throw Error(Errc::MalformedProgram, "cut row has wrong length");
      if (!inc_x.empty() && detail::row_violation(r, inc_x) > 1e-6 * (1.0 + std::abs(r.rhs))) {
        inc = kInf;
        inc_x.clear();
      }
      work.rows.push_back(std::move(r));
      derived.push_back(0);
      ++out.cuts_added;
    }
  };

  if (root_lo.size() == n) {
    bool empty = false;
    for (std::size_t j = 0; j < n; ++j)
      if (root_lo[j] > root_up[j]) empty = true;
    if (!empty) push(Node{-kInf, next_id++, root_lo, root_up, n, 0, 0.0, std::numeric_limits<int>::max(), {}, 0});
  }

  while (!open.empty() || !dive.empty()) {
    if (elapsed() > cfg.time_limit || (cfg.node_limit && out.node_count >= cfg.node_limit)) {
      timed_out = true;
      break;
    }
    if (std::isfinite(inc))
      for (auto& nd : std::exchange(dive, {})) open.push(std::move(nd));
    Node node;
    if (!dive.empty()) {
      node = std::move(dive.back());
      dive.pop_back();
    } else {
      node = open.top();
      open.pop();
    }
    if (fathomed(node.bound)) continue;
    bool is_root = node.id == 0;
    ++out.node_count;

    // Gomory rounds run at the root (global cuts) and at the first node of a
    // path whose branching candidates fall below the priority that created it
    // (cuts local to the subtree)
    std::size_t root_rounds = 0, gomory_round = 0;
    double gomory_prev = -kInf;
    bool local_cutting = false;
    bool learned = node.var == n;
    for (;;) {
      std::optional<LpSolution> warm;
      if (cfg.warm_start && sx && sx_tag == node.local_tag && sx_rows == work.rows.size() && warm_chain < 200) {
        warm = sx->resolve(node.lo, node.up);
        if (warm) ++warm_chain;
      }
      if (!warm) {
        sx.reset();
        if (node.local.empty()) {
          sx.emplace(work, node.lo, node.up, cfg.lp);
        } else {
          sx_lp = work;
          sx_lp.rows.insert(sx_lp.rows.end(), node.local.begin(), node.local.end());
          sx.emplace(sx_lp, node.lo, node.up, cfg.lp);
        }
        warm = sx->solve();
        warm_chain = 0;
      }
      const LinearProgram& prog = node.local.empty() ? work : sx_lp;
      sx_rows = work.rows.size();
      sx_tag = node.local_tag;
      LpSolution rel = std::move(*warm);
      out.lp_iterations += rel.iterations;
      if (rel.status == LpStatus::Infeasible) break;
      if (rel.status == LpStatus::Unbounded) {
        out.status = MilpStatus::Unbounded;
        out.node_count = std::max<std::size_t>(out.node_count, 1);
        return out;
      }
      double val = sgn * rel.objective;
      if (!learned) {
        learned = true;
        double gain = std::max(0.0, val - node.bound) / node.dist;
        pc_sum[node.dir][node.var] += gain;
        ++pc_cnt[node.dir][node.var];
        pc_total[node.dir] += gain;
        ++pc_seen[node.dir];
      }
      if (fathomed(val)) break;
      double gb = std::min(val, open_bound());
      NodeInfo info{sgn * std::min(gb, inc), out.node_count, is_root};

      if (is_root && root_cuts && root_rounds < cfg.root_cut_rounds) {
        ++root_rounds;
        std::vector<Row> rows = root_cuts(rel.primal, info);
        bool violated = false;
        for (const auto& r : rows)
          if (detail::row_violation(r, rel.primal) > 1e-9 * (1.0 + std::abs(r.rhs))) violated = true;
        add_rows(rows);
        if (violated) continue;
        root_rounds = cfg.root_cut_rounds;
      }

      // highest priority, then best pseudo-cost product score, then lowest index;
      // without history the score ranks by fractionality
      std::size_t branch = n;
      double best_score = 0.0;
      int best_pri = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (mip.domains[j] == Domain::Continuous) continue;
        double v = rel.primal[j];
        double fr = v - std::floor(v);
        if (std::min(fr, 1.0 - fr) <= cfg.int_tol) continue;
        double score = std::max(pseudo_cost(j, 0) * fr, 1e-6) * std::max(pseudo_cost(j, 1) * (1.0 - fr), 1e-6);
        int pri = mip.priority.empty() ? 0 : mip.priority[j];
        if (branch == n || pri > best_pri || (pri == best_pri && score > best_score * (1.0 + 1e-9))) {
          branch = j;
          best_score = score;
          best_pri = pri;
        }
      }

      if (branch != n && gomory_round < cfg.gomory_rounds &&
          (is_root || local_cutting || best_pri < node.pri)) {
        local_cutting = !is_root;
        ++gomory_round;
        std::vector<Row> rows;
        if (val > gomory_prev + 1e-7 * (1.0 + std::abs(val))) {
          std::vector<char> mask = derived;
          mask.resize(prog.rows.size(), 1);
          rows = detail::gomory_cuts(*sx, prog, mip.domains, node.lo, node.up, mask, cfg.gomory_per_round);
        }
        gomory_prev = val;
        if (!rows.empty()) {
          for (auto& r : rows) {
            if (is_root) {
              work.rows.push_back(std::move(r));
              derived.push_back(1);
            } else {
              node.local.push_back(std::move(r));
            }
          }
          if (!is_root) node.local_tag = next_tag++;
          continue;
        }
        gomory_round = cfg.gomory_rounds;
      }

      if (branch == n) {
        std::vector<double> x = rel.primal;
        for (std::size_t j = 0; j < n; ++j)
          if (mip.domains[j] != Domain::Continuous) x[j] = std::round(x[j]);
        if (lazy) {
          std::vector<Row> rows = lazy(x, info);
          bool violated = false;
          for (const auto& r : rows)
            if (detail::row_violation(r, x) > 1e-9 * (1.0 + std::abs(r.rhs))) violated = true;
          add_rows(rows);
          if (violated) continue;
        }
        if (val < inc) {
          inc = val;
          inc_x = std::move(x);
        }
        break;
      }

      double v = rel.primal[branch];
      Node down{val, next_id++, node.lo, node.up, branch, 0, v - std::floor(v), best_pri, node.local};
      down.up[branch] = std::floor(v);
      Node up{val,    next_id++, std::move(node.lo), std::move(node.up), branch, 1, std::ceil(v) - v,
              best_pri, std::move(node.local)};
      up.lo[branch] = std::ceil(v);
      down.local_tag = up.local_tag = node.local_tag;
      // the nearer rounding is pushed last so a dive takes it first
      if (v - std::floor(v) < 0.5) std::swap(down, up);
      push(std::move(down));
      push(std::move(up));
      break;
    }

    double gb = std::min(open_bound(), inc);
    last_bound = std::max(last_bound, gb);
    out.bound_trace.push_back(sgn * last_bound);
  }

  double bound = std::min(open_bound(), inc);
  bound = std::max(bound, last_bound);
  if (timed_out) {
    out.status = MilpStatus::TimeLimit;
  } else if (inc_x.empty()) {
    out.status = MilpStatus::Infeasible;
  } else {
    out.status = MilpStatus::Optimal;
  }
  if (!inc_x.empty()) {
    out.incumbent = inc_x;
    out.objective = sgn * inc;
  }
  out.bound = sgn * bound;
  return out;
}

}  // namespace ddsp
