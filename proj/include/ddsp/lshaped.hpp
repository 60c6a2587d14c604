#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ddsp/bounds.hpp"
#include "ddsp/cuts.hpp"
#include "ddsp/distind.hpp"
#include "ddsp/recourse.hpp"

namespace ddsp {

enum class Mode { Loop, Callback };

inline std::string_view to_string(Mode m) { return m == Mode::Loop ? "ls-loop" : "ls-callback"; }

enum class RunStatus { Optimal, TimeLimit, Stalled };

inline std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Optimal: return "Optimal";
    case RunStatus::TimeLimit: return "TimeLimit";
    case RunStatus::Stalled: return "Stalled";
  }
  return "?";
}

struct IterationRecord {
  std::size_t iteration = 0;
  std::string phase;  // feas | opt | done
  std::vector<double> x;
  std::size_t d = 0;
  double mu = 0.0;
  std::optional<double> recourse;
  std::vector<std::size_t> cuts;  // indices into RunResult::cuts
  double lower_bound = -kInf;
  double upper_bound = kInf;
  double gap = kInf;
  std::size_t cuts_total = 0;
  double wall_ms = 0.0;
};

struct EngineConfig {
  Mode mode = Mode::Loop;
  double gap_tol = 1e-4;
  double time_limit = 1800.0;
  DistIndFamily distind = DistIndFamily::None;
  /// Absolute slack (scaled by 1 + |Q|) below which mu is accepted as estimating Q.
  double opt_tol = 1e-7;
  std::size_t max_iterations = 100000;
  RecourseConfig recourse;
  LpConfig lp;
  std::function<void(const IterationRecord&)> on_iteration;
  /// Bound constants to use instead of computing them.
  std::optional<BoundConstants> bounds;
};

struct RunResult {
  RunStatus status = RunStatus::Optimal;
  std::vector<double> x;
  std::size_t d = 0;
  double mu = 0.0;
  double objective = kInf;  // c'x + Q_d(x) in minimization form
  double lower_bound = -kInf;
  double upper_bound = kInf;
  double gap = kInf;
  std::vector<IterationRecord> iterations;
  std::vector<Cut> cuts;
  BoundConstants bounds;
  std::size_t master_nodes = 0;
  double wall_ms = 0.0;

  std::size_t count(CutKind k) const {
    std::size_t n = 0;
    for (const auto& c : cuts) n += c.kind == k;
    return n;
  }
  std::size_t optimality_cuts() const { return count(CutKind::ContOpt) + count(CutKind::IntOpt); }
};

inline double relative_gap(double lb, double ub) {
  if (!std::isfinite(ub) || !std::isfinite(lb)) return kInf;
  return std::max(0.0, ub - lb) / (1.0 + std::abs(ub));
}

/// Master problem over (x, encoding, mu) before any cut.
inline MixedIntegerProgram build_master(const SpInstance& inst, const IndicatorEncoding& enc, double mu_lower) {
  const std::size_t n1 = inst.n1(), k = enc.size();
  MixedIntegerProgram mip;
  for (std::size_t j = 0; j < n1; ++j)
    mip.add_variable(inst.first.cost[j], inst.first.lower[j], inst.first.upper[j], inst.first.domains[j]);
  for (std::size_t j = 0; j < k; ++j) mip.add_variable(0.0, 0.0, 1.0, Domain::Binary);
  mip.add_variable(1.0, mu_lower, kInf, Domain::Continuous);
  for (const auto& r : inst.first.constraints) {
    Row row{r.coef, r.rel, r.rhs};
    row.coef.resize(n1 + k + 1, 0.0);
    mip.lp.rows.push_back(std::move(row));
  }
  for (const auto& r : enc.rows) {
    Row row{r.coef, r.rel, r.rhs};
    row.coef.resize(n1 + k + 1, 0.0);
    mip.lp.rows.push_back(std::move(row));
  }
  // among optimal masters prefer the smallest mu
  mip.lp.tiebreak.assign(n1 + k + 1, 0.0);
  mip.lp.tiebreak[n1 + k] = 1.0;
  return mip;
}

namespace detail {

class Engine {
 public:
  Engine(const SpInstance& inst, const EngineConfig& cfg)
      : inst_(inst), cfg_(cfg), enc_(build_indicator_encoding(inst)), start_(clock::now()) {
    validate_instance(inst);
    result_.bounds = cfg.bounds ? *cfg.bounds : compute_bounds(inst, cfg.recourse);
    integer_ = inst.recourse.kind == StageKind::MixedInteger;
    if (integer_ && !first_stage_all_binary(inst))
      throw Error(Errc::NonBinaryX, "integer recourse requires a binary first stage");
  }

  RunResult run() {
    if (cfg_.mode == Mode::Loop) run_loop();
    else run_callback();
    result_.wall_ms = elapsed_ms();
    return std::move(result_);
  }

 private:
  using clock = std::chrono::steady_clock;

  double elapsed_ms() const { return std::chrono::duration<double, std::milli>(clock::now() - start_).count(); }
  double remaining_s() const { return cfg_.time_limit - elapsed_ms() / 1000.0; }

  std::size_t n1() const { return inst_.n1(); }
  std::size_t mu_index() const { return inst_.n1() + enc_.size(); }

  std::size_t cell_of(std::span<const double> point) const {
    if (enc_.size() == 0) return 0;
    std::span<const double> v = point.subspan(n1(), enc_.size());
    std::size_t best = 0;
    double best_act = kInf;
    for (std::size_t d = 0; d < inst_.num_distributions(); ++d) {
      double a = enc_.activation[d].eval(v);
      if (a < best_act) {
        best_act = a;
        best = d;
      }
    }
    return best;
  }

  double accept_tol(double q) const { return cfg_.opt_tol * (1.0 + std::abs(q)); }

  /// Adds a cut unless an identical one exists. Returns true when added.
  bool add_cut(Cut c, std::vector<std::size_t>& added) {
    auto key = cut_key(c);
    if (!keys_.insert(key).second) return false;
    c.iteration = iteration_;
    result_.cuts.push_back(std::move(c));
    added.push_back(result_.cuts.size() - 1);
    return true;
  }

  struct Separation {
    std::string phase;
    std::optional<double> recourse;
    std::vector<std::size_t> added;
    bool violated = false;  // some cut family found (x, mu) inexact, whether or not a new row resulted
  };

  /// Evaluates the recourse at (x, mu) in cell d and generates the violated cuts.
  Separation separate(std::span<const double> x, double mu, std::size_t d) {
    Separation out;
    RecourseEvaluation ev = evaluate_recourse(inst_, x, d, cfg_.recourse);
    const auto& B = result_.bounds;
    if (!ev.feasible) {
      out.phase = "feas";
      out.violated = true;
      if (ev.relaxation_infeasible) {
        std::size_t s = *ev.infeasible_scenario;
        add_cut(gen_feas_cut_continuous(inst_, x, d, s, ev.sigma, ev.sigma_constant, B.u_feas[d][s]), out.added);
      } else {
        add_cut(gen_feas_cut_integer(x), out.added);
      }
      return out;
    }
    out.recourse = ev.value;
    double value = dot(inst_.first.cost, x) + ev.value;
    if (value < result_.upper_bound) {
      result_.upper_bound = value;
      best_x_.assign(x.begin(), x.end());
      best_d_ = d;
      best_q_ = ev.value;
    }
    bool exact = mu >= ev.value - accept_tol(ev.value);
    bool relaxed_exact = !integer_ || mu >= ev.relaxed_value - accept_tol(ev.relaxed_value);
    if (exact && relaxed_exact) {
      out.phase = "done";
      return out;
    }
    out.phase = "opt";
    out.violated = !exact;
    const auto& scen = ev.scenarios;
    std::vector<std::vector<double>> rho;
    std::vector<double> kappa;
    for (const auto& s : scen) {
      rho.push_back(s.dual);
      kappa.push_back(s.constant);
    }
    if (integer_ ? !relaxed_exact : !exact) {
      Cut c = gen_opt_cut_continuous(inst_, x, d, rho, kappa, B.u_opt);
      c.relaxation = integer_;
      add_cut(std::move(c), out.added);
    }
    if (integer_ && !exact) add_cut(gen_opt_cut_integer(x, d, ev.value, B.lower[d], B.u_opt), out.added);
    return out;
  }

  void add_distind(std::span<const double> x, double mu, std::vector<std::size_t>& added) {
    if (cfg_.distind == DistIndFamily::None) return;
    auto c = gen_distind_cut(cfg_.distind, inst_, enc_, x, cfg_.lp);
    if (!c) return;
    if (c->violation(x, mu, 0.0) <= 1e-9 * (1.0 + std::abs(c->rhs))) return;
    add_cut(std::move(*c), added);
  }

  void record(IterationRecord rec) {
    rec.iteration = iteration_;
    rec.lower_bound = result_.lower_bound;
    rec.upper_bound = result_.upper_bound;
    rec.gap = relative_gap(result_.lower_bound, result_.upper_bound);
    rec.cuts_total = result_.cuts.size();
    rec.wall_ms = elapsed_ms();
    if (cfg_.on_iteration) cfg_.on_iteration(rec);
    result_.iterations.push_back(std::move(rec));
  }

  void finish(RunStatus status, std::span<const double> x, std::size_t d, double mu, double q) {
    result_.status = status;
    result_.x.assign(x.begin(), x.end());
    result_.d = d;
    result_.mu = mu;
    result_.objective = dot(inst_.first.cost, x) + q;
    result_.gap = relative_gap(result_.lower_bound, result_.upper_bound);
  }

  void finish_with_best(RunStatus status) {
    if (best_x_.empty()) {
      result_.status = status;
      result_.gap = kInf;
      return;
    }
    std::vector<double> x = best_x_;
    finish(status, x, best_d_, best_q_, best_q_);
  }

  MilpConfig master_config(double gap) const {
    MilpConfig mc;
    mc.mip_gap = gap;
    mc.lp = cfg_.lp;
    mc.time_limit = std::max(0.0, remaining_s());
    return mc;
  }

  void run_loop() {
    MixedIntegerProgram master = build_master(inst_, enc_, result_.bounds.mu_lower);
    std::size_t rows_in_master = 0;
    for (iteration_ = 1; iteration_ <= cfg_.max_iterations; ++iteration_) {
      if (remaining_s() <= 0.0) return finish_with_best(RunStatus::TimeLimit);
      for (; rows_in_master < result_.cuts.size(); ++rows_in_master)
        master.lp.rows.push_back(cut_row(result_.cuts[rows_in_master], enc_));
      MilpSolution ms = solve_milp(master, {}, master_config(1e-9));
      result_.master_nodes += ms.node_count;
      if (ms.status == MilpStatus::TimeLimit) return finish_with_best(RunStatus::TimeLimit);
      if (ms.status == MilpStatus::Infeasible)
        throw Error(Errc::InfeasibleMaster, "master problem infeasible at iteration " + std::to_string(iteration_));
      if (ms.status == MilpStatus::Unbounded) throw Error(Errc::InfeasibleMaster, "master problem unbounded");
      result_.lower_bound = std::max(result_.lower_bound, ms.bound);
      std::vector<double> x(ms.incumbent.begin(), ms.incumbent.begin() + n1());
      double mu = ms.incumbent[mu_index()];
      std::size_t d = cell_of(ms.incumbent);
      Separation sep = separate(x, mu, d);
      // the current iterate, not the incumbent, decides termination
      bool converged = sep.phase == "done";
      if (!converged && sep.recourse) {
        double value = dot(inst_.first.cost, x) + *sep.recourse;
        converged = value - result_.lower_bound <= cfg_.gap_tol * (1.0 + std::abs(value));
      }
      if (converged) {
        IterationRecord rec{.phase = "done", .x = x, .d = d, .mu = mu, .recourse = sep.recourse, .cuts = {}};
        record(std::move(rec));
        return finish(RunStatus::Optimal, x, d, mu, *sep.recourse);
      }
      if (sep.phase == "opt") add_distind(x, mu, sep.added);
      IterationRecord rec{.phase = sep.phase, .x = x, .d = d, .mu = mu, .recourse = sep.recourse, .cuts = sep.added};
      record(std::move(rec));
      if (sep.added.empty()) return finish_with_best(RunStatus::Stalled);
    }
    finish_with_best(RunStatus::Stalled);
  }

  void run_callback() {
    MixedIntegerProgram master = build_master(inst_, enc_, result_.bounds.mu_lower);
    bool stalled = false;
    iteration_ = 0;
    auto lazy = [&](std::span<const double> point, const NodeInfo& info) {
      ++iteration_;
      std::vector<double> x(point.begin(), point.begin() + n1());
      double mu = point[mu_index()];
      std::size_t d = cell_of(point);
      result_.lower_bound = std::max(result_.lower_bound, info.global_bound);
      Separation sep = separate(x, mu, d);
      if (sep.violated && sep.added.empty()) stalled = true;
      std::vector<Row> rows;
      for (std::size_t i : sep.added) rows.push_back(cut_row(result_.cuts[i], enc_));
      IterationRecord rec{.phase = sep.phase, .x = x, .d = d, .mu = mu, .recourse = sep.recourse, .cuts = sep.added};
      record(std::move(rec));
      return rows;
    };
    auto root = [&](std::span<const double> point, const NodeInfo&) {
      std::vector<Row> rows;
      if (cfg_.distind == DistIndFamily::None) return rows;
      std::vector<double> x(point.begin(), point.begin() + n1());
      std::vector<std::size_t> added;
      add_distind(x, point[mu_index()], added);
      for (std::size_t i : added) rows.push_back(cut_row(result_.cuts[i], enc_));
      return rows;
    };
    MilpConfig mc = master_config(cfg_.gap_tol);
    MilpSolution ms = solve_milp(master, lazy, mc, root);
    result_.master_nodes = ms.node_count;
    if (ms.status == MilpStatus::Infeasible) throw Error(Errc::InfeasibleMaster, "master problem infeasible");
    if (ms.status == MilpStatus::Unbounded) throw Error(Errc::InfeasibleMaster, "master problem unbounded");
    if (ms.status == MilpStatus::Optimal || (ms.status == MilpStatus::TimeLimit && std::isfinite(ms.bound)))
      result_.lower_bound = std::max(result_.lower_bound, ms.bound);
    if (ms.status == MilpStatus::TimeLimit) return finish_with_best(RunStatus::TimeLimit);
    std::vector<double> x(ms.incumbent.begin(), ms.incumbent.begin() + n1());
    double mu = ms.incumbent[mu_index()];
    std::size_t d = cell_of(ms.incumbent);
    RecourseEvaluation ev = evaluate_recourse(inst_, x, d, cfg_.recourse);
    if (!ev.feasible) throw Error(Errc::NumericalFailure, "final master solution has infeasible recourse");
    double value = dot(inst_.first.cost, x) + ev.value;
    if (value < result_.upper_bound) {
      result_.upper_bound = value;
      best_x_ = x;
      best_d_ = d;
      best_q_ = ev.value;
    }
    ++iteration_;
    IterationRecord rec{.phase = "done", .x = x, .d = d, .mu = mu, .recourse = ev.value, .cuts = {}};
    record(std::move(rec));
    RunStatus status = stalled && relative_gap(result_.lower_bound, result_.upper_bound) > cfg_.gap_tol
                           ? RunStatus::Stalled
                           : RunStatus::Optimal;
    finish_with_best(status);
    result_.mu = mu;
  }

  const SpInstance& inst_;
  const EngineConfig& cfg_;
  IndicatorEncoding enc_;
  clock::time_point start_;
  bool integer_ = false;
  RunResult result_;
  std::set<std::vector<long long>> keys_;
  std::size_t iteration_ = 0;
  std::vector<double> best_x_;
  std::size_t best_d_ = 0;
  double best_q_ = 0.0;
};

}  // namespace detail

/// L-shaped method for decision-dependent two-stage programs (loop or lazy-callback mode).
inline RunResult run(const SpInstance& inst, const EngineConfig& cfg = {}) {
  detail::Engine engine(inst, cfg);
  return engine.run();
}

/// CSV iteration log with a versioned header comment.
inline void write_iteration_header(std::ostream& os) {
  os << "# ddsp-iteration-log v1 (bounds in minimization form)\n";
  os << "iteration,phase,d,LB,UB,gap,cuts_total,wall_ms\n";
}

inline void write_iteration_row(std::ostream& os, const SpInstance& inst, const IterationRecord& r, bool timing) {
  auto num = [](double v) {
    if (v == kInf) return std::string("inf");
    if (v == -kInf) return std::string("-inf");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::string(buf);
  };
  os << r.iteration << ',' << r.phase << ',' << inst.distributions[r.d].id << ',' << num(r.lower_bound) << ','
     << num(r.upper_bound) << ',' << num(r.gap) << ',' << r.cuts_total << ',' << (timing ? num(r.wall_ms) : "0")
     << '\n';
}

}  // namespace ddsp
