#pragma once

#include <optional>
#include <vector>

#include "ddsp/milp.hpp"
#include "ddsp/model.hpp"

namespace ddsp {

/// h - T x for one scenario.
inline std::vector<double> scenario_rhs(const ScenarioData& s, std::span<const double> x) {
  std::vector<double> r = s.h;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= dot(s.T.row(i), x);
  return r;
}

/// min q'y s.t. W y (rel) rhs over the recourse bounds, as an LP (integrality dropped).
inline LinearProgram recourse_lp(const SpInstance& inst, const ScenarioData& s, std::span<const double> rhs) {
  const Recourse& rc = inst.recourse;
  LinearProgram lp;
  lp.objective = s.q;
  lp.lower = rc.lower;
  lp.upper = rc.upper;
  lp.rows.reserve(rc.num_rows());
  for (std::size_t i = 0; i < rc.num_rows(); ++i) {
    auto row = s.W.row(i);
    lp.rows.push_back(Row{std::vector<double>(row.begin(), row.end()), rc.relations[i], rhs[i]});
  }
  return lp;
}

inline MixedIntegerProgram recourse_mip(const SpInstance& inst, const ScenarioData& s, std::span<const double> rhs) {
  MixedIntegerProgram mip;
  mip.lp = recourse_lp(inst, s, rhs);
  mip.domains = inst.recourse.domains;
  return mip;
}

struct RecourseConfig {
  LpConfig lp;
  MilpConfig milp = [] {
    MilpConfig c;
    c.mip_gap = 1e-9;
    return c;
  }();
};

struct ScenarioOutcome {
  bool feasible = false;
  double value = kInf;          // Q(x, xi) (integer program value for integer recourse)
  double relaxed_value = kInf;  // LP relaxation value
  std::vector<double> dual;     // optimal duals of the (relaxed) recourse rows
  double constant = 0.0;        // relaxed_value - dual'(h - T x): contribution of bound multipliers
  std::vector<double> y;
};

struct RecourseEvaluation {
  std::size_t d = 0;
  bool feasible = false;
  double value = kInf;          // Q_d(x) = sum_s pi_s Q(x, xi_s)
  double relaxed_value = kInf;  // expected LP-relaxation value
  std::vector<ScenarioOutcome> scenarios;
  std::optional<std::size_t> infeasible_scenario;
  bool relaxation_infeasible = false;
  std::vector<double> sigma;  // phase-one multipliers of the infeasible scenario
  double sigma_constant = 0.0;
  double psi = 0.0;
};

/// Solves every scenario of distribution d at x. Stops at the first infeasible
/// scenario and returns its phase-one multipliers.
inline RecourseEvaluation evaluate_recourse(const SpInstance& inst, std::span<const double> x, std::size_t d,
                                            const RecourseConfig& cfg = {}) {
  RecourseEvaluation ev;
  ev.d = d;
  const auto& dist = inst.distributions.at(d);
  const bool integer = inst.recourse.kind == StageKind::MixedInteger;
  double total = 0.0, relaxed = 0.0;
  for (std::size_t s = 0; s < dist.scenarios.size(); ++s) {
    const ScenarioData& sc = dist.scenarios[s];
    std::vector<double> rhs = scenario_rhs(sc, x);
    LinearProgram lp = recourse_lp(inst, sc, rhs);
    LpSolution rel = solve_lp(lp, cfg.lp);
    if (rel.status == LpStatus::Unbounded)
      throw Error(Errc::NumericalFailure, "recourse problem unbounded in distribution " + dist.id);
    ScenarioOutcome out;
    if (rel.status == LpStatus::Infeasible) {
      Matrix w = sc.W;
      LpSolution p1 = solve_phase_one(w, inst.recourse.relations, rhs, inst.recourse.lower, inst.recourse.upper, cfg.lp);
      ev.infeasible_scenario = s;
      ev.relaxation_infeasible = true;
      ev.sigma = p1.dual;
      ev.psi = p1.objective;
      ev.sigma_constant = p1.objective - dot(p1.dual, rhs);
      ev.scenarios.push_back(std::move(out));
      return ev;
    }
    out.relaxed_value = rel.objective;
    out.dual = rel.dual;
    out.constant = rel.objective - dot(rel.dual, rhs);
    if (integer) {
      MilpSolution ms = solve_milp(recourse_mip(inst, sc, rhs), {}, cfg.milp);
      if (ms.status == MilpStatus::Infeasible) {
        ev.infeasible_scenario = s;
        ev.scenarios.push_back(std::move(out));
        return ev;
      }
      if (ms.status != MilpStatus::Optimal)
        throw Error(Errc::NumericalFailure, "integer recourse not solved to optimality");
      out.value = ms.objective;
      out.y = ms.incumbent;
    } else {
      out.value = rel.objective;
      out.y = rel.primal;
    }
    out.feasible = true;
    total += sc.probability * out.value;
    relaxed += sc.probability * out.relaxed_value;
    ev.scenarios.push_back(std::move(out));
  }
  ev.feasible = true;
  ev.value = total;
  ev.relaxed_value = relaxed;
  return ev;
}

}  // namespace ddsp
