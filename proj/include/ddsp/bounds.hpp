#pragma once

#include <string>
#include <vector>

#include "ddsp/recourse.hpp"

namespace ddsp {

enum class Provenance { Computed, UserSupplied };

inline std::string_view to_string(Provenance p) {
  return p == Provenance::Computed ? "computed" : "user_supplied";
}

struct BoundConstants {
  std::vector<std::vector<double>> u_feas;  // [d][s]
  double u_opt = 0.0;
  std::vector<double> lower;  // L[d]; +inf when no point of the cell has feasible recourse
  std::vector<double> upper;  // U'_d; empty when not needed
  double mu_lower = 0.0;
  Provenance u_feas_source = Provenance::Computed;
  Provenance u_opt_source = Provenance::Computed;
  Provenance mu_lower_source = Provenance::Computed;
};

namespace detail {

/// First-stage variables that appear in some technology matrix.
inline std::vector<std::size_t> technology_support(const SpInstance& inst) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < inst.n1(); ++j) {
    bool used = false;
    for (const auto& d : inst.distributions)
      for (const auto& s : d.scenarios)
        for (std::size_t i = 0; i < s.T.rows() && !used; ++i) used = s.T(i, j) != 0.0;
    if (used) out.push_back(j);
  }
  return out;
}

inline double clamp_zero(double lo, double hi) { return std::min(std::max(0.0, lo), hi); }

}  // namespace detail

/// Scenario-wise lower bound of the LP-relaxed recourse over the relaxed cell d.
inline double cell_lower_bound(const SpInstance& inst, std::size_t d, const LpConfig& cfg = {}) {
  const std::size_t n1 = inst.n1(), n2 = inst.n2();
  std::vector<Row> cell = cell_rows(inst, d);
  double total = 0.0;
  for (const auto& s : inst.distributions[d].scenarios) {
    LinearProgram lp;
    for (std::size_t j = 0; j < n1; ++j) lp.add_variable(0.0, inst.first.lower[j], inst.first.upper[j]);
    for (std::size_t j = 0; j < n2; ++j) lp.add_variable(s.q[j], inst.recourse.lower[j], inst.recourse.upper[j]);
    auto pad = [&](const Row& r) {
      Row out{r.coef, r.rel, r.rhs};
      out.coef.resize(n1 + n2, 0.0);
      return out;
    };
    for (const auto& r : inst.first.constraints) lp.rows.push_back(pad(r));
    for (const auto& r : cell) lp.rows.push_back(pad(r));
    // W y + T x (rel) h
    for (std::size_t i = 0; i < inst.m2(); ++i) {
      Row r;
      r.coef.assign(n1 + n2, 0.0);
      for (std::size_t j = 0; j < n1; ++j) r.coef[j] = s.T(i, j);
      for (std::size_t j = 0; j < n2; ++j) r.coef[n1 + j] = s.W(i, j);
      r.rel = inst.recourse.relations[i];
      r.rhs = s.h[i];
      lp.rows.push_back(std::move(r));
    }
    LpSolution sol = solve_lp(lp, cfg);
    if (sol.status == LpStatus::Infeasible) return kInf;
    if (sol.status == LpStatus::Unbounded) return -kInf;
    total += s.probability * sol.objective;
  }
  return total;
}

/// Scenario-wise maximum of the recourse over the box of technology-support variables.
inline double cell_upper_bound(const SpInstance& inst, std::size_t d, const RecourseConfig& cfg = {}) {
  if (inst.bounds.recourse_upper) return *inst.bounds.recourse_upper;
  std::vector<std::size_t> sup = detail::technology_support(inst);
  bool integer = inst.recourse.kind == StageKind::MixedInteger;
  if (sup.size() > 12) throw Error(Errc::UnboundedBound, "too many technology variables to enumerate; supply uOpt");
  for (std::size_t j : sup) {
    if (!std::isfinite(inst.first.lower[j]) || !std::isfinite(inst.first.upper[j]))
      throw Error(Errc::UnboundedBound, "first-stage variable " + inst.first.names[j] + " is unbounded; supply uOpt");
    if (integer && inst.first.domains[j] != Domain::Binary)
      throw Error(Errc::UnboundedBound, "integer recourse with non-binary technology variables; supply uOpt");
  }
  std::vector<double> x(inst.n1());
  for (std::size_t j = 0; j < inst.n1(); ++j)
    x[j] = detail::clamp_zero(inst.first.lower[j], inst.first.upper[j]);
  const auto& scen = inst.distributions[d].scenarios;
  std::vector<double> best(scen.size(), -kInf);
  for (std::uint32_t mask = 0; mask < (1u << sup.size()); ++mask) {
    for (std::size_t k = 0; k < sup.size(); ++k)
      x[sup[k]] = (mask >> k) & 1u ? inst.first.upper[sup[k]] : inst.first.lower[sup[k]];
    RecourseEvaluation ev = evaluate_recourse(inst, x, d, cfg);
    if (!ev.feasible)
      throw Error(Errc::UnboundedBound,
                  "recourse infeasible at a vertex of the first-stage box; supply uOpt or recourseUpper");
    for (std::size_t s = 0; s < scen.size(); ++s) best[s] = std::max(best[s], ev.scenarios[s].value);
  }
  double total = 0.0;
  for (std::size_t s = 0; s < scen.size(); ++s) total += scen[s].probability * best[s];
  return total;
}

/// Feasibility big-M for one scenario: an upper bound on the phase-one value over the box of X.
inline double feasibility_bound(const SpInstance& inst, const ScenarioData& s) {
  std::vector<double> y0(inst.n2());
  for (std::size_t j = 0; j < inst.n2(); ++j) y0[j] = detail::clamp_zero(inst.recourse.lower[j], inst.recourse.upper[j]);
  double total = 0.0;
  for (std::size_t i = 0; i < inst.m2(); ++i) {
    std::vector<double> neg(inst.n1());
    for (std::size_t j = 0; j < inst.n1(); ++j) neg[j] = -s.T(i, j);
    auto [lo, hi] = detail::form_range(neg, inst.first.lower, inst.first.upper);
    double shift = s.h[i] - dot(s.W.row(i), y0);
    lo += shift;
    hi += shift;
    if (!std::isfinite(lo) || !std::isfinite(hi))
      throw Error(Errc::UnboundedBound, "feasibility bound is infinite; supply uFeas");
    total += std::max(std::abs(lo), std::abs(hi));
  }
  return total;
}

inline BoundConstants compute_bounds(const SpInstance& inst, const RecourseConfig& cfg = {}) {
  BoundConstants b;
  const std::size_t D = inst.num_distributions();
  b.u_feas.resize(D);
  for (std::size_t d = 0; d < D; ++d) {
    for (const auto& s : inst.distributions[d].scenarios) {
      if (inst.bounds.u_feas) {
        b.u_feas[d].push_back(*inst.bounds.u_feas);
        b.u_feas_source = Provenance::UserSupplied;
      } else {
        b.u_feas[d].push_back(feasibility_bound(inst, s));
      }
    }
  }
  b.lower.resize(D);
  double min_lower = kInf;
  for (std::size_t d = 0; d < D; ++d) {
    b.lower[d] = cell_lower_bound(inst, d, cfg.lp);
    min_lower = std::min(min_lower, b.lower[d]);
  }
  if (inst.bounds.mu_lower) {
    b.mu_lower = *inst.bounds.mu_lower;
    b.mu_lower_source = Provenance::UserSupplied;
  } else {
    if (!std::isfinite(min_lower))
      throw Error(Errc::UnboundedBound, "recourse lower bound is not finite; supply muLower");
    b.mu_lower = min_lower;
  }
  if (inst.bounds.u_opt) {
    b.u_opt = *inst.bounds.u_opt;
    b.u_opt_source = Provenance::UserSupplied;
  } else {
    if (!std::isfinite(min_lower)) throw Error(Errc::UnboundedBound, "recourse lower bound is not finite; supply uOpt");
    double max_upper = -kInf;
    for (std::size_t d = 0; d < D; ++d) {
      if (b.lower[d] == kInf) {
        b.upper.push_back(-kInf);
        continue;
      }
      b.upper.push_back(cell_upper_bound(inst, d, cfg));
      max_upper = std::max(max_upper, b.upper.back());
    }
    b.u_opt = std::max(0.0, max_upper - min_lower);
  }
  return b;
}

}  // namespace ddsp
