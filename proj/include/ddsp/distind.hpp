#pragma once

#include <optional>
#include <vector>

#include "ddsp/cuts.hpp"
#include "ddsp/recourse.hpp"

namespace ddsp {

enum class DistIndFamily { None, McCormick, Jensen, Envelope };

inline std::string_view to_string(DistIndFamily f) {
  switch (f) {
    case DistIndFamily::None: return "none";
    case DistIndFamily::McCormick: return "mccormick";
    case DistIndFamily::Jensen: return "jensen";
    case DistIndFamily::Envelope: return "envelope";
  }
  return "?";
}

inline DistIndFamily parse_distind_family(const std::string& s) {
  if (s == "none") return DistIndFamily::None;
  if (s == "mccormick") return DistIndFamily::McCormick;
  if (s == "jensen") return DistIndFamily::Jensen;
  if (s == "envelope") return DistIndFamily::Envelope;
  throw Error(Errc::InvalidParams, "unknown cut family '" + s + "'");
}

struct ValueAndSlope {
  double value = 0.0;
  std::vector<double> slope;  // subgradient in x
};

/// Value at x of the McCormick relaxation of delta_d * (recourse of one realization),
/// with delta_d tied to x through the relaxed indicator encoding.
inline std::optional<ValueAndSlope> mccormick_value(const SpInstance& inst, const IndicatorEncoding& enc,
                                                    std::size_t d, const ScenarioData& sc,
                                                    std::span<const double> y_upper, std::span<const double> x,
                                                    const LpConfig& cfg = {}) {
  const std::size_t n1 = inst.n1(), k = enc.size(), n2 = inst.n2(), m2 = inst.m2();
  const std::size_t xo = 0, vo = n1, dl = n1 + k, yo = dl + 1, to = yo + n2, width = to + n2;
  LinearProgram lp;
  for (std::size_t j = 0; j < n1; ++j) lp.add_variable(0.0, x[j], x[j]);
  for (std::size_t j = 0; j < k; ++j) lp.add_variable(0.0, 0.0, 1.0);
  double dlo = inst.num_distributions() == 1 ? 1.0 : 0.0;
  lp.add_variable(0.0, dlo, 1.0);
  for (std::size_t j = 0; j < n2; ++j) lp.add_variable(0.0, inst.recourse.lower[j], inst.recourse.upper[j]);
  for (std::size_t j = 0; j < n2; ++j) lp.add_variable(sc.q[j], 0.0, y_upper[j]);

  for (const auto& r : enc.rows) {
    Row row{r.coef, r.rel, r.rhs};
    row.coef.resize(width, 0.0);
    lp.rows.push_back(std::move(row));
  }
  auto blank = [&] { return std::vector<double>(width, 0.0); };
  if (k > 0) {
    const auto& P = inst.partition;
    if (P.kind == PartitionKind::ExplicitDelta) {
      auto c = blank();
      c[dl] = 1.0;
      c[vo + enc.index[d][0]] = -1.0;
      lp.add_row(c, Relation::Equal, 0.0);
    } else {
      auto lo = blank();
      lo[dl] = 1.0;
      for (std::size_t g = 0; g < P.num_groups(); ++g) {
        std::size_t v = vo + enc.index[g][P.choice[d][g]];
        auto c = blank();
        c[dl] = 1.0;
        c[v] = -1.0;
        lp.add_row(c, Relation::LessEqual, 0.0);
        lo[v] = -1.0;
      }
      lp.add_row(lo, Relation::GreaterEqual, 1.0 - static_cast<double>(P.num_groups()));
    }
  }
  for (std::size_t i = 0; i < m2; ++i) {
    auto c = blank();
    for (std::size_t j = 0; j < n1; ++j) c[xo + j] = sc.T(i, j);
    for (std::size_t j = 0; j < n2; ++j) c[yo + j] = sc.W(i, j);
    lp.add_row(c, inst.recourse.relations[i], sc.h[i]);
  }
  for (std::size_t j = 0; j < n2; ++j) {
    auto a = blank();
    a[to + j] = 1.0;
    a[yo + j] = -1.0;
    lp.add_row(a, Relation::LessEqual, 0.0);
    auto b = blank();
    b[to + j] = 1.0;
    b[dl] = -y_upper[j];
    lp.add_row(b, Relation::LessEqual, 0.0);
    auto c = blank();
    c[to + j] = 1.0;
    c[yo + j] = -1.0;
    c[dl] = -y_upper[j];
    lp.add_row(c, Relation::GreaterEqual, -y_upper[j]);
  }
  LpSolution sol = solve_lp(lp, cfg);
  if (sol.status != LpStatus::Optimal) return std::nullopt;
  ValueAndSlope out;
  out.value = sol.objective;
  out.slope.assign(sol.reduced_cost.begin(), sol.reduced_cost.begin() + n1);
  return out;
}

namespace detail {

inline void require_nonnegative_recourse(const SpInstance& inst) {
  for (double l : inst.recourse.lower)
    if (l < 0.0) throw Error(Errc::MissingY, "McCormick relaxation needs nonnegative second-stage variables");
}

inline void require_deterministic_qw(const SpInstance& inst, std::size_t d) {
  const auto& scen = inst.distributions[d].scenarios;
  for (const auto& s : scen)
    if (s.q != scen.front().q || !(s.W == scen.front().W))
      throw Error(Errc::ConvexityFlagMissing, "expectation cut needs deterministic q and W");
}

/// Probability-weighted mean of h and T for distribution d; q and W from the first scenario.
inline ScenarioData mean_realization(const SpInstance& inst, std::size_t d) {
  const auto& scen = inst.distributions[d].scenarios;
  ScenarioData m = scen.front();
  m.probability = 1.0;
  std::fill(m.h.begin(), m.h.end(), 0.0);
  m.T = Matrix(inst.m2(), inst.n1());
  for (const auto& s : scen) {
    for (std::size_t i = 0; i < inst.m2(); ++i) {
      m.h[i] += s.probability * s.h[i];
      for (std::size_t j = 0; j < inst.n1(); ++j) m.T(i, j) += s.probability * s.T(i, j);
    }
  }
  return m;
}

}  // namespace detail

/// mu >= sum_d sum_s pi_sd L^d(x_v, xi_sd) + g'(x - x_v).
inline std::optional<Cut> gen_distind_mccormick_cut(const SpInstance& inst, const IndicatorEncoding& enc,
                                                    std::span<const double> x_v, const LpConfig& cfg = {}) {
  detail::require_nonnegative_recourse(inst);
  double alpha = 0.0;
  std::vector<double> g(inst.n1(), 0.0);
  for (std::size_t d = 0; d < inst.num_distributions(); ++d) {
    for (const auto& s : inst.distributions[d].scenarios) {
      if (s.y_upper.empty()) throw Error(Errc::MissingY, "scenario of " + inst.distributions[d].id + " lacks yUpper");
      auto v = mccormick_value(inst, enc, d, s, s.y_upper, x_v, cfg);
      if (!v) return std::nullopt;
      alpha += s.probability * v->value;
      for (std::size_t j = 0; j < g.size(); ++j) g[j] += s.probability * v->slope[j];
    }
  }
  return make_distind_cut(x_v, alpha, g, "mccormick");
}

/// mu >= sum_d L^d(x_v, E_d[xi]) + g'(x - x_v), one relaxation per distribution.
inline std::optional<Cut> gen_distind_jensen_cut(const SpInstance& inst, const IndicatorEncoding& enc,
                                                 std::span<const double> x_v, const LpConfig& cfg = {}) {
  if (!inst.uncertainty.convex_in_xi) throw Error(Errc::ConvexityFlagMissing, "instance is not flagged convex in xi");
  detail::require_nonnegative_recourse(inst);
  double alpha = 0.0;
  std::vector<double> g(inst.n1(), 0.0);
  for (std::size_t d = 0; d < inst.num_distributions(); ++d) {
    detail::require_deterministic_qw(inst, d);
    ScenarioData m = detail::mean_realization(inst, d);
    std::vector<double> Y(inst.n2(), 0.0);
    for (const auto& s : inst.distributions[d].scenarios) {
      if (s.y_upper.empty()) throw Error(Errc::MissingY, "scenario of " + inst.distributions[d].id + " lacks yUpper");
      for (std::size_t j = 0; j < Y.size(); ++j) Y[j] = std::max(Y[j], s.y_upper[j]);
    }
    auto v = mccormick_value(inst, enc, d, m, Y, x_v, cfg);
    if (!v) return std::nullopt;
    alpha += v->value;
    for (std::size_t j = 0; j < g.size(); ++j) g[j] += v->slope[j];
  }
  return make_distind_cut(x_v, alpha, g, "jensen");
}

/// Componentwise envelope of the distribution means: for each component the
/// mean that gives the smallest recourse under the declared monotonicity.
inline ScenarioData envelope_realization(const SpInstance& inst) {
  const auto& u = inst.uncertainty;
  if (!u.monotone_declared || u.monotone_h.size() != inst.m2() || u.monotone_T.size() != inst.m2())
    throw Error(Errc::MonotonicityFlagMissing, "instance declares no monotonicity of the recourse");
  std::vector<ScenarioData> means;
  for (std::size_t d = 0; d < inst.num_distributions(); ++d) {
    detail::require_deterministic_qw(inst, d);
    means.push_back(detail::mean_realization(inst, d));
  }
  ScenarioData e = means.front();
  auto pick = [&](int dir, auto get, const std::string& what) {
    double lo = kInf, hi = -kInf;
    for (const auto& m : means) {
      lo = std::min(lo, get(m));
      hi = std::max(hi, get(m));
    }
    if (dir > 0) return lo;
    if (dir < 0) return hi;
    if (hi - lo > 1e-12) throw Error(Errc::MonotonicityFlagMissing, "no monotone direction declared for " + what);
    return lo;
  };
  for (std::size_t i = 0; i < inst.m2(); ++i) {
    e.h[i] = pick(u.monotone_h[i], [i](const ScenarioData& m) { return m.h[i]; }, "h[" + std::to_string(i) + "]");
    for (std::size_t j = 0; j < inst.n1(); ++j)
      e.T(i, j) = pick(u.monotone_T[i][j], [i, j](const ScenarioData& m) { return m.T(i, j); },
                       "T[" + std::to_string(i) + "][" + std::to_string(j) + "]");
  }
  return e;
}

/// mu >= rho'(h_hat - T_hat x) + kappa with the recourse (LP relaxation) duals at the envelope realization.
inline std::optional<Cut> gen_distind_envelope_cut(const SpInstance& inst, std::span<const double> x_v,
                                                   const LpConfig& cfg = {}) {
  if (!inst.uncertainty.convex_in_xi) throw Error(Errc::ConvexityFlagMissing, "instance is not flagged convex in xi");
  ScenarioData e = envelope_realization(inst);
  std::vector<double> rhs = scenario_rhs(e, x_v);
  LpSolution sol = solve_lp(recourse_lp(inst, e, rhs), cfg);
  if (sol.status != LpStatus::Optimal) return std::nullopt;
  std::vector<double> g(inst.n1(), 0.0);
  for (std::size_t i = 0; i < inst.m2(); ++i)
    for (std::size_t j = 0; j < inst.n1(); ++j) g[j] -= sol.dual[i] * e.T(i, j);
  return make_distind_cut(x_v, sol.objective, g, "envelope");
}

inline std::optional<Cut> gen_distind_cut(DistIndFamily f, const SpInstance& inst, const IndicatorEncoding& enc,
                                          std::span<const double> x_v, const LpConfig& cfg = {}) {
  switch (f) {
    case DistIndFamily::None: return std::nullopt;
    case DistIndFamily::McCormick: return gen_distind_mccormick_cut(inst, enc, x_v, cfg);
    case DistIndFamily::Jensen: return gen_distind_jensen_cut(inst, enc, x_v, cfg);
    case DistIndFamily::Envelope: return gen_distind_envelope_cut(inst, x_v, cfg);
  }
  return std::nullopt;
}

}  // namespace ddsp
