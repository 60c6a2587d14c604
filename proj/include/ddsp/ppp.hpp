#pragma once

#include <chrono>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ddsp/milp.hpp"
#include "ddsp/model.hpp"

namespace ddsp::ppp {

inline constexpr std::size_t kNoColumn = static_cast<std::size_t>(-1);

/// Production planning under level-dependent yields.
///  1: one market, sales at price P or salvage O.
///  2: several markets with per-unit transport cost H.
///  3: batch production and per-vehicle transport cost G with capacity K.
struct PppParams {
  int variant = 1;
  std::size_t facilities = 2;
  std::size_t levels = 2;
  std::size_t scenarios = 5;
  std::size_t locations = 5;  // variants 2 and 3
  std::size_t batches = 5;    // variant 3
  double vehicle_capacity = 40.0;
  std::uint64_t seed = 1;
  Interval unit_cost{60.0, 80.0};
  Interval price{125.0, 185.0};
  Interval salvage{15.0, 40.0};
  Interval distance{75.0, 300.0};
  double unit_rate = 0.10;
  double vehicle_rate = 1.55;
  Interval demand_mean{100.0, 200.0};  // per facility, split over locations
  double demand_cv = 0.2;
  double yield_mean = 0.8;
  double yield_sd = 0.18;  // divided by the 1-based level index
  Interval yield_range{0.25, 1.0};
  double capacity_factor = 1.5;
};

inline void validate(const PppParams& p) {
  auto bad = [](const std::string& m) { throw Error(Errc::InvalidParams, m); };
  if (p.variant < 1 || p.variant > 3) bad("variant must be 1, 2 or 3");
  if (p.facilities < 1) bad("at least one facility required");
  if (p.levels < 2) bad("at least two production levels required");
  if (p.scenarios < 1) bad("at least one scenario required");
  if (p.variant >= 2 && p.locations < 1) bad("at least one location required");
  if (p.variant == 3 && p.batches < 1) bad("at least one batch required");
  if (p.variant == 3 && !(p.vehicle_capacity > 0.0)) bad("vehicle capacity must be positive");
  if (!(p.salvage.hi < p.price.lo)) bad("salvage price must stay below the sales price");
  if (!(p.yield_range.lo > 0.0 && p.yield_range.hi <= 1.0 && p.yield_range.lo < p.yield_range.hi))
    bad("yield range must lie in (0,1]");
}

/// Realized data of one instance. Demand has one column per location (one for variant 1).
struct PppData {
  int variant = 1;
  std::size_t F = 0, L = 0, S = 0, Q = 1, B = 0;
  std::vector<double> cost;                     // C_f
  double price = 0.0, salvage = 0.0;            // P, O
  std::vector<std::vector<Interval>> level;     // [f][l]
  std::vector<std::vector<double>> unit_cost;   // H_fq
  std::vector<std::vector<double>> trip_cost;   // G_fq
  double vehicle_capacity = 0.0;                // K
  std::vector<std::vector<double>> batch;       // Q_bf as [f][b]
  std::vector<std::vector<std::size_t>> choice; // l(f, d) as [d][f]
  std::vector<std::vector<std::vector<double>>> yield;   // [d][s][f]
  std::vector<std::vector<std::vector<double>>> demand;  // [d][s][q]
  std::vector<std::vector<double>> probability;          // [d][s]

  std::size_t num_distributions() const { return choice.size(); }
  double capacity(std::size_t f) const { return level[f].back().hi; }
};

namespace detail {

inline double uniform(std::mt19937_64& rng, Interval r) {
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

/// Normal draw restricted to [lo, hi] by rejection.
inline double truncated_normal(std::mt19937_64& rng, double mean, double sd, double lo, double hi) {
  std::normal_distribution<double> n(mean, sd);
  for (int k = 0; k < 100000; ++k) {
    double v = n(rng);
    if (v >= lo && v <= hi) return v;
  }
  return std::clamp(mean, lo, hi);
}

inline double round_to(double v, double step) { return std::round(v / step) * step; }

}  // namespace detail

/// Deterministic in (params, seed).
inline PppData generate_data(const PppParams& p) {
  validate(p);
  std::mt19937_64 rng(p.seed);
  PppData g;
  g.variant = p.variant;
  g.F = p.facilities;
  g.L = p.levels;
  g.S = p.scenarios;
  g.Q = p.variant == 1 ? 1 : p.locations;
  g.B = p.variant == 3 ? p.batches : 0;
  g.price = detail::round_to(detail::uniform(rng, p.price), 0.01);
  g.salvage = detail::round_to(detail::uniform(rng, p.salvage), 0.01);
  for (std::size_t f = 0; f < g.F; ++f) g.cost.push_back(detail::round_to(detail::uniform(rng, p.unit_cost), 0.01));

  std::vector<double> mean(g.Q);
  double total_mean = 0.0;
  for (std::size_t q = 0; q < g.Q; ++q) {
    mean[q] = detail::round_to(detail::uniform(rng, p.demand_mean) * static_cast<double>(g.F) / g.Q, 0.01);
    total_mean += mean[q];
  }

  // contiguous bands over [0, capacity] separated by a unit gap
  double cap = std::ceil(p.capacity_factor * total_mean / (p.yield_mean * static_cast<double>(g.F)));
  double width = (cap - static_cast<double>(g.L - 1)) / static_cast<double>(g.L);
  g.level.assign(g.F, {});
  for (std::size_t f = 0; f < g.F; ++f)
    for (std::size_t l = 0; l < g.L; ++l) {
      double lo = static_cast<double>(l) * (width + 1.0);
      g.level[f].push_back(Interval{lo, lo + width});
    }

  g.unit_cost.assign(g.F, std::vector<double>(g.Q, 0.0));
  g.trip_cost.assign(g.F, std::vector<double>(g.Q, 0.0));
  if (g.variant >= 2)
    for (std::size_t f = 0; f < g.F; ++f)
      for (std::size_t q = 0; q < g.Q; ++q) {
        double miles = detail::round_to(detail::uniform(rng, p.distance), 1.0);
        g.unit_cost[f][q] = detail::round_to(p.unit_rate * miles, 0.01);
        g.trip_cost[f][q] = detail::round_to(p.vehicle_rate * miles, 0.01);
      }

  if (g.variant == 3) {
    g.vehicle_capacity = p.vehicle_capacity;
    g.batch.assign(g.F, {});
    // batch b lands in the band of level 1 + b mod (L - 1), so every positive level is reachable when B >= L - 1
    for (std::size_t f = 0; f < g.F; ++f)
      for (std::size_t b = 0; b < g.B; ++b) {
        const Interval& band = g.level[f][1 + b % (g.L - 1)];
        g.batch[f].push_back(detail::round_to(detail::uniform(rng, Interval{band.lo + 0.5, band.hi - 0.5}), 1.0));
      }
  }

  std::vector<std::size_t> radix(g.F, g.L);
  g.choice = mixed_radix_choice(radix);
  const std::size_t D = g.choice.size();
  g.yield.assign(D, {});
  g.demand.assign(D, {});
  g.probability.assign(D, std::vector<double>(g.S, 1.0 / static_cast<double>(g.S)));
  for (std::size_t d = 0; d < D; ++d)
    for (std::size_t s = 0; s < g.S; ++s) {
      std::vector<double> y(g.F), dem(g.Q);
      for (std::size_t f = 0; f < g.F; ++f) {
        double sd = p.yield_sd / static_cast<double>(g.choice[d][f] + 1);
        y[f] = detail::round_to(
            detail::truncated_normal(rng, p.yield_mean, sd, p.yield_range.lo, p.yield_range.hi), 1e-4);
      }
      for (std::size_t q = 0; q < g.Q; ++q)
        dem[q] = detail::round_to(detail::truncated_normal(rng, mean[q], p.demand_cv * mean[q], 0.0, kInf), 0.01);
      g.yield[d].push_back(std::move(y));
      g.demand[d].push_back(std::move(dem));
    }
  return g;
}

namespace detail {

inline std::string cell_id(const PppData& g, std::size_t d) {
  std::string id = "L";
  for (std::size_t f = 0; f < g.F; ++f) id += (f ? "-" : "") + std::to_string(g.choice[d][f] + 1);
  return id;
}

/// Level variables y_fl, their rows, and the segment partition over them.
/// `production[f]` gives the coefficients of facility f's production in x.
inline void add_levels(SpInstance& inst, const PppData& g, std::size_t y0,
                       const std::vector<std::vector<std::pair<std::size_t, double>>>& production) {
  auto& fs = inst.first;
  const std::size_t n1 = fs.size();
  auto& P = inst.partition;
  P.kind = PartitionKind::BinarySegments;
  for (std::size_t f = 0; f < g.F; ++f) {
    Row one{std::vector<double>(n1, 0.0), Relation::Equal, 1.0};
    Row lo{std::vector<double>(n1, 0.0), Relation::GreaterEqual, 0.0};
    Row hi{std::vector<double>(n1, 0.0), Relation::LessEqual, 0.0};
    std::vector<std::size_t> seg;
    std::vector<double> index_coef;
    for (std::size_t l = 0; l < g.L; ++l) {
      std::size_t j = y0 + f * g.L + l;
      seg.push_back(j);
      index_coef.push_back(static_cast<double>(l));
      one.coef[j] = 1.0;
      lo.coef[j] = -g.level[f][l].lo;
      hi.coef[j] = -g.level[f][l].hi;
    }
    for (auto [j, a] : production[f]) {
      lo.coef[j] += a;
      hi.coef[j] += a;
    }
    fs.constraints.push_back(one);
    fs.constraints.push_back(lo);
    fs.constraints.push_back(hi);
    P.segments.push_back(seg);
    std::vector<Condition> conds;
    for (std::size_t l = 0; l < g.L; ++l) {
      double v = static_cast<double>(l);
      conds.push_back(Condition{index_coef, Interval{v, v}});
    }
    P.conditions.push_back(std::move(conds));
  }
  P.choice = g.choice;
}

inline void add_variable(FirstStage& fs, std::string name, double cost, Domain dom, double lo, double hi) {
  fs.names.push_back(std::move(name));
  fs.cost.push_back(cost);
  fs.domains.push_back(dom);
  fs.lower.push_back(lo);
  fs.upper.push_back(hi);
  for (auto& r : fs.constraints) r.coef.push_back(0.0);
}

inline std::size_t add_recourse_variable(Recourse& rc, std::string name, Domain dom, double hi = kInf) {
  rc.names.push_back(std::move(name));
  rc.domains.push_back(dom);
  rc.lower.push_back(0.0);
  rc.upper.push_back(hi);
  return rc.names.size() - 1;
}

/// Shared recourse for all variants in minimization form:
///   sum_q w_fq + o_f - yield_f * production_f = 0   (f)
///   sum_f w_fq <= demand_q                          (q)
///   w_fq - K v_fq <= 0                              (f, q; variant 3)
/// Objective -(P - H_fq) w_fq - O o_f + G_fq v_fq. Variant 1 pools facilities into one w and one o.
inline void build_recourse(SpInstance& inst, const PppData& g,
                           const std::vector<std::vector<std::pair<std::size_t, double>>>& production) {
  auto& rc = inst.recourse;
  const std::size_t n1 = inst.n1();
  const bool pooled = g.variant == 1;
  const bool trucks = g.variant == 3;
  rc.kind = trucks ? StageKind::MixedInteger : StageKind::Linear;
  std::vector<std::vector<std::size_t>> w(g.F), v(g.F);
  std::vector<std::size_t> o(g.F);
  if (pooled) {
    std::size_t wj = add_recourse_variable(rc, "w", Domain::Continuous);
    std::size_t oj = add_recourse_variable(rc, "o", Domain::Continuous);
    for (std::size_t f = 0; f < g.F; ++f) {
      w[f] = {wj};
      o[f] = oj;
    }
  } else {
    for (std::size_t f = 0; f < g.F; ++f)
      for (std::size_t q = 0; q < g.Q; ++q)
        w[f].push_back(add_recourse_variable(rc, "w_" + std::to_string(f + 1) + "_" + std::to_string(q + 1),
                                             Domain::Continuous));
    for (std::size_t f = 0; f < g.F; ++f)
      o[f] = add_recourse_variable(rc, "o_" + std::to_string(f + 1), Domain::Continuous);
    if (trucks)
      for (std::size_t f = 0; f < g.F; ++f)
        for (std::size_t q = 0; q < g.Q; ++q)
          v[f].push_back(add_recourse_variable(rc, "v_" + std::to_string(f + 1) + "_" + std::to_string(q + 1),
                                               Domain::Integer, std::ceil(g.capacity(f) / g.vehicle_capacity)));
  }
  const std::size_t n2 = rc.num_vars();
  const std::size_t balance_rows = pooled ? 1 : g.F;
  const std::size_t m2 = balance_rows + g.Q + (trucks ? g.F * g.Q : 0);
  rc.relations.assign(balance_rows, Relation::Equal);
  rc.relations.resize(balance_rows + g.Q, Relation::LessEqual);
  rc.relations.resize(m2, Relation::LessEqual);

  Matrix W(m2, n2);
  std::vector<double> q(n2, 0.0);
  for (std::size_t f = 0; f < g.F; ++f) {
    std::size_t r = pooled ? 0 : f;
    for (std::size_t k = 0; k < w[f].size(); ++k) {
      W(r, w[f][k]) = 1.0;
      W(balance_rows + (pooled ? 0 : k), w[f][k]) = 1.0;
      q[w[f][k]] = -(g.price - (pooled ? 0.0 : g.unit_cost[f][k]));
    }
    W(r, o[f]) = 1.0;
    q[o[f]] = -g.salvage;
    if (trucks)
      for (std::size_t k = 0; k < g.Q; ++k) {
        std::size_t row = balance_rows + g.Q + f * g.Q + k;
        W(row, w[f][k]) = 1.0;
        W(row, v[f][k]) = -g.vehicle_capacity;
        q[v[f][k]] = g.trip_cost[f][k];
        q[w[f][k]] = -g.price;
      }
  }

  double max_output = 0.0;
  for (std::size_t f = 0; f < g.F; ++f) max_output += g.capacity(f);
  for (std::size_t d = 0; d < g.num_distributions(); ++d) {
    Distribution dist{cell_id(g, d), {}};
    for (std::size_t s = 0; s < g.S; ++s) {
      ScenarioData sc;
      sc.probability = g.probability[d][s];
      sc.q = q;
      sc.W = W;
      sc.T = Matrix(m2, n1);
      sc.h.assign(m2, 0.0);
      for (std::size_t f = 0; f < g.F; ++f)
        for (auto [j, a] : production[f]) sc.T(pooled ? 0 : f, j) -= g.yield[d][s][f] * a;
      for (std::size_t k = 0; k < g.Q; ++k) sc.h[balance_rows + k] = g.demand[d][s][k];
      // upper bounds on optimal recourse values, used by the linearizations
      sc.y_upper.assign(n2, 0.0);
      for (std::size_t f = 0; f < g.F; ++f) {
        for (std::size_t k = 0; k < w[f].size(); ++k) sc.y_upper[w[f][k]] = g.demand[d][s][pooled ? 0 : k];
        sc.y_upper[o[f]] = pooled ? max_output : g.capacity(f);
        if (trucks)
          for (std::size_t k = 0; k < g.Q; ++k) sc.y_upper[v[f][k]] = rc.upper[v[f][k]];
      }
      dist.scenarios.push_back(std::move(sc));
    }
    inst.distributions.push_back(std::move(dist));
  }

  // more demand lowers the cost, more yield (a more negative T entry) lowers it too
  auto& u = inst.uncertainty;
  u.convex_in_xi = true;
  u.monotone_declared = true;
  u.monotone_h.assign(m2, 0);
  for (std::size_t k = 0; k < g.Q; ++k) u.monotone_h[balance_rows + k] = -1;
  u.monotone_T.assign(m2, std::vector<int>(n1, 0));
  for (std::size_t f = 0; f < g.F; ++f)
    for (auto [j, a] : production[f]) u.monotone_T[pooled ? 0 : f][j] = a > 0.0 ? 1 : -1;
  // selling everything at salvage is always feasible, so every scenario value is at most 0
  inst.bounds.recourse_upper = 0.0;
}

}  // namespace detail

/// Continuous raw-material amounts x_f and level binaries y_fl; one pooled market.
inline SpInstance build_variant1(const PppData& g) {
  if (g.variant != 1) throw Error(Errc::InvalidParams, "data was generated for another variant");
  SpInstance inst;
  inst.name = "ppp-v1";
  inst.sense = Sense::Maximize;
  std::vector<std::vector<std::pair<std::size_t, double>>> production(g.F);
  for (std::size_t f = 0; f < g.F; ++f) {
    detail::add_variable(inst.first, "x_" + std::to_string(f + 1), g.cost[f], Domain::Continuous, 0.0, g.capacity(f));
    production[f] = {{f, 1.0}};
  }
  for (std::size_t f = 0; f < g.F; ++f)
    for (std::size_t l = 0; l < g.L; ++l)
      detail::add_variable(inst.first, "y_" + std::to_string(f + 1) + "_" + std::to_string(l + 1), 0.0, Domain::Binary,
                           0.0, 1.0);
  detail::add_levels(inst, g, g.F, production);
  detail::build_recourse(inst, g, production);
  validate_instance(inst);
  return inst;
}

/// As variant 1 with one market per location and per-unit transport costs.
inline SpInstance build_variant2(const PppData& g) {
  if (g.variant != 2) throw Error(Errc::InvalidParams, "data was generated for another variant");
  SpInstance inst;
  inst.name = "ppp-v2";
  inst.sense = Sense::Maximize;
  std::vector<std::vector<std::pair<std::size_t, double>>> production(g.F);
  for (std::size_t f = 0; f < g.F; ++f) {
    detail::add_variable(inst.first, "x_" + std::to_string(f + 1), g.cost[f], Domain::Continuous, 0.0, g.capacity(f));
    production[f] = {{f, 1.0}};
  }
  for (std::size_t f = 0; f < g.F; ++f)
    for (std::size_t l = 0; l < g.L; ++l)
      detail::add_variable(inst.first, "y_" + std::to_string(f + 1) + "_" + std::to_string(l + 1), 0.0, Domain::Binary,
                           0.0, 1.0);
  detail::add_levels(inst, g, g.F, production);
  detail::build_recourse(inst, g, production);
  validate_instance(inst);
  return inst;
}

/// Batch binaries x_fb, level binaries y_fl and integer vehicle counts in the recourse.
inline SpInstance build_variant3(const PppData& g) {
  if (g.variant != 3) throw Error(Errc::InvalidParams, "data was generated for another variant");
  for (std::size_t f = 0; f < g.F; ++f) {
    bool reachable = false;
    for (double size : g.batch[f])
      for (const Interval& band : g.level[f]) reachable = reachable || band.contains(size);
    if (!reachable)
      throw Error(Errc::InfeasibleBatchLevels,
                  "no batch size of facility " + std::to_string(f + 1) + " lies in any production level");
  }
  SpInstance inst;
  inst.name = "ppp-v3";
  inst.sense = Sense::Maximize;
  std::vector<std::vector<std::pair<std::size_t, double>>> production(g.F);
  for (std::size_t f = 0; f < g.F; ++f)
    for (std::size_t b = 0; b < g.B; ++b) {
      std::size_t j = inst.n1();
      detail::add_variable(inst.first, "x_" + std::to_string(f + 1) + "_" + std::to_string(b + 1),
                           g.cost[f] * g.batch[f][b], Domain::Binary, 0.0, 1.0);
      production[f].push_back({j, g.batch[f][b]});
    }
  const std::size_t y0 = inst.n1();
  for (std::size_t f = 0; f < g.F; ++f)
    for (std::size_t l = 0; l < g.L; ++l)
      detail::add_variable(inst.first, "y_" + std::to_string(f + 1) + "_" + std::to_string(l + 1), 0.0, Domain::Binary,
                           0.0, 1.0);
  // at most one batch per facility
  for (std::size_t f = 0; f < g.F; ++f) {
    Row r{std::vector<double>(inst.n1(), 0.0), Relation::LessEqual, 1.0};
    for (auto [j, a] : production[f]) r.coef[j] = 1.0;
    inst.first.constraints.push_back(std::move(r));
  }
  detail::add_levels(inst, g, y0, production);
  detail::build_recourse(inst, g, production);
  validate_instance(inst);
  return inst;
}

inline SpInstance build_instance(const PppData& g) {
  switch (g.variant) {
    case 1: return build_variant1(g);
    case 2: return build_variant2(g);
    default: return build_variant3(g);
  }
}

inline SpInstance generate_instance(const PppParams& p) {
  SpInstance inst = build_instance(generate_data(p));
  inst.name = "ppp-v" + std::to_string(p.variant) + "-F" + std::to_string(p.facilities) + "-L" +
              std::to_string(p.levels) + "-S" + std::to_string(p.scenarios) + "-seed" + std::to_string(p.seed);
  return inst;
}

/// Monolithic program: first stage, cell indicators delta_d, one recourse copy per (d, s) and
/// McCormick rows for tau = delta_d * y in the weighted recourse objective. Only the envelope side
/// that binds for the sign of the cost is stated, which leaves the optimum unchanged. Needs
/// nonnegative y with finite linearization bounds, and recourse that is feasible for every cell at
/// every x.
struct ExtensiveForm {
  MixedIntegerProgram mip;
  std::size_t n1 = 0;
  std::vector<std::size_t> delta;  // column of delta_d
};

inline ExtensiveForm build_extensive(const SpInstance& inst) {
  const std::size_t n1 = inst.n1(), n2 = inst.n2(), m2 = inst.m2(), D = inst.num_distributions();
  for (double l : inst.recourse.lower)
    if (l != 0.0) throw Error(Errc::UnboundedLinearizationBound, "linearization needs second-stage lower bounds of 0");
  for (const auto& d : inst.distributions)
    for (const auto& s : d.scenarios) {
      if (s.y_upper.size() != n2) throw Error(Errc::UnboundedLinearizationBound, "scenario of " + d.id + " lacks yUpper");
      for (double u : s.y_upper)
        if (!std::isfinite(u)) throw Error(Errc::UnboundedLinearizationBound, "infinite yUpper in " + d.id);
    }

  IndicatorEncoding enc = build_indicator_encoding(inst);
  ExtensiveForm ex;
  ex.n1 = n1;
  MixedIntegerProgram& mip = ex.mip;
  const bool explicit_delta = inst.partition.kind == PartitionKind::ExplicitDelta;
  std::size_t n_enc = enc.size();
  std::size_t n_delta = explicit_delta || D == 1 ? 0 : D;
  std::size_t total = n1 + n_enc + n_delta;
  for (std::size_t d = 0; d < D; ++d) total += 2 * n2 * inst.distributions[d].scenarios.size();

  // columns are laid out first, rows are appended as full-width vectors
  auto& lp = mip.lp;
  lp.objective.reserve(total);
  for (std::size_t j = 0; j < n1; ++j) mip.add_variable(inst.first.cost[j], inst.first.lower[j], inst.first.upper[j],
                                                        inst.first.domains[j]);
  for (std::size_t k = 0; k < n_enc; ++k) mip.add_variable(0.0, 0.0, 1.0, Domain::Binary);
  for (std::size_t d = 0; d < n_delta; ++d) mip.add_variable(0.0, 0.0, 1.0, Domain::Binary);
  for (std::size_t d = 0; d < D; ++d) {
    if (D == 1) ex.delta.push_back(kNoColumn);
    else ex.delta.push_back(explicit_delta ? n1 + enc.index[d][0] : n1 + n_enc + d);
  }
  struct Block {
    std::size_t y, tau;
  };
  std::vector<std::vector<Block>> blocks(D);
  for (std::size_t d = 0; d < D; ++d)
    for (const auto& s : inst.distributions[d].scenarios) {
      Block b{lp.num_vars(), 0};
      for (std::size_t j = 0; j < n2; ++j)
        mip.add_variable(0.0, inst.recourse.lower[j], inst.recourse.upper[j], inst.recourse.domains[j]);
      b.tau = lp.num_vars();
      for (std::size_t j = 0; j < n2; ++j) mip.add_variable(s.probability * s.q[j], 0.0, s.y_upper[j], Domain::Continuous);
      blocks[d].push_back(b);
    }
  const std::size_t width = lp.num_vars();
  auto row = [&] { return std::vector<double>(width, 0.0); };
  auto push = [&](std::vector<double> c, Relation rel, double rhs) { lp.rows.push_back(Row{std::move(c), rel, rhs}); };

  for (const auto& r : inst.first.constraints) {
    auto c = row();
    std::copy(r.coef.begin(), r.coef.end(), c.begin());
    push(std::move(c), r.rel, r.rhs);
  }
  for (const auto& r : enc.rows) {
    auto c = row();
    std::copy(r.coef.begin(), r.coef.end(), c.begin());
    push(std::move(c), r.rel, r.rhs);
  }
  if (n_delta > 0) {
    const auto& P = inst.partition;
    auto sum = row();
    for (std::size_t d = 0; d < D; ++d) {
      sum[ex.delta[d]] = 1.0;
      for (std::size_t g = 0; g < P.num_groups(); ++g) {
        auto c = row();
        c[ex.delta[d]] = 1.0;
        c[n1 + enc.index[g][P.choice[d][g]]] = -1.0;
        push(std::move(c), Relation::LessEqual, 0.0);
      }
    }
    push(std::move(sum), Relation::Equal, 1.0);
  }
  for (std::size_t d = 0; d < D; ++d) {
    const auto& scen = inst.distributions[d].scenarios;
    for (std::size_t s = 0; s < scen.size(); ++s) {
      const Block& b = blocks[d][s];
      for (std::size_t i = 0; i < m2; ++i) {
        auto c = row();
        for (std::size_t j = 0; j < n1; ++j) c[j] = scen[s].T(i, j);
        for (std::size_t j = 0; j < n2; ++j) c[b.y + j] = scen[s].W(i, j);
        push(std::move(c), inst.recourse.relations[i], scen[s].h[i]);
      }
      for (std::size_t j = 0; j < n2; ++j) {
        double Y = scen[s].y_upper[j];
        double q = scen[s].q[j];
        std::size_t dl = ex.delta[d];
        // tau only lowers the objective through its own term, so only the
        // bounds that hold it back in the improving direction are stated
        if (q < 0.0) {
          // tau <= y
          auto a = row();
          a[b.tau + j] = 1.0;
          a[b.y + j] = -1.0;
          push(std::move(a), Relation::LessEqual, 0.0);
          if (dl == kNoColumn) continue;
          // tau <= Y delta
          auto c = row();
          c[b.tau + j] = 1.0;
          c[dl] = -Y;
          push(std::move(c), Relation::LessEqual, 0.0);
        } else if (q > 0.0) {
          // tau >= y - Y (1 - delta), or tau >= y for a single cell
          auto e = row();
          e[b.tau + j] = 1.0;
          e[b.y + j] = -1.0;
          if (dl == kNoColumn) {
            push(std::move(e), Relation::GreaterEqual, 0.0);
            continue;
          }
          e[dl] = -Y;
          push(std::move(e), Relation::GreaterEqual, -Y);
        }
      }
    }
  }
  // branch on first-stage and indicator columns before recourse integers
  mip.priority.assign(width, 0);
  std::fill(mip.priority.begin(), mip.priority.begin() + static_cast<long>(n1 + n_enc + n_delta), 1);
  return ex;
}

/// Solves the extensive form with diving enabled.
inline MilpSolution solve_extensive(const ExtensiveForm& ex, MilpConfig cfg = {}) {
  cfg.dive_first = true;
  if (cfg.gomory_rounds == 0) cfg.gomory_rounds = 10;
  return solve_milp(ex.mip, {}, cfg);
}

struct OracleResult {
  double objective = kInf;  // minimization form
  std::vector<double> x;
  std::size_t d = 0;
  std::vector<std::optional<double>> per_cell;  // nullopt for empty cells
  bool timed_out = false;                        // cells after the limit are missing from per_cell
};

/// Best cell by solving each cell's deterministic equivalent exactly. cfg.time_limit covers all cells.
inline OracleResult enumeration_oracle(const SpInstance& inst, std::size_t cap = 256, MilpConfig cfg = {}) {
  const std::size_t D = inst.num_distributions();
  if (D > cap)
    throw Error(Errc::TooManyDistributions,
                std::to_string(D) + " distributions exceed the enumeration cap of " + std::to_string(cap));
  cfg.mip_gap = std::min(cfg.mip_gap, 1e-9);
  const std::size_t n1 = inst.n1(), n2 = inst.n2();
  const auto start = std::chrono::steady_clock::now();
  OracleResult best;
  for (std::size_t d = 0; d < D; ++d) {
    const auto& scen = inst.distributions[d].scenarios;
    MixedIntegerProgram mip;
    for (std::size_t j = 0; j < n1; ++j)
      mip.add_variable(inst.first.cost[j], inst.first.lower[j], inst.first.upper[j], inst.first.domains[j]);
    for (const auto& s : scen)
      for (std::size_t j = 0; j < n2; ++j)
        mip.add_variable(s.probability * s.q[j], inst.recourse.lower[j], inst.recourse.upper[j],
                         inst.recourse.domains[j]);
    const std::size_t width = mip.lp.num_vars();
    auto pad = [&](const Row& r) {
      Row o = r;
      o.coef.resize(width, 0.0);
      return o;
    };
    for (const auto& r : inst.first.constraints) mip.lp.rows.push_back(pad(r));
    for (const auto& r : cell_rows(inst, d)) mip.lp.rows.push_back(pad(r));
    for (std::size_t s = 0; s < scen.size(); ++s)
      for (std::size_t i = 0; i < inst.m2(); ++i) {
        Row r{std::vector<double>(width, 0.0), inst.recourse.relations[i], scen[s].h[i]};
        for (std::size_t j = 0; j < n1; ++j) r.coef[j] = scen[s].T(i, j);
        for (std::size_t j = 0; j < n2; ++j) r.coef[n1 + s * n2 + j] = scen[s].W(i, j);
        mip.lp.rows.push_back(std::move(r));
      }
    MilpConfig c = cfg;
    c.time_limit = cfg.time_limit - std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.dive_first = true;
    if (c.gomory_rounds == 0) c.gomory_rounds = 10;
    MilpSolution sol = solve_milp(mip, {}, c);
    if (sol.status == MilpStatus::Unbounded) throw Error(Errc::UnboundedBound, "cell " + inst.distributions[d].id + " is unbounded");
    if (sol.status == MilpStatus::TimeLimit || c.time_limit <= 0.0) {
      best.timed_out = true;
      return best;
    }
    if (sol.status != MilpStatus::Optimal) {
      best.per_cell.push_back(std::nullopt);
      continue;
    }
    best.per_cell.push_back(sol.objective);
    if (sol.objective < best.objective) {
      best.objective = sol.objective;
      best.x.assign(sol.incumbent.begin(), sol.incumbent.begin() + static_cast<long>(n1));
      best.d = d;
    }
  }
  if (!std::isfinite(best.objective)) throw Error(Errc::InfeasibleMaster, "no cell admits a feasible solution");
  return best;
}

}  // namespace ddsp::ppp
