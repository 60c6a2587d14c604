#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ddsp/model.hpp"

namespace ddsp {

enum class CutKind { ContFeas, ContOpt, IntFeas, IntOpt, DistInd };

inline std::string_view to_string(CutKind k) {
  switch (k) {
    case CutKind::ContFeas: return "ContFeas";
    case CutKind::ContOpt: return "ContOpt";
    case CutKind::IntFeas: return "IntFeas";
    case CutKind::IntOpt: return "IntOpt";
    case CutKind::DistInd: return "DistInd";
  }
  return "?";
}

/// x_coef'x + mu_coef*mu + bigm*activation(d)(v) >= rhs.
struct Cut {
  CutKind kind = CutKind::ContOpt;
  std::optional<std::size_t> d;
  std::vector<double> x_coef;
  double mu_coef = 0.0;
  double bigm = 0.0;
  double rhs = 0.0;

  std::size_t iteration = 0;
  std::vector<double> x_v;
  std::optional<std::size_t> scenario;
  /// Recourse value the cut reproduces at x_v (Q, or the relaxation value for relaxation cuts).
  double generating_value = 0.0;
  bool relaxation = false;
  std::string family;

  /// Bound the cut imposes on mu at (x, activation); for feasibility cuts the slack.
  double mu_bound(std::span<const double> x, double activation) const {
    return rhs - dot(x_coef, x) - bigm * activation;
  }
  double violation(std::span<const double> x, double mu, double activation) const {
    return rhs - dot(x_coef, x) - mu_coef * mu - bigm * activation;
  }
  bool is_optimality() const { return kind == CutKind::ContOpt || kind == CutKind::IntOpt || kind == CutKind::DistInd; }
};

/// Human-readable form, e.g. "mu >= 6.4 - x - 12.5 (1 - delta_d1)".
inline std::string describe(const Cut& c, const std::vector<std::string>& names, const std::string& activation) {
  std::ostringstream os;
  os.precision(10);
  auto term = [&](double a, const std::string& name, bool first) {
    if (a == 0.0) return;
    double m = std::abs(a);
    if (!first || a < 0) os << (a < 0 ? (first ? "-" : " - ") : " + ");
    if (m != 1.0) os << m << " ";
    os << name;
  };
  if (c.mu_coef != 0.0) {
    // mu >= rhs - x_coef'x - bigm*act
    os << "mu >= " << c.rhs;
    for (std::size_t j = 0; j < c.x_coef.size(); ++j) term(-c.x_coef[j], names[j], false);
    if (c.bigm != 0.0) os << " - " << c.bigm << " " << activation;
  } else {
    // -x_coef'x <= -rhs + bigm*act
    bool first = true;
    for (std::size_t j = 0; j < c.x_coef.size(); ++j) {
      if (c.x_coef[j] == 0.0) continue;
      term(-c.x_coef[j], names[j], first);
      first = false;
    }
    if (first) os << "0";
    os << " <= " << -c.rhs;
    if (c.bigm != 0.0) os << " + " << c.bigm << " " << activation;
  }
  return os.str();
}

namespace detail {

inline void check_binary(std::span<const double> x) {
  for (double v : x)
    if (std::abs(v) > 1e-6 && std::abs(v - 1.0) > 1e-6)
      throw Error(Errc::NonBinaryX, "integer-stage cut requires a binary first-stage point");
}

}  // namespace detail

/// sigma'(h - T x) + kappa <= U (activation of d), from the phase-one multipliers of scenario s.
inline Cut gen_feas_cut_continuous(const SpInstance& inst, std::span<const double> x_v, std::size_t d, std::size_t s,
                                   std::span<const double> sigma, double kappa, double u_feas,
                                   double feas_tol = kFeasTol) {
  const ScenarioData& sc = inst.distributions.at(d).scenarios.at(s);
  Cut c;
  c.kind = CutKind::ContFeas;
  c.d = d;
  c.x_coef.assign(inst.n1(), 0.0);
  for (std::size_t i = 0; i < inst.m2(); ++i)
    for (std::size_t j = 0; j < inst.n1(); ++j) c.x_coef[j] += sigma[i] * sc.T(i, j);
  c.rhs = dot(sigma, sc.h) + kappa;
  c.bigm = u_feas;
  c.x_v.assign(x_v.begin(), x_v.end());
  c.scenario = s;
  c.generating_value = c.violation(x_v, 0.0, 0.0);
  if (!(c.generating_value > feas_tol))
    throw Error(Errc::NotViolated, "feasibility cut is not violated at its generating point");
  return c;
}

/// mu >= sum_s pi_s (rho_s'(h_s - T_s x) + kappa_s) - U (activation of d).
inline Cut gen_opt_cut_continuous(const SpInstance& inst, std::span<const double> x_v, std::size_t d,
                                  const std::vector<std::vector<double>>& rho, std::span<const double> kappa,
                                  double u_opt, std::optional<double> mu_v = {}, double opt_tol = 1e-9) {
  const auto& scen = inst.distributions.at(d).scenarios;
  Cut c;
  c.kind = CutKind::ContOpt;
  c.d = d;
  c.mu_coef = 1.0;
  c.bigm = u_opt;
  c.x_coef.assign(inst.n1(), 0.0);
  for (std::size_t s = 0; s < scen.size(); ++s) {
    const auto& sc = scen[s];
    double p = sc.probability;
    for (std::size_t i = 0; i < inst.m2(); ++i) {
      if (rho[s][i] == 0.0) continue;
      for (std::size_t j = 0; j < inst.n1(); ++j) c.x_coef[j] += p * rho[s][i] * sc.T(i, j);
      c.rhs += p * rho[s][i] * sc.h[i];
    }
    c.rhs += p * kappa[s];
  }
  c.x_v.assign(x_v.begin(), x_v.end());
  c.generating_value = c.mu_bound(x_v, 0.0);
  if (mu_v && *mu_v >= c.generating_value - opt_tol)
    throw Error(Errc::NotViolated, "optimality cut is not violated at its generating point");
  return c;
}

/// sum_{i in I} x_i - sum_{i not in I} x_i <= |I| - 1.
inline Cut gen_feas_cut_integer(std::span<const double> x_v) {
  detail::check_binary(x_v);
  Cut c;
  c.kind = CutKind::IntFeas;
  c.x_coef.resize(x_v.size());
  double ones = 0.0;
  for (std::size_t j = 0; j < x_v.size(); ++j) {
    bool in = x_v[j] > 0.5;
    c.x_coef[j] = in ? -1.0 : 1.0;
    ones += in;
  }
  c.rhs = 1.0 - ones;
  c.x_v.assign(x_v.begin(), x_v.end());
  return c;
}

/// mu >= (Q - L)(sum_I x - sum_notI x) - (Q - L)(|I| - 1) + L - U (activation of d).
inline Cut gen_opt_cut_integer(std::span<const double> x_v, std::size_t d, double q_value, double lower, double u_opt,
                               double tol = 1e-9) {
  detail::check_binary(x_v);
  if (!std::isfinite(lower)) throw Error(Errc::BadBounds, "integer optimality cut needs a finite lower bound");
  if (q_value < lower - tol * (1.0 + std::abs(lower)))
    throw Error(Errc::BadBounds, "recourse value below its lower bound");
  double gap = q_value - lower;
  Cut c;
  c.kind = CutKind::IntOpt;
  c.d = d;
  c.mu_coef = 1.0;
  c.bigm = u_opt;
  c.x_coef.resize(x_v.size());
  double ones = 0.0;
  for (std::size_t j = 0; j < x_v.size(); ++j) {
    bool in = x_v[j] > 0.5;
    c.x_coef[j] = in ? -gap : gap;
    ones += in;
  }
  c.rhs = -gap * (ones - 1.0) + lower;
  c.x_v.assign(x_v.begin(), x_v.end());
  c.generating_value = q_value;
  return c;
}

/// mu >= alpha + g'(x - x_v), global.
inline Cut make_distind_cut(std::span<const double> x_v, double alpha, std::span<const double> g, std::string family) {
  Cut c;
  c.kind = CutKind::DistInd;
  c.mu_coef = 1.0;
  c.x_coef.resize(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) c.x_coef[j] = -g[j];
  c.rhs = alpha - dot(g, x_v);
  c.x_v.assign(x_v.begin(), x_v.end());
  c.generating_value = alpha;
  c.family = std::move(family);
  return c;
}

/// Master row over (x, encoding, mu).
inline Row cut_row(const Cut& c, const IndicatorEncoding& enc) {
  std::size_t n1 = enc.num_x, k = enc.size();
  Row r;
  r.coef.assign(n1 + k + 1, 0.0);
  std::copy(c.x_coef.begin(), c.x_coef.end(), r.coef.begin());
  r.coef[n1 + k] = c.mu_coef;
  r.rhs = c.rhs;
  r.rel = Relation::GreaterEqual;
  if (c.bigm != 0.0 && c.d) {
    const Affine& a = enc.activation[*c.d];
    r.rhs -= c.bigm * a.constant;
    for (auto [i, w] : a.terms) r.coef[n1 + i] += c.bigm * w;
  }
  return r;
}

/// Coefficient fingerprint used to detect regenerated cuts.
inline std::vector<long long> cut_key(const Cut& c) {
  std::vector<long long> key;
  auto q = [](double v) { return std::llround(v * 1e8); };
  key.push_back(static_cast<long long>(c.kind));
  key.push_back(c.d ? static_cast<long long>(*c.d) : -1);
  for (double v : c.x_coef) key.push_back(q(v));
  key.push_back(q(c.mu_coef));
  key.push_back(q(c.bigm));
  key.push_back(q(c.rhs));
  return key;
}

}  // namespace ddsp
