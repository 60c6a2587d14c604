#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ddsp/core.hpp"
#include "ddsp/milp.hpp"

namespace ddsp {

inline constexpr double kFeasTol = 1e-8;

struct Interval {
  double lo = -kInf;
  double hi = kInf;

  bool contains(double v, double tol = kFeasTol) const { return v >= lo - tol && v <= hi + tol; }
  bool operator==(const Interval&) const = default;
};

struct FirstStage {
  std::vector<std::string> names;
  std::vector<double> cost;  // minimization form
  std::vector<Domain> domains;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Row> constraints;

  std::size_t size() const { return cost.size(); }
};

enum class StageKind { Linear, MixedInteger };

/// Second-stage structure shared by all scenarios: W y (rel) h - T x.
struct Recourse {
  StageKind kind = StageKind::Linear;
  std::vector<std::string> names;
  std::vector<Relation> relations;
  std::vector<Domain> domains;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t num_vars() const { return domains.size(); }
  std::size_t num_rows() const { return relations.size(); }
};

struct ScenarioData {
  double probability = 0.0;
  std::vector<double> q;  // minimization form
  Matrix W;
  Matrix T;
  std::vector<double> h;
  /// Componentwise upper bound on second-stage variables (used by McCormick relaxations).
  std::vector<double> y_upper;
};

struct Distribution {
  std::string id;
  std::vector<ScenarioData> scenarios;
};

enum class PartitionKind { ExplicitDelta, BoxConditions, BinarySegments };

inline std::string_view to_string(PartitionKind k) {
  switch (k) {
    case PartitionKind::ExplicitDelta: return "explicit-delta";
    case PartitionKind::BoxConditions: return "box-conditions";
    case PartitionKind::BinarySegments: return "binary-segments";
  }
  return "?";
}

struct Condition {
  std::vector<double> coef;  // over the segment's variables
  Interval range;
  bool operator==(const Condition&) const = default;
};

/// Cells X_d of the first-stage region.
///  ExplicitDelta: cells[d][f] is the interval of forms[f] on cell d.
///  BoxConditions: intervals[i][j] on forms[i]; choice[d][i] = j(i,d).
///  BinarySegments: conditions[t][k] over variables segments[t]; choice[d][t] = k(t,d).
struct PartitionDescriptor {
  PartitionKind kind = PartitionKind::ExplicitDelta;
  std::vector<std::vector<double>> forms;
  std::vector<std::vector<Interval>> cells;
  std::vector<std::vector<Interval>> intervals;
  std::vector<std::vector<std::size_t>> segments;
  std::vector<std::vector<Condition>> conditions;
  std::vector<std::vector<std::size_t>> choice;

  std::size_t num_cells() const { return kind == PartitionKind::ExplicitDelta ? cells.size() : choice.size(); }
  std::size_t num_groups() const { return kind == PartitionKind::BoxConditions ? forms.size() : segments.size(); }
  std::size_t group_size(std::size_t g) const {
    return kind == PartitionKind::BoxConditions ? intervals[g].size() : conditions[g].size();
  }
};

/// Mixed-radix table d -> (choice per group); the first group is the most significant digit.
inline std::vector<std::vector<std::size_t>> mixed_radix_choice(const std::vector<std::size_t>& radix) {
  std::size_t total = 1;
  for (std::size_t r : radix) total *= r;
  std::vector<std::vector<std::size_t>> out(total, std::vector<std::size_t>(radix.size()));
  for (std::size_t d = 0; d < total; ++d) {
    std::size_t rem = d;
    for (std::size_t g = radix.size(); g-- > 0;) {
      out[d][g] = rem % radix[g];
      rem /= radix[g];
    }
  }
  return out;
}

/// Declared properties of the random data used by the distribution-independent cuts.
/// Monotone directions: +1 recourse nondecreasing in the component, -1 nonincreasing, 0 undeclared.
struct UncertaintyInfo {
  bool convex_in_xi = false;
  bool monotone_declared = false;
  std::vector<int> monotone_h;
  std::vector<std::vector<int>> monotone_T;
};

struct BoundHints {
  std::optional<double> u_opt;
  std::optional<double> mu_lower;
  /// Valid upper bound on every scenario recourse value over the first-stage box.
  std::optional<double> recourse_upper;
  std::optional<double> u_feas;
};

struct SpInstance {
  std::string name;
  /// Native sense of the overall objective; stored costs are always in minimization form.
  Sense sense = Sense::Minimize;
  FirstStage first;
  PartitionDescriptor partition;
  Recourse recourse;
  std::vector<Distribution> distributions;
  UncertaintyInfo uncertainty;
  BoundHints bounds;

  std::size_t n1() const { return first.size(); }
  std::size_t n2() const { return recourse.num_vars(); }
  std::size_t m2() const { return recourse.num_rows(); }
  std::size_t num_distributions() const { return distributions.size(); }
  std::size_t num_scenarios() const {
    std::size_t s = 0;
    for (const auto& d : distributions) s += d.scenarios.size();
    return s;
  }
  double native(double min_form_value) const { return sense == Sense::Maximize ? -min_form_value : min_form_value; }
};

namespace detail {

inline void require(bool ok, Errc code, const std::string& msg) {
  if (!ok) throw Error(code, msg);
}

inline std::pair<double, double> form_range(std::span<const double> coef, std::span<const double> lo,
                                            std::span<const double> hi) {
  double mn = 0.0, mx = 0.0;
  for (std::size_t j = 0; j < coef.size(); ++j) {
    double a = coef[j];
    if (a == 0.0) continue;
    if (a > 0) {
      mn += a * lo[j];
      mx += a * hi[j];
    } else {
      mn += a * hi[j];
      mx += a * lo[j];
    }
  }
  return {mn, mx};
}

inline bool intervals_overlap(const Interval& a, const Interval& b) { return !(a.hi < b.lo || b.hi < a.lo); }

inline std::vector<double> segment_form(const PartitionDescriptor& p, std::size_t t, std::size_t k, std::size_t n1) {
  std::vector<double> full(n1, 0.0);
  const auto& seg = p.segments[t];
  const auto& c = p.conditions[t][k];
  for (std::size_t e = 0; e < seg.size(); ++e) full[seg[e]] = c.coef[e];
  return full;
}

}  // namespace detail

/// Structural checks of the partition: dimensions, disjoint intervals, a
/// bijective choice table. Raises UnsupportedPartition on overlap.
inline void validate_partition(const PartitionDescriptor& p, const FirstStage& fs) {
  using detail::require;
  std::size_t n1 = fs.size();
  switch (p.kind) {
    case PartitionKind::ExplicitDelta: {
      require(!p.cells.empty(), Errc::SchemaViolation, "partition has no cells");
      for (const auto& f : p.forms) require(f.size() == n1, Errc::InconsistentDimensions, "partition form length");
      for (const auto& c : p.cells)
        require(c.size() == p.forms.size(), Errc::InconsistentDimensions, "cell interval count differs from form count");
      for (std::size_t a = 0; a < p.cells.size(); ++a)
        for (std::size_t b = a + 1; b < p.cells.size(); ++b) {
          bool separated = false;
          for (std::size_t f = 0; f < p.forms.size(); ++f)
            if (!detail::intervals_overlap(p.cells[a][f], p.cells[b][f])) separated = true;
          require(separated || p.cells.size() == 1, Errc::UnsupportedPartition,
                  "cells " + std::to_string(a) + " and " + std::to_string(b) + " overlap");
        }
      break;
    }
    case PartitionKind::BoxConditions: {
      require(p.forms.size() == p.intervals.size(), Errc::InconsistentDimensions, "one interval list per form required");
      for (const auto& f : p.forms) require(f.size() == n1, Errc::InconsistentDimensions, "partition form length");
      for (const auto& iv : p.intervals) {
        std::vector<Interval> sorted = iv;
        std::sort(sorted.begin(), sorted.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        for (std::size_t j = 0; j + 1 < sorted.size(); ++j)
          require(sorted[j].hi < sorted[j + 1].lo, Errc::UnsupportedPartition, "box intervals are not disjoint");
      }
      break;
    }
    case PartitionKind::BinarySegments: {
      require(p.segments.size() == p.conditions.size(), Errc::InconsistentDimensions,
              "one condition list per segment required");
      for (std::size_t t = 0; t < p.segments.size(); ++t) {
        const auto& seg = p.segments[t];
        for (std::size_t v : seg) require(v < n1, Errc::InconsistentDimensions, "segment variable out of range");
        for (const auto& c : p.conditions[t])
          require(c.coef.size() == seg.size(), Errc::InconsistentDimensions, "condition length differs from segment");
        bool binary = seg.size() <= 16;
        for (std::size_t v : seg) binary = binary && fs.domains[v] == Domain::Binary;
        if (!binary) continue;
        for (std::uint32_t mask = 0; mask < (1u << seg.size()); ++mask) {
          std::size_t hits = 0;
          for (const auto& c : p.conditions[t]) {
            double a = 0.0;
            for (std::size_t e = 0; e < seg.size(); ++e) a += c.coef[e] * ((mask >> e) & 1u);
            if (c.range.contains(a)) ++hits;
          }
          require(hits <= 1, Errc::UnsupportedPartition,
                  "conditions of segment " + std::to_string(t) + " overlap");
        }
      }
      break;
    }
  }
  if (p.kind != PartitionKind::ExplicitDelta) {
    std::size_t total = 1;
    for (std::size_t g = 0; g < p.num_groups(); ++g) total *= p.group_size(g);
    require(p.choice.size() == total, Errc::InconsistentDimensions,
            "choice table must list every combination exactly once");
    std::vector<std::vector<std::size_t>> sorted = p.choice;
    for (const auto& c : sorted) {
      require(c.size() == p.num_groups(), Errc::InconsistentDimensions, "choice row length");
      for (std::size_t g = 0; g < c.size(); ++g)
        require(c[g] < p.group_size(g), Errc::InconsistentDimensions, "choice index out of range");
    }
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), Errc::UnsupportedPartition,
            "two cells share the same condition combination");
  }
}

/// Full structural validation of an instance.
inline void validate_instance(const SpInstance& inst) {
  using detail::require;
  const auto& fs = inst.first;
  std::size_t n1 = fs.size();
  require(fs.domains.size() == n1 && fs.lower.size() == n1 && fs.upper.size() == n1, Errc::InconsistentDimensions,
          "first-stage vectors differ in length");
  for (std::size_t j = 0; j < n1; ++j) {
    require(fs.lower[j] <= fs.upper[j], Errc::SchemaViolation, "first-stage bounds empty");
    if (fs.domains[j] == Domain::Binary)
      require(fs.lower[j] >= 0.0 && fs.upper[j] <= 1.0, Errc::SchemaViolation, "binary bounds outside [0,1]");
  }
  for (const auto& r : fs.constraints)
    require(r.coef.size() == n1, Errc::InconsistentDimensions, "first-stage row length");
  const auto& rc = inst.recourse;
  std::size_t n2 = rc.num_vars(), m2 = rc.num_rows();
  require(rc.lower.size() == n2 && rc.upper.size() == n2, Errc::InconsistentDimensions, "recourse bound length");
  validate_partition(inst.partition, fs);
  require(inst.partition.num_cells() == inst.distributions.size(), Errc::InconsistentDimensions,
          "partition has " + std::to_string(inst.partition.num_cells()) + " cells but " +
              std::to_string(inst.distributions.size()) + " distributions are given");
  for (const auto& d : inst.distributions) {
    require(!d.scenarios.empty(), Errc::SchemaViolation, "distribution " + d.id + " has no scenarios");
    double total = 0.0;
    for (const auto& s : d.scenarios) {
      require(s.probability > 0.0 && s.probability <= 1.0, Errc::SchemaViolation,
              "scenario probability outside (0,1] in distribution " + d.id);
      require(s.q.size() == n2 && s.W.rows() == m2 && s.W.cols() == n2 && s.T.rows() == m2 && s.T.cols() == n1 &&
                  s.h.size() == m2,
              Errc::InconsistentDimensions, "scenario dimensions disagree in distribution " + d.id);
      require(s.y_upper.empty() || s.y_upper.size() == n2, Errc::InconsistentDimensions, "linearization bound length");
      total += s.probability;
    }
    require(std::abs(total - 1.0) <= 1e-9, Errc::SchemaViolation,
            "probabilities of distribution " + d.id + " sum to " + std::to_string(total));
  }
  const auto& u = inst.uncertainty;
  require(u.monotone_h.empty() || u.monotone_h.size() == m2, Errc::InconsistentDimensions, "monotone_h length");
  require(u.monotone_T.empty() || u.monotone_T.size() == m2, Errc::InconsistentDimensions, "monotone_T rows");
  for (const auto& r : u.monotone_T) require(r.size() == n1, Errc::InconsistentDimensions, "monotone_T cols");
}

/// Returns the index of the unique cell containing x.
inline std::size_t identify_distribution(const SpInstance& inst, std::span<const double> x, double tol = kFeasTol) {
  const auto& p = inst.partition;
  if (x.size() != inst.n1()) throw Error(Errc::InconsistentDimensions, "point has wrong dimension");
  std::size_t D = p.num_cells();
  if (D == 1) return 0;
  auto no_cell = [&](const std::string& why) { return Error(Errc::NoCell, why); };
  if (p.kind == PartitionKind::ExplicitDelta) {
    std::vector<double> val(p.forms.size());
    for (std::size_t f = 0; f < p.forms.size(); ++f) val[f] = dot(p.forms[f], x);
    std::optional<std::size_t> found;
    for (std::size_t d = 0; d < D; ++d) {
      bool in = true;
      for (std::size_t f = 0; f < p.forms.size() && in; ++f) in = p.cells[d][f].contains(val[f], tol);
      if (!in) continue;
      if (found) throw no_cell("point lies in more than one cell");
      found = d;
    }
    if (!found) throw no_cell("point lies in no cell");
    return *found;
  }
  std::vector<std::size_t> pick(p.num_groups());
  for (std::size_t g = 0; g < p.num_groups(); ++g) {
    std::optional<std::size_t> hit;
    for (std::size_t k = 0; k < p.group_size(g); ++k) {
      bool ok;
      if (p.kind == PartitionKind::BoxConditions) {
        ok = p.intervals[g][k].contains(dot(p.forms[g], x), tol);
      } else {
        const auto& seg = p.segments[g];
        const auto& c = p.conditions[g][k];
        double a = 0.0;
        for (std::size_t e = 0; e < seg.size(); ++e) a += c.coef[e] * x[seg[e]];
        ok = c.range.contains(a, tol);
      }
      if (!ok) continue;
      if (hit) throw no_cell("point satisfies two conditions of group " + std::to_string(g));
      hit = k;
    }
    if (!hit) throw no_cell("point satisfies no condition of group " + std::to_string(g));
    pick[g] = *hit;
  }
  for (std::size_t d = 0; d < D; ++d)
    if (p.choice[d] == pick) return d;
  throw no_cell("condition combination has no cell");
}

/// Linear expression over encoding variables (indices relative to the encoding block).
struct Affine {
  double constant = 0.0;
  std::vector<std::pair<std::size_t, double>> terms;

  double eval(std::span<const double> v) const {
    double s = constant;
    for (auto [i, a] : terms) s += a * v[i];
    return s;
  }
};

/// Binary indicator variables, linking rows over (x, encoding), and for each
/// d an activation expression that is 0 exactly on X_d and >= 1 elsewhere.
struct IndicatorEncoding {
  std::size_t num_x = 0;
  std::vector<std::string> names;
  std::vector<Row> rows;  // coefficient vectors of length num_x + names.size()
  std::vector<Affine> activation;
  /// Indicator index of (group, condition) for box/segment encodings, or of d for explicit deltas.
  std::vector<std::vector<std::size_t>> index;

  std::size_t size() const { return names.size(); }
};

inline IndicatorEncoding build_indicator_encoding(const SpInstance& inst) {
  const auto& p = inst.partition;
  const auto& fs = inst.first;
  std::size_t n1 = fs.size();
  std::size_t D = p.num_cells();
  IndicatorEncoding enc;
  enc.num_x = n1;
  enc.activation.assign(D, Affine{});
  if (D <= 1) return enc;
  validate_partition(p, fs);

  auto finite = [&](double v, double fallback, const char* what) {
    if (std::isfinite(v)) return v;
    if (!std::isfinite(fallback))
      throw Error(Errc::UnsupportedPartition, std::string("unbounded ") + what + " in partition encoding");
    return fallback;
  };

  if (p.kind == PartitionKind::ExplicitDelta) {
    for (std::size_t d = 0; d < D; ++d) {
      enc.names.push_back("delta_" + inst.distributions[d].id);
      enc.index.push_back({d});
      enc.activation[d] = Affine{1.0, {{d, -1.0}}};
    }
    std::size_t width = n1 + D;
    for (std::size_t f = 0; f < p.forms.size(); ++f) {
      const auto& form = p.forms[f];
      auto [fmin, fmax] = detail::form_range(form, fs.lower, fs.upper);
      Row lo_row, hi_row;
      lo_row.coef.assign(width, 0.0);
      hi_row.coef.assign(width, 0.0);
      std::copy(form.begin(), form.end(), lo_row.coef.begin());
      std::copy(form.begin(), form.end(), hi_row.coef.begin());
      bool need_lo = false, need_hi = false;
      for (std::size_t d = 0; d < D; ++d) {
        const Interval& iv = p.cells[d][f];
        double lo = finite(std::max(iv.lo, fmin), fmin, "lower endpoint");
        double hi = finite(std::min(iv.hi, fmax), fmax, "upper endpoint");
        lo_row.coef[n1 + d] = -lo;
        hi_row.coef[n1 + d] = -hi;
        need_lo = need_lo || iv.lo > fmin;
        need_hi = need_hi || iv.hi < fmax;
      }
      lo_row.rel = Relation::GreaterEqual;
      hi_row.rel = Relation::LessEqual;
      if (need_lo) enc.rows.push_back(lo_row);
      if (need_hi) enc.rows.push_back(hi_row);
    }
    Row sum;
    sum.coef.assign(width, 0.0);
    for (std::size_t d = 0; d < D; ++d) sum.coef[n1 + d] = 1.0;
    sum.rel = Relation::Equal;
    sum.rhs = 1.0;
    enc.rows.push_back(sum);
    return enc;
  }

  std::size_t G = p.num_groups();
  for (std::size_t g = 0; g < G; ++g) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < p.group_size(g); ++k) {
      idx.push_back(enc.names.size());
      enc.names.push_back("v_" + std::to_string(g + 1) + "_" + std::to_string(k + 1));
    }
    enc.index.push_back(idx);
  }
  std::size_t width = n1 + enc.names.size();
  for (std::size_t g = 0; g < G; ++g) {
    const auto& idx = enc.index[g];
    std::size_t K = idx.size();
    bool shared = p.kind == PartitionKind::BoxConditions;
    if (!shared) {
      shared = true;
      for (std::size_t k = 1; k < K; ++k) shared = shared && p.conditions[g][k].coef == p.conditions[g][0].coef;
    }
    auto form_of = [&](std::size_t k) {
      return p.kind == PartitionKind::BoxConditions ? p.forms[g] : detail::segment_form(p, g, k, n1);
    };
    auto range_of = [&](std::size_t k) {
      return p.kind == PartitionKind::BoxConditions ? p.intervals[g][k] : p.conditions[g][k].range;
    };
    if (shared) {
      std::vector<double> form = form_of(0);
      auto [fmin, fmax] = detail::form_range(form, fs.lower, fs.upper);
      Row lo_row, hi_row;
      lo_row.coef.assign(width, 0.0);
      hi_row.coef.assign(width, 0.0);
      std::copy(form.begin(), form.end(), lo_row.coef.begin());
      std::copy(form.begin(), form.end(), hi_row.coef.begin());
      bool need_lo = false, need_hi = false;
      for (std::size_t k = 0; k < K; ++k) {
        Interval iv = range_of(k);
        lo_row.coef[n1 + idx[k]] = -finite(std::max(iv.lo, fmin), fmin, "lower endpoint");
        hi_row.coef[n1 + idx[k]] = -finite(std::min(iv.hi, fmax), fmax, "upper endpoint");
        need_lo = need_lo || iv.lo > fmin;
        need_hi = need_hi || iv.hi < fmax;
      }
      lo_row.rel = Relation::GreaterEqual;
      hi_row.rel = Relation::LessEqual;
      if (need_lo) enc.rows.push_back(lo_row);
      if (need_hi) enc.rows.push_back(hi_row);
    } else {
      for (std::size_t k = 0; k < K; ++k) {
        std::vector<double> form = form_of(k);
        auto [fmin, fmax] = detail::form_range(form, fs.lower, fs.upper);
        Interval iv = range_of(k);
        if (iv.lo > fmin) {
          double fm = finite(fmin, kInf, "form minimum");
          Row r;
          r.coef.assign(width, 0.0);
          std::copy(form.begin(), form.end(), r.coef.begin());
          r.coef[n1 + idx[k]] = -(iv.lo - fm);
          r.rel = Relation::GreaterEqual;
          r.rhs = fm;
          enc.rows.push_back(std::move(r));
        }
        if (iv.hi < fmax) {
          double fM = finite(fmax, kInf, "form maximum");
          Row r;
          r.coef.assign(width, 0.0);
          std::copy(form.begin(), form.end(), r.coef.begin());
          r.coef[n1 + idx[k]] = fM - iv.hi;
          r.rel = Relation::LessEqual;
          r.rhs = fM;
          enc.rows.push_back(std::move(r));
        }
      }
    }
    Row sum;
    sum.coef.assign(width, 0.0);
    for (std::size_t k = 0; k < K; ++k) sum.coef[n1 + idx[k]] = 1.0;
    sum.rel = Relation::Equal;
    sum.rhs = 1.0;
    enc.rows.push_back(std::move(sum));
  }
  for (std::size_t d = 0; d < D; ++d) {
    Affine a;
    a.constant = static_cast<double>(G);
    for (std::size_t g = 0; g < G; ++g) a.terms.push_back({enc.index[g][p.choice[d][g]], -1.0});
    enc.activation[d] = a;
  }
  return enc;
}

/// Encoding variable values for a point lying in cell d.
inline std::vector<double> encoding_values(const SpInstance& inst, const IndicatorEncoding& enc, std::size_t d) {
  std::vector<double> v(enc.size(), 0.0);
  if (enc.size() == 0) return v;
  const auto& p = inst.partition;
  if (p.kind == PartitionKind::ExplicitDelta) {
    v[d] = 1.0;
  } else {
    for (std::size_t g = 0; g < p.num_groups(); ++g) v[enc.index[g][p.choice[d][g]]] = 1.0;
  }
  return v;
}

/// Linear rows over x describing X_d (conjunction of the cell's conditions).
inline std::vector<Row> cell_rows(const SpInstance& inst, std::size_t d) {
  const auto& p = inst.partition;
  std::size_t n1 = inst.n1();
  std::vector<Row> rows;
  if (p.num_cells() <= 1) return rows;
  auto push = [&](const std::vector<double>& form, const Interval& iv) {
    if (std::isfinite(iv.lo) && std::isfinite(iv.hi) && iv.lo == iv.hi) {
      rows.push_back(Row{form, Relation::Equal, iv.lo});
      return;
    }
    if (std::isfinite(iv.lo)) rows.push_back(Row{form, Relation::GreaterEqual, iv.lo});
    if (std::isfinite(iv.hi)) rows.push_back(Row{form, Relation::LessEqual, iv.hi});
  };
  switch (p.kind) {
    case PartitionKind::ExplicitDelta:
      for (std::size_t f = 0; f < p.forms.size(); ++f) push(p.forms[f], p.cells[d][f]);
      break;
    case PartitionKind::BoxConditions:
      for (std::size_t i = 0; i < p.forms.size(); ++i) push(p.forms[i], p.intervals[i][p.choice[d][i]]);
      break;
    case PartitionKind::BinarySegments:
      for (std::size_t t = 0; t < p.segments.size(); ++t) {
        std::size_t k = p.choice[d][t];
        push(detail::segment_form(p, t, k, n1), p.conditions[t][k].range);
      }
      break;
  }
  return rows;
}

/// First-stage feasible region as a MILP skeleton with zero objective.
inline MixedIntegerProgram first_stage_program(const SpInstance& inst) {
  MixedIntegerProgram mip;
  const auto& fs = inst.first;
  mip.lp.objective = fs.cost;
  mip.lp.lower = fs.lower;
  mip.lp.upper = fs.upper;
  mip.lp.rows = fs.constraints;
  mip.domains = fs.domains;
  return mip;
}

/// Confirms X is nonempty with one feasibility solve.
inline void check_first_stage_nonempty(const SpInstance& inst) {
  MixedIntegerProgram mip = first_stage_program(inst);
  std::fill(mip.lp.objective.begin(), mip.lp.objective.end(), 0.0);
  MilpSolution s = solve_milp(mip);
  if (s.status != MilpStatus::Optimal) throw Error(Errc::SchemaViolation, "first-stage region is empty");
}

inline bool first_stage_all_binary(const SpInstance& inst) {
  for (std::size_t j = 0; j < inst.n1(); ++j)
    if (inst.first.domains[j] != Domain::Binary) return false;
  return true;
}

}  // namespace ddsp
