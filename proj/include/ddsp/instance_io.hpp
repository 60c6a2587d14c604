#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ddsp/model.hpp"

namespace ddsp {

namespace io {

using Json = nlohmann::ordered_json;

/// 1-based line of the value addressed by a JSON pointer, or 0 when not found.
inline std::size_t locate_line(const std::string& text, const std::string& pointer) {
  std::vector<std::string> target;
  {
    std::size_t pos = 1;
    while (pos <= pointer.size() && !pointer.empty()) {
      std::size_t next = pointer.find('/', pos);
      if (next == std::string::npos) next = pointer.size();
      target.push_back(pointer.substr(pos, next - pos));
      pos = next + 1;
    }
  }
  struct Frame {
    bool array;
    std::size_t index;
    std::string key;
  };
  std::vector<Frame> stack;
  std::size_t line = 1;
  std::size_t i = 0;
  bool expect_key = false;
  auto matches = [&] {
    if (stack.size() != target.size()) return false;
    for (std::size_t k = 0; k < stack.size(); ++k) {
      std::string seg = stack[k].array ? std::to_string(stack[k].index) : stack[k].key;
      if (seg != target[k]) return false;
    }
    return true;
  };
  auto read_string = [&] {
    std::string s;
    ++i;
    while (i < text.size() && text[i] != '"') {
      if (text[i] == '\\' && i + 1 < text.size()) ++i;
      s += text[i++];
    }
    ++i;
    return s;
  };
  if (target.empty()) return 1;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c)) || c == ':') {
      ++i;
      continue;
    }
    if (c == ',') {
      if (!stack.empty()) {
        if (stack.back().array) ++stack.back().index;
        else expect_key = true;
      }
      ++i;
      continue;
    }
    if (c == '}' || c == ']') {
      if (!stack.empty()) stack.pop_back();
      // leaving a container ends the value that held it
      if (!stack.empty() && !stack.back().array) stack.back().key.clear();
      ++i;
      continue;
    }
    if (expect_key && c == '"') {
      stack.back().key = read_string();
      expect_key = false;
      continue;
    }
    // start of a value
    if (matches()) return line;
    if (c == '{') {
      stack.push_back(Frame{false, 0, {}});
      expect_key = true;
      ++i;
    } else if (c == '[') {
      stack.push_back(Frame{true, 0, {}});
      ++i;
    } else if (c == '"') {
      read_string();
    } else {
      while (i < text.size() && text[i] != ',' && text[i] != '}' && text[i] != ']' && text[i] != '\n') ++i;
    }
  }
  return 0;
}

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(Errc code, const std::string& pointer, const std::string& msg) const {
    std::size_t line = locate_line(text_, pointer);
    std::string where = line ? "line " + std::to_string(line) + ": " : "";
    throw Error(code, where + msg + " (at " + (pointer.empty() ? "/" : pointer) + ")");
  }

  const Json& member(const Json& obj, const std::string& ptr, const char* key) const {
    if (!obj.is_object()) fail(Errc::SchemaViolation, ptr, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(Errc::SchemaViolation, ptr, std::string("missing field '") + key + "'");
    return *it;
  }

  double number(const Json& v, const std::string& ptr) const {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      std::string s = v.get<std::string>();
      if (s == "inf" || s == "+inf") return kInf;
      if (s == "-inf") return -kInf;
    }
    fail(Errc::SchemaViolation, ptr, "expected a number");
  }

  std::vector<double> vector(const Json& v, const std::string& ptr) const {
    if (!v.is_array()) fail(Errc::SchemaViolation, ptr, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], ptr + "/" + std::to_string(i)));
    return out;
  }

  Matrix matrix(const Json& v, const std::string& ptr, std::size_t cols) const {
    if (!v.is_array()) fail(Errc::SchemaViolation, ptr, "expected an array of rows");
    Matrix m(v.size(), cols);
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::string p = ptr + "/" + std::to_string(i);
      std::vector<double> r = vector(v[i], p);
      if (r.size() != cols)
        fail(Errc::InconsistentDimensions, p, "row has " + std::to_string(r.size()) + " entries, expected " +
                                                  std::to_string(cols));
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = r[j];
    }
    return m;
  }

  std::string string(const Json& v, const std::string& ptr) const {
    if (!v.is_string()) fail(Errc::SchemaViolation, ptr, "expected a string");
    return v.get<std::string>();
  }

  Relation relation(const Json& v, const std::string& ptr) const {
    std::string s = string(v, ptr);
    if (s == "<=") return Relation::LessEqual;
    if (s == ">=") return Relation::GreaterEqual;
    if (s == "=") return Relation::Equal;
    fail(Errc::SchemaViolation, ptr, "relation must be one of <=, >=, =");
  }

  Domain domain(const Json& v, const std::string& ptr) const {
    std::string s = string(v, ptr);
    if (s == "continuous") return Domain::Continuous;
    if (s == "integer") return Domain::Integer;
    if (s == "binary") return Domain::Binary;
    fail(Errc::SchemaViolation, ptr, "domain must be continuous, integer or binary");
  }

  Interval interval(const Json& v, const std::string& ptr) const {
    std::vector<double> r = vector(v, ptr);
    if (r.size() != 2) fail(Errc::SchemaViolation, ptr, "interval must have two entries");
    if (r[0] > r[1]) fail(Errc::SchemaViolation, ptr, "interval lower end exceeds upper end");
    return Interval{r[0], r[1]};
  }

  std::vector<std::size_t> indices(const Json& v, const std::string& ptr) const {
    if (!v.is_array()) fail(Errc::SchemaViolation, ptr, "expected an array of indices");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_unsigned()) fail(Errc::SchemaViolation, ptr + "/" + std::to_string(i), "expected an index");
      out.push_back(v[i].get<std::size_t>());
    }
    return out;
  }

 private:
  const std::string& text_;
};

inline Json number_json(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

inline Json vector_json(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number_json(x));
  return a;
}

inline Json matrix_json(const Matrix& m) {
  Json a = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) a.push_back(vector_json(m.row(i)));
  return a;
}

inline std::string relation_json(Relation r) {
  switch (r) {
    case Relation::LessEqual: return "<=";
    case Relation::GreaterEqual: return ">=";
    case Relation::Equal: return "=";
  }
  return "=";
}

inline std::vector<double> negated(std::vector<double> v) {
  for (auto& x : v) x = -x;
  return v;
}

}  // namespace io

/// Parses an instance document. Costs in the document are in the native sense.
inline SpInstance parse_instance(const std::string& text) {
  using io::Json;
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    throw Error(Errc::ParseError, "line " + std::to_string(line) + ": " + e.what());
  }
  io::Reader rd(text);
  SpInstance inst;
  if (!doc.is_object()) rd.fail(Errc::SchemaViolation, "", "document must be an object");
  if (doc.contains("name")) inst.name = rd.string(doc["name"], "/name");
  std::string sense = rd.string(rd.member(doc, "", "sense"), "/sense");
  if (sense == "min") inst.sense = Sense::Minimize;
  else if (sense == "max") inst.sense = Sense::Maximize;
  else rd.fail(Errc::SchemaViolation, "/sense", "sense must be min or max");
  const double sgn = inst.sense == Sense::Maximize ? -1.0 : 1.0;

  // first stage
  const Json& fs = rd.member(doc, "", "firstStage");
  const Json& vars = rd.member(fs, "/firstStage", "variables");
  if (!vars.is_array() || vars.empty()) rd.fail(Errc::SchemaViolation, "/firstStage/variables", "expected a nonempty array");
  for (std::size_t j = 0; j < vars.size(); ++j) {
    std::string p = "/firstStage/variables/" + std::to_string(j);
    const Json& v = vars[j];
    inst.first.names.push_back(rd.string(rd.member(v, p, "name"), p + "/name"));
    inst.first.cost.push_back(sgn * rd.number(rd.member(v, p, "cost"), p + "/cost"));
    inst.first.domains.push_back(rd.domain(rd.member(v, p, "domain"), p + "/domain"));
    inst.first.lower.push_back(rd.number(rd.member(v, p, "lower"), p + "/lower"));
    inst.first.upper.push_back(rd.number(rd.member(v, p, "upper"), p + "/upper"));
  }
  const std::size_t n1 = inst.first.size();
  if (fs.contains("constraints")) {
    const Json& rows = fs["constraints"];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::string p = "/firstStage/constraints/" + std::to_string(i);
      Row r;
      r.coef = rd.vector(rd.member(rows[i], p, "coef"), p + "/coef");
      if (r.coef.size() != n1) rd.fail(Errc::InconsistentDimensions, p + "/coef", "row length differs from variable count");
      r.rel = rd.relation(rd.member(rows[i], p, "rel"), p + "/rel");
      r.rhs = rd.number(rd.member(rows[i], p, "rhs"), p + "/rhs");
      inst.first.constraints.push_back(std::move(r));
    }
  }

  // partition
  const Json& part = rd.member(doc, "", "partition");
  std::string kind = rd.string(rd.member(part, "/partition", "kind"), "/partition/kind");
  auto& P = inst.partition;
  auto forms = [&] {
    const Json& f = rd.member(part, "/partition", "forms");
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < f.size(); ++i) {
      std::string p = "/partition/forms/" + std::to_string(i);
      out.push_back(rd.vector(f[i], p));
      if (out.back().size() != n1) rd.fail(Errc::InconsistentDimensions, p, "form length differs from variable count");
    }
    return out;
  };
  auto choice = [&] {
    const Json& c = rd.member(part, "/partition", "choice");
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < c.size(); ++i) out.push_back(rd.indices(c[i], "/partition/choice/" + std::to_string(i)));
    return out;
  };
  if (kind == "explicit-delta") {
    P.kind = PartitionKind::ExplicitDelta;
    P.forms = forms();
    const Json& cells = rd.member(part, "/partition", "cells");
    for (std::size_t d = 0; d < cells.size(); ++d) {
      std::vector<Interval> row;
      for (std::size_t f = 0; f < cells[d].size(); ++f)
        row.push_back(rd.interval(cells[d][f], "/partition/cells/" + std::to_string(d) + "/" + std::to_string(f)));
      P.cells.push_back(std::move(row));
    }
  } else if (kind == "box-conditions") {
    P.kind = PartitionKind::BoxConditions;
    P.forms = forms();
    const Json& iv = rd.member(part, "/partition", "intervals");
    for (std::size_t i = 0; i < iv.size(); ++i) {
      std::vector<Interval> row;
      for (std::size_t j = 0; j < iv[i].size(); ++j)
        row.push_back(rd.interval(iv[i][j], "/partition/intervals/" + std::to_string(i) + "/" + std::to_string(j)));
      P.intervals.push_back(std::move(row));
    }
    P.choice = choice();
  } else if (kind == "binary-segments") {
    P.kind = PartitionKind::BinarySegments;
    const Json& segs = rd.member(part, "/partition", "segments");
    for (std::size_t t = 0; t < segs.size(); ++t) {
      std::string p = "/partition/segments/" + std::to_string(t);
      P.segments.push_back(rd.indices(rd.member(segs[t], p, "variables"), p + "/variables"));
      const Json& conds = rd.member(segs[t], p, "conditions");
      std::vector<Condition> list;
      for (std::size_t k = 0; k < conds.size(); ++k) {
        std::string q = p + "/conditions/" + std::to_string(k);
        Condition c;
        c.coef = rd.vector(rd.member(conds[k], q, "coef"), q + "/coef");
        c.range = rd.interval(rd.member(conds[k], q, "range"), q + "/range");
        list.push_back(std::move(c));
      }
      P.conditions.push_back(std::move(list));
    }
    P.choice = choice();
  } else {
    rd.fail(Errc::SchemaViolation, "/partition/kind", "unknown partition kind '" + kind + "'");
  }

  // second stage template
  const Json& tpl = rd.member(doc, "", "secondStageTemplate");
  std::string sk = rd.string(rd.member(tpl, "/secondStageTemplate", "kind"), "/secondStageTemplate/kind");
  if (sk == "linear") inst.recourse.kind = StageKind::Linear;
  else if (sk == "mixed-integer") inst.recourse.kind = StageKind::MixedInteger;
  else rd.fail(Errc::SchemaViolation, "/secondStageTemplate/kind", "kind must be linear or mixed-integer");
  const Json& yv = rd.member(tpl, "/secondStageTemplate", "variables");
  for (std::size_t j = 0; j < yv.size(); ++j) {
    std::string p = "/secondStageTemplate/variables/" + std::to_string(j);
    inst.recourse.names.push_back(rd.string(rd.member(yv[j], p, "name"), p + "/name"));
    inst.recourse.domains.push_back(rd.domain(rd.member(yv[j], p, "domain"), p + "/domain"));
    inst.recourse.lower.push_back(rd.number(rd.member(yv[j], p, "lower"), p + "/lower"));
    inst.recourse.upper.push_back(rd.number(rd.member(yv[j], p, "upper"), p + "/upper"));
  }
  const Json& rels = rd.member(tpl, "/secondStageTemplate", "relations");
  for (std::size_t i = 0; i < rels.size(); ++i)
    inst.recourse.relations.push_back(rd.relation(rels[i], "/secondStageTemplate/relations/" + std::to_string(i)));
  const std::size_t n2 = inst.n2(), m2 = inst.m2();

  ScenarioData base;
  auto read_fields = [&](const Json& obj, const std::string& p, ScenarioData& s) {
    if (obj.contains("q")) {
      s.q = rd.vector(obj["q"], p + "/q");
      if (s.q.size() != n2) rd.fail(Errc::InconsistentDimensions, p + "/q", "q length differs from variable count");
      for (auto& v : s.q) v *= sgn;
    }
    if (obj.contains("W")) {
      s.W = rd.matrix(obj["W"], p + "/W", n2);
      if (s.W.rows() != m2) rd.fail(Errc::InconsistentDimensions, p + "/W", "W row count differs from relations");
    }
    if (obj.contains("T")) {
      s.T = rd.matrix(obj["T"], p + "/T", n1);
      if (s.T.rows() != m2) rd.fail(Errc::InconsistentDimensions, p + "/T", "T row count differs from relations");
    }
    if (obj.contains("h")) {
      s.h = rd.vector(obj["h"], p + "/h");
      if (s.h.size() != m2) rd.fail(Errc::InconsistentDimensions, p + "/h", "h length differs from relations");
    }
    if (obj.contains("yUpper")) {
      s.y_upper = rd.vector(obj["yUpper"], p + "/yUpper");
      if (s.y_upper.size() != n2) rd.fail(Errc::InconsistentDimensions, p + "/yUpper", "yUpper length");
    }
  };
  read_fields(tpl, "/secondStageTemplate", base);

  const Json& dists = rd.member(doc, "", "distributions");
  if (!dists.is_array() || dists.empty()) rd.fail(Errc::SchemaViolation, "/distributions", "expected a nonempty array");
  for (std::size_t d = 0; d < dists.size(); ++d) {
    std::string p = "/distributions/" + std::to_string(d);
    Distribution dist;
    dist.id = rd.string(rd.member(dists[d], p, "id"), p + "/id");
    const Json& sc = rd.member(dists[d], p, "scenarios");
    if (!sc.is_array() || sc.empty()) rd.fail(Errc::SchemaViolation, p + "/scenarios", "expected a nonempty array");
    double total = 0.0;
    for (std::size_t s = 0; s < sc.size(); ++s) {
      std::string q = p + "/scenarios/" + std::to_string(s);
      ScenarioData data = base;
      data.probability = rd.number(rd.member(sc[s], q, "probability"), q + "/probability");
      if (!(data.probability > 0.0 && data.probability <= 1.0))
        rd.fail(Errc::SchemaViolation, q + "/probability", "probability must lie in (0,1]");
      read_fields(sc[s], q, data);
      if (data.q.size() != n2 || data.W.rows() != m2 || data.T.rows() != m2 || data.h.size() != m2)
        rd.fail(Errc::InconsistentDimensions, q, "scenario lacks q, W, T or h and the template does not supply it");
      total += data.probability;
      dist.scenarios.push_back(std::move(data));
    }
    if (std::abs(total - 1.0) > 1e-9)
      rd.fail(Errc::SchemaViolation, p + "/scenarios",
              "probabilities of distribution " + dist.id + " sum to " + std::to_string(total));
    inst.distributions.push_back(std::move(dist));
  }

  if (doc.contains("uncertainty")) {
    const Json& u = doc["uncertainty"];
    if (u.contains("convexInXi")) inst.uncertainty.convex_in_xi = u["convexInXi"].get<bool>();
    if (u.contains("monotone")) {
      const Json& m = u["monotone"];
      inst.uncertainty.monotone_declared = true;
      for (std::size_t i = 0; i < m["h"].size(); ++i) inst.uncertainty.monotone_h.push_back(m["h"][i].get<int>());
      for (std::size_t i = 0; i < m["T"].size(); ++i) {
        std::vector<int> row;
        for (const auto& v : m["T"][i]) row.push_back(v.get<int>());
        inst.uncertainty.monotone_T.push_back(std::move(row));
      }
    }
  }
  if (doc.contains("bounds")) {
    const Json& b = doc["bounds"];
    auto opt = [&](const char* key, std::optional<double>& out) {
      if (b.contains(key)) out = rd.number(b[key], std::string("/bounds/") + key);
    };
    opt("uOpt", inst.bounds.u_opt);
    opt("muLower", inst.bounds.mu_lower);
    opt("recourseUpper", inst.bounds.recourse_upper);
    opt("uFeas", inst.bounds.u_feas);
  }

  try {
    validate_instance(inst);
  } catch (const Error& e) {
    throw Error(e.code(), std::string("instance validation: ") + e.what());
  }
  return inst;
}

/// Serializes with a fixed field order; shared W/T/q/yUpper go to the template.
inline std::string dump_instance(const SpInstance& inst) {
  using io::Json;
  const double sgn = inst.sense == Sense::Maximize ? -1.0 : 1.0;
  auto native = [&](const std::vector<double>& v) { return sgn < 0 ? io::negated(v) : v; };
  Json doc;
  doc["format"] = "ddsp-instance";
  doc["version"] = 1;
  doc["name"] = inst.name;
  doc["sense"] = inst.sense == Sense::Maximize ? "max" : "min";

  Json vars = Json::array();
  for (std::size_t j = 0; j < inst.n1(); ++j) {
    Json v;
    v["name"] = inst.first.names[j];
    v["cost"] = io::number_json(sgn * inst.first.cost[j]);
    v["domain"] = std::string(to_string(inst.first.domains[j]));
    v["lower"] = io::number_json(inst.first.lower[j]);
    v["upper"] = io::number_json(inst.first.upper[j]);
    vars.push_back(v);
  }
  Json rows = Json::array();
  for (const auto& r : inst.first.constraints) {
    Json row;
    row["coef"] = io::vector_json(r.coef);
    row["rel"] = io::relation_json(r.rel);
    row["rhs"] = io::number_json(r.rhs);
    rows.push_back(row);
  }
  doc["firstStage"] = Json{{"variables", vars}, {"constraints", rows}};

  const auto& P = inst.partition;
  Json part;
  part["kind"] = std::string(to_string(P.kind));
  auto choice_json = [&] {
    Json c = Json::array();
    for (const auto& row : P.choice) c.push_back(row);
    return c;
  };
  auto interval_json = [](const Interval& iv) { return Json::array({io::number_json(iv.lo), io::number_json(iv.hi)}); };
  if (P.kind != PartitionKind::BinarySegments) {
    Json f = Json::array();
    for (const auto& form : P.forms) f.push_back(io::vector_json(form));
    part["forms"] = f;
  }
  if (P.kind == PartitionKind::ExplicitDelta) {
    Json cells = Json::array();
    for (const auto& c : P.cells) {
      Json row = Json::array();
      for (const auto& iv : c) row.push_back(interval_json(iv));
      cells.push_back(row);
    }
    part["cells"] = cells;
  } else if (P.kind == PartitionKind::BoxConditions) {
    Json iv = Json::array();
    for (const auto& list : P.intervals) {
      Json row = Json::array();
      for (const auto& i : list) row.push_back(interval_json(i));
      iv.push_back(row);
    }
    part["intervals"] = iv;
    part["choice"] = choice_json();
  } else {
    Json segs = Json::array();
    for (std::size_t t = 0; t < P.segments.size(); ++t) {
      Json conds = Json::array();
      for (const auto& c : P.conditions[t]) conds.push_back(Json{{"coef", io::vector_json(c.coef)}, {"range", interval_json(c.range)}});
      segs.push_back(Json{{"variables", P.segments[t]}, {"conditions", conds}});
    }
    part["segments"] = segs;
    part["choice"] = choice_json();
  }
  doc["partition"] = part;

  const ScenarioData& first = inst.distributions.front().scenarios.front();
  auto shared = [&](auto field) {
    for (const auto& d : inst.distributions)
      for (const auto& s : d.scenarios)
        if (!(field(s) == field(first))) return false;
    return true;
  };
  bool shared_q = shared([](const ScenarioData& s) { return s.q; });
  bool shared_W = shared([](const ScenarioData& s) { return s.W; });
  bool shared_T = shared([](const ScenarioData& s) { return s.T; });
  bool shared_h = shared([](const ScenarioData& s) { return s.h; });
  bool shared_y = shared([](const ScenarioData& s) { return s.y_upper; });

  Json tpl;
  tpl["kind"] = inst.recourse.kind == StageKind::Linear ? "linear" : "mixed-integer";
  Json yv = Json::array();
  for (std::size_t j = 0; j < inst.n2(); ++j) {
    Json v;
    v["name"] = inst.recourse.names[j];
    v["domain"] = std::string(to_string(inst.recourse.domains[j]));
    v["lower"] = io::number_json(inst.recourse.lower[j]);
    v["upper"] = io::number_json(inst.recourse.upper[j]);
    yv.push_back(v);
  }
  tpl["variables"] = yv;
  Json rels = Json::array();
  for (Relation r : inst.recourse.relations) rels.push_back(io::relation_json(r));
  tpl["relations"] = rels;
  if (shared_q) tpl["q"] = io::vector_json(native(first.q));
  if (shared_W) tpl["W"] = io::matrix_json(first.W);
  if (shared_T) tpl["T"] = io::matrix_json(first.T);
  if (shared_h) tpl["h"] = io::vector_json(first.h);
  if (shared_y && !first.y_upper.empty()) tpl["yUpper"] = io::vector_json(first.y_upper);
  doc["secondStageTemplate"] = tpl;

  Json dists = Json::array();
  for (const auto& d : inst.distributions) {
    Json sc = Json::array();
    for (const auto& s : d.scenarios) {
      Json o;
      o["probability"] = s.probability;
      if (!shared_q) o["q"] = io::vector_json(native(s.q));
      if (!shared_W) o["W"] = io::matrix_json(s.W);
      if (!shared_T) o["T"] = io::matrix_json(s.T);
      if (!shared_h) o["h"] = io::vector_json(s.h);
      if (!shared_y && !s.y_upper.empty()) o["yUpper"] = io::vector_json(s.y_upper);
      sc.push_back(o);
    }
    dists.push_back(Json{{"id", d.id}, {"scenarios", sc}});
  }
  doc["distributions"] = dists;

  const auto& u = inst.uncertainty;
  Json unc;
  unc["convexInXi"] = u.convex_in_xi;
  if (u.monotone_declared) unc["monotone"] = Json{{"h", u.monotone_h}, {"T", u.monotone_T}};
  doc["uncertainty"] = unc;

  Json b = Json::object();
  if (inst.bounds.u_opt) b["uOpt"] = io::number_json(*inst.bounds.u_opt);
  if (inst.bounds.mu_lower) b["muLower"] = io::number_json(*inst.bounds.mu_lower);
  if (inst.bounds.recourse_upper) b["recourseUpper"] = io::number_json(*inst.bounds.recourse_upper);
  if (inst.bounds.u_feas) b["uFeas"] = io::number_json(*inst.bounds.u_feas);
  doc["bounds"] = b;
  return doc.dump(2) + "\n";
}

inline SpInstance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

inline void save_instance(const SpInstance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::ParseError, "cannot write " + path);
  out << dump_instance(inst);
}

}  // namespace ddsp
