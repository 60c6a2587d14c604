#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "ddsp/bundled.hpp"
#include "ddsp/instance_io.hpp"
#include "ddsp/lshaped.hpp"
#include "ddsp/ppp.hpp"

using namespace ddsp;

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kBadInput = 2,
  kTimeLimit = 3,
  kNumerical = 4,
  kCompareFail = 5,
  kGoldenMismatch = 6,
};

int exit_code(const Error& e) {
  switch (e.code()) {
    case Errc::NumericalFailure: return kNumerical;
    case Errc::MalformedProgram:
    case Errc::UnsupportedPartition:
    case Errc::ParseError:
    case Errc::SchemaViolation:
    case Errc::InconsistentDimensions:
    case Errc::ConvexityFlagMissing:
    case Errc::MonotonicityFlagMissing:
    case Errc::InfeasibleBatchLevels:
    case Errc::UnboundedLinearizationBound:
    case Errc::TooManyDistributions:
    case Errc::InvalidParams: return kBadInput;
    default: return kFailure;
  }
}

std::string num(double v) {
  if (std::isnan(v)) return "";
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v == 0.0 ? 0.0 : v);
  return buf;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RunConfig {
  std::string method = "ls-loop";
  double gap_tol = 1e-4;
  double time_limit = 1800.0;
  std::string distind = "none";
  std::optional<double> u_opt;
  std::optional<double> mu_lower;
  std::uint64_t seed = 1;
  std::size_t oracle_cap = 256;
  bool timing = true;
};

const std::vector<std::string> kMethods{"ls-loop", "ls-callback", "extensive", "oracle"};

struct Outcome {
  std::string method;
  std::string status;  // Optimal, TimeLimit, Stalled, Infeasible, SKIPPED
  double objective = kNaN;  // native sense
  double primal = kNaN, dual = kNaN;
  std::vector<double> x;
  std::string cell;
  double wall_ms = 0.0;
  std::size_t iterations = 0;
  std::size_t feasibility_cuts = 0, optimality_cuts = 0, distind_cuts = 0;
};

void validate(const RunConfig& c) {
  if (!(c.gap_tol > 0.0)) throw Error(Errc::InvalidParams, "gap tolerance must be positive");
  if (!(c.time_limit > 0.0)) throw Error(Errc::InvalidParams, "time limit must be positive");
  if (std::find(kMethods.begin(), kMethods.end(), c.method) == kMethods.end())
    throw Error(Errc::InvalidParams, "unknown method " + c.method);
  parse_distind_family(c.distind);
}

void apply_overrides(SpInstance& inst, const RunConfig& c) {
  if (c.u_opt) inst.bounds.u_opt = *c.u_opt;
  if (c.mu_lower) inst.bounds.mu_lower = *c.mu_lower;
}

Outcome solve_with(const SpInstance& inst, const RunConfig& cfg, std::ostream* log) {
  Outcome out;
  out.method = cfg.method;
  const auto start = std::chrono::steady_clock::now();
  auto native = [&](double v) { return std::isnan(v) ? kNaN : inst.native(v); };
  if (cfg.method == "ls-loop" || cfg.method == "ls-callback") {
    EngineConfig e;
    e.mode = cfg.method == "ls-loop" ? Mode::Loop : Mode::Callback;
    e.gap_tol = cfg.gap_tol;
    e.time_limit = cfg.time_limit;
    e.distind = parse_distind_family(cfg.distind);
    RunResult r = run(inst, e);
    out.status = std::string(to_string(r.status));
    if (!r.x.empty()) out.objective = native(r.objective);
    out.primal = native(r.upper_bound);
    out.dual = native(r.lower_bound);
    out.x = r.x;
    if (!r.x.empty()) out.cell = inst.distributions[r.d].id;
    out.iterations = r.iterations.size();
    out.feasibility_cuts = r.count(CutKind::ContFeas) + r.count(CutKind::IntFeas);
    out.optimality_cuts = r.optimality_cuts();
    out.distind_cuts = r.count(CutKind::DistInd);
    if (log) {
      write_iteration_header(*log);
      for (const auto& it : r.iterations) write_iteration_row(*log, inst, it, cfg.timing);
    }
  } else if (cfg.method == "extensive") {
    if (inst.num_distributions() > cfg.oracle_cap) {
      out.status = "SKIPPED";
      return out;
    }
    auto ex = ppp::build_extensive(inst);
    MilpConfig mc;
    // tighter than the run tolerance so the value can serve as a cross-check
    mc.mip_gap = cfg.gap_tol * 1e-2;
    mc.time_limit = cfg.time_limit;
    MilpSolution s = ppp::solve_extensive(ex, mc);
    out.status = std::string(to_string(s.status));
    if (!s.incumbent.empty()) {
      out.objective = native(s.objective);
      out.primal = out.objective;
      out.x.assign(s.incumbent.begin(), s.incumbent.begin() + static_cast<long>(inst.n1()));
      out.cell = inst.distributions[identify_distribution(inst, out.x, 1e-6)].id;
    }
    out.dual = native(s.status == MilpStatus::Optimal && !std::isfinite(s.bound) ? s.objective : s.bound);
    out.iterations = s.node_count;
  } else {
    if (inst.num_distributions() > cfg.oracle_cap) {
      out.status = "SKIPPED";
      return out;
    }
    MilpConfig mc;
    mc.time_limit = cfg.time_limit;
    auto o = ppp::enumeration_oracle(inst, cfg.oracle_cap, mc);
    out.status = o.timed_out ? "TimeLimit" : "Optimal";
    if (!o.x.empty()) out.objective = native(o.objective);
    out.primal = out.objective;
    if (!o.timed_out) out.dual = out.objective;
    out.x = o.x;
    if (!o.x.empty()) out.cell = inst.distributions[o.d].id;
    out.iterations = inst.num_distributions();
  }
  out.wall_ms = cfg.timing ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count()
                           : 0.0;
  return out;
}

/// 100 |primal - dual| / |dual|.
double percent_gap(double primal, double dual) {
  if (std::isnan(primal) || std::isnan(dual)) return kNaN;
  if (dual == 0.0) return primal == 0.0 ? 0.0 : kInf;
  return 100.0 * std::abs(primal - dual) / std::abs(dual);
}

std::string join_x(const SpInstance& inst, const std::vector<double>& x) {
  std::string s;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (j) s += ' ';
    s += inst.first.names[j] + "=" + num(x[j]);
  }
  return s;
}

// ---- generate ----

int cmd_generate(const ppp::PppParams& p, const std::string& out_path) {
  SpInstance inst = ppp::generate_instance(p);
  save_instance(inst, out_path);
  std::cout << "instance " << inst.name << "\n";
  std::cout << "stage2 " << (inst.recourse.kind == StageKind::MixedInteger ? "MixedInteger" : "Linear") << "\n";
  std::cout << "distributions " << inst.num_distributions() << "\n";
  std::cout << "scenarios " << inst.num_scenarios() << "\n";
  return kOk;
}

// ---- solve ----

int cmd_solve(const std::string& path, const RunConfig& cfg, const std::string& log_path, const std::string& out_path) {
  validate(cfg);
  SpInstance inst = load_instance(path);
  apply_overrides(inst, cfg);
  std::ofstream log_file;
  if (!log_path.empty()) {
    log_file.open(log_path);
    if (!log_file) throw Error(Errc::InvalidParams, "cannot write " + log_path);
  }
  Outcome o = solve_with(inst, cfg, log_path.empty() ? nullptr : &log_file);
  double gap = percent_gap(o.primal, o.dual);
  std::cout << "instance " << inst.name << "\n"
            << "method " << o.method << "\n"
            << "status " << o.status << "\n"
            << "objective " << num(o.objective) << "\n"
            << "x " << join_x(inst, o.x) << "\n"
            << "distribution " << o.cell << "\n"
            << "primal_bound " << num(o.primal) << "\n"
            << "dual_bound " << num(o.dual) << "\n"
            << "gap_pct " << num(gap) << "\n"
            << "iterations " << o.iterations << "\n"
            << "cuts feasibility=" << o.feasibility_cuts << " optimality=" << o.optimality_cuts
            << " distind=" << o.distind_cuts << "\n"
            << "wall_ms " << num(o.wall_ms) << "\n";
  if (!out_path.empty()) {
    nlohmann::ordered_json j;
    j["instance"] = inst.name;
    j["method"] = o.method;
    j["status"] = o.status;
    j["objective"] = num(o.objective);
    j["x"] = o.x;
    j["distribution"] = o.cell;
    j["primalBound"] = num(o.primal);
    j["dualBound"] = num(o.dual);
    j["gapPct"] = num(gap);
    j["iterations"] = o.iterations;
    j["cuts"] = {{"feasibility", o.feasibility_cuts}, {"optimality", o.optimality_cuts}, {"distind", o.distind_cuts}};
    j["wallMs"] = o.wall_ms;
    std::ofstream f(out_path);
    if (!f) throw Error(Errc::InvalidParams, "cannot write " + out_path);
    f << j.dump(2) << "\n";
  }
  if (o.status == "TimeLimit") return kTimeLimit;
  if (o.status == "Stalled") return kNumerical;
  if (o.status != "Optimal") return kFailure;
  return kOk;
}

// ---- compare ----

struct ManifestRow {
  std::string id;
  ppp::PppParams params;
  std::size_t distributions = 0;
};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) {
    while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.back()))) cell.pop_back();
    std::size_t b = 0;
    while (b < cell.size() && std::isspace(static_cast<unsigned char>(cell[b]))) ++b;
    out.push_back(cell.substr(b));
  }
  return out;
}

/// Columns: id,variant,facilities,levels,scenarios,locations,batches,distributions,seed. Lines
/// starting with '#' are comments.
std::vector<ManifestRow> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot read " + path);
  const std::vector<std::string> expected{"id",      "variant", "facilities",    "levels", "scenarios",
                                          "locations", "batches", "distributions", "seed"};
  std::vector<ManifestRow> rows;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto cells = split(line, ',');
    if (!header) {
      if (cells != expected) throw Error(Errc::ParseError, path + ":" + std::to_string(lineno) + ": unexpected header");
      header = true;
      continue;
    }
    if (cells.size() != expected.size())
      throw Error(Errc::ParseError, path + ":" + std::to_string(lineno) + ": expected 9 columns");
    try {
      ManifestRow r;
      r.id = cells[0];
      r.params.variant = std::stoi(cells[1]);
      r.params.facilities = std::stoul(cells[2]);
      r.params.levels = std::stoul(cells[3]);
      r.params.scenarios = std::stoul(cells[4]);
      r.params.locations = std::stoul(cells[5]);
      r.params.batches = std::stoul(cells[6]);
      r.distributions = std::stoul(cells[7]);
      r.params.seed = std::stoull(cells[8]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw Error(Errc::ParseError, path + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  if (!header) throw Error(Errc::ParseError, path + ": missing header");
  return rows;
}

double relative_difference(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

int cmd_compare(const std::string& manifest, const std::vector<std::string>& methods, RunConfig cfg,
                const std::string& out_path, std::size_t jobs) {
  for (const auto& m : methods) {
    cfg.method = m;
    validate(cfg);
  }
  auto rows = read_manifest(manifest);
  std::vector<std::vector<Outcome>> results(rows.size());
  std::vector<std::string> errors(rows.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      try {
        SpInstance inst = ppp::generate_instance(rows[i].params);
        if (inst.num_distributions() != rows[i].distributions)
          throw Error(Errc::InvalidParams, "manifest distribution count " + std::to_string(rows[i].distributions) +
                                               " differs from generated " + std::to_string(inst.num_distributions()));
        apply_overrides(inst, cfg);
        for (const auto& m : methods) {
          RunConfig c = cfg;
          c.method = m;
          results[i].push_back(solve_with(inst, c, nullptr));
        }
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::max<std::size_t>(jobs, 1); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw Error(Errc::InvalidParams, "cannot write " + out_path);
  }
  std::ostream& os = out_path.empty() ? std::cout : file;
  os << "# ddsp-compare v1 (objective and bounds in the instance's native sense; gap_pct = 100|primal-dual|/|dual|)\n";
  os << "kind,id,method,status,objective,primal,dual,gap_pct,wall_ms,solved_pct,check\n";

  struct Aggregate {
    std::size_t count = 0, solved = 0, gap_count = 0;
    double objective = 0.0, wall = 0.0, gap = 0.0;
  };
  std::vector<Aggregate> agg(methods.size());
  bool any_fail = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!errors[i].empty()) {
      any_fail = true;
      os << "instance," << rows[i].id << ",,ERROR,,,,,,,FAIL\n";
      std::cerr << rows[i].id << ": " << errors[i] << "\n";
      continue;
    }
    std::optional<double> reference;
    for (const auto& o : results[i])
      if (o.status == "Optimal" && !reference) reference = o.objective;
    for (std::size_t k = 0; k < methods.size(); ++k) {
      const Outcome& o = results[i][k];
      std::string check = "OK";
      if (o.status == "SKIPPED") check = "SKIPPED";
      else if (o.status != "Optimal") check = "LIMIT";
      else if (relative_difference(o.objective, *reference) > 1e-4) check = "FAIL";
      any_fail = any_fail || check == "FAIL";
      double gap = percent_gap(o.primal, o.dual);
      os << "instance," << rows[i].id << ',' << o.method << ',' << o.status << ',' << num(o.objective) << ','
         << num(o.primal) << ',' << num(o.dual) << ',' << num(gap) << ',' << num(o.wall_ms) << ','
         << (o.status == "SKIPPED" ? "" : o.status == "Optimal" ? "100" : "0") << ',' << check << '\n';
      if (o.status == "SKIPPED") continue;
      Aggregate& a = agg[k];
      ++a.count;
      a.wall += o.wall_ms;
      if (o.status == "Optimal") {
        ++a.solved;
        a.objective += o.objective;
      }
      if (std::isfinite(gap)) {
        ++a.gap_count;
        a.gap += gap;
      }
    }
  }
  for (std::size_t k = 0; k < methods.size(); ++k) {
    const Aggregate& a = agg[k];
    auto mean = [](double s, std::size_t n) { return n ? s / static_cast<double>(n) : kNaN; };
    os << "aggregate,ALL," << methods[k] << ',' << a.solved << '/' << a.count << ',' << num(mean(a.objective, a.solved))
       << ",,," << num(mean(a.gap, a.gap_count)) << ',' << num(mean(a.wall, a.count)) << ','
       << num(a.count ? 100.0 * static_cast<double>(a.solved) / static_cast<double>(a.count) : kNaN) << ",\n";
  }
  return any_fail ? kCompareFail : kOk;
}

// ---- example ----

struct GoldenCut {
  std::string cell;
  double slope;     // mu >= constant + slope x - bigm (activation)
  double constant;
  double bigm;
};

struct GoldenIteration {
  double x;
  std::string cell;
  std::vector<GoldenCut> cuts;
};

// two-cell walkthrough: three optimality cuts, then (1, 5.4) passes the optimality test
const std::vector<GoldenIteration> kGolden{
    {0.5, "d1", {{"d1", -1.0, 6.4, 12.5}}},
    {3.5, "d2", {{"d2", -1.0, 15.6, 12.5}}},
    {3.0, "d1", {{"d1", 0.4, 5.0, 12.5}}},
    {1.0, "d1", {}},
};
constexpr double kGoldenX = 1.0, kGoldenMu = 5.4, kGoldenObjective = 6.4;

std::string activation_label(const SpInstance& inst, std::size_t d) {
  if (inst.partition.kind == PartitionKind::ExplicitDelta) return "(1 - delta_" + inst.distributions[d].id + ")";
  return "act_" + inst.distributions[d].id;
}

int cmd_example(bool timing) {
  SpInstance inst = two_cell_instance();
  EngineConfig e;
  RunResult r = run(inst, e);
  std::vector<std::string> mismatches;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) mismatches.push_back(what);
  };
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-6; };
  check(r.iterations.size() == kGolden.size(),
        "iteration count " + std::to_string(r.iterations.size()) + " != " + std::to_string(kGolden.size()));
  for (std::size_t i = 0; i < r.iterations.size(); ++i) {
    const auto& it = r.iterations[i];
    std::cout << "iteration " << it.iteration << ": x = " << num(it.x[0]) << ", mu = " << num(it.mu) << ", cell "
              << inst.distributions[it.d].id << ", LB = " << num(it.lower_bound) << ", UB = " << num(it.upper_bound)
              << (timing ? ", wall_ms = " + num(it.wall_ms) : "") << "\n";
    for (std::size_t c : it.cuts) {
      const Cut& cut = r.cuts[c];
      std::cout << "  " << to_string(cut.kind) << ": "
                << describe(cut, inst.first.names, cut.d ? activation_label(inst, *cut.d) : "") << "\n";
    }
    if (i >= kGolden.size()) continue;
    const auto& g = kGolden[i];
    std::string tag = "iteration " + std::to_string(i + 1);
    check(near(it.x[0], g.x), tag + " x");
    check(inst.distributions[it.d].id == g.cell, tag + " cell");
    check(it.cuts.size() == g.cuts.size(), tag + " cut count");
    for (std::size_t k = 0; k < std::min(it.cuts.size(), g.cuts.size()); ++k) {
      const Cut& cut = r.cuts[it.cuts[k]];
      const GoldenCut& gc = g.cuts[k];
      check(cut.d && inst.distributions[*cut.d].id == gc.cell, tag + " cut cell");
      check(near(cut.mu_coef, 1.0), tag + " cut mu coefficient");
      check(near(-cut.x_coef[0], gc.slope), tag + " cut slope");
      check(near(cut.rhs, gc.constant), tag + " cut constant");
      check(near(cut.bigm, gc.bigm), tag + " cut big-M");
    }
    if (i > 0) check(it.lower_bound >= r.iterations[i - 1].lower_bound - 1e-12, tag + " lower bound decreased");
  }
  std::cout << "final: status " << to_string(r.status) << ", x = " << num(r.x.empty() ? kNaN : r.x[0])
            << ", mu = " << num(r.mu) << ", objective = " << num(r.objective) << "\n";
  check(r.status == RunStatus::Optimal, "status");
  check(!r.x.empty() && near(r.x[0], kGoldenX), "final x");
  check(near(r.mu, kGoldenMu), "final mu");
  check(near(r.objective, kGoldenObjective), "objective");
  for (const auto& m : mismatches) std::cout << "mismatch: " << m << "\n";
  std::cout << "golden " << (mismatches.empty() ? "MATCH" : "MISMATCH") << "\n";
  return mismatches.empty() ? kOk : kGoldenMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage stochastic programs with decision-dependent distributions"};
  app.require_subcommand(1);

  ppp::PppParams gen;
  std::string gen_out;
  auto* g = app.add_subcommand("generate", "Write a production-planning instance as JSON");
  g->add_option("--variant", gen.variant, "1, 2 or 3")->default_val(1);
  g->add_option("--facilities,-F", gen.facilities)->default_val(2);
  g->add_option("--levels,-L", gen.levels)->default_val(2);
  g->add_option("--scenarios,-S", gen.scenarios)->default_val(5);
  g->add_option("--locations", gen.locations, "demand locations (variants 2 and 3)")->default_val(5);
  g->add_option("--batches", gen.batches, "batch sizes per facility (variant 3)")->default_val(5);
  g->add_option("--vehicle-capacity", gen.vehicle_capacity, "units per vehicle (variant 3)")->default_val(40.0);
  g->add_option("--seed", gen.seed)->default_val(1);
  g->add_option("--out,-o", gen_out, "output path")->required();

  RunConfig cfg;
  auto add_run_options = [&](CLI::App* sub) {
    sub->add_option("--gap-tol", cfg.gap_tol, "relative optimality tolerance")->default_val(1e-4);
    sub->add_option("--time-limit", cfg.time_limit, "seconds")->default_val(1800.0);
    sub->add_option("--dist-ind-cuts", cfg.distind, "none, mccormick, jensen or envelope")->default_val("none");
    sub->add_option("--seed", cfg.seed, "recorded with the run; all methods are deterministic")->default_val(1);
    sub->add_option("--u-opt", cfg.u_opt, "override the optimality-cut big-M");
    sub->add_option("--mu-lower", cfg.mu_lower, "override the lower bound on mu");
    sub->add_option("--oracle-cap", cfg.oracle_cap, "largest distribution count for oracle and extensive")
        ->default_val(256);
    sub->add_flag("--no-timing", [&](std::int64_t) { cfg.timing = false; }, "report zero wall times");
  };

  std::string instance_path, log_path, solve_out;
  auto* s = app.add_subcommand("solve", "Solve an instance file");
  s->add_option("instance", instance_path)->required();
  s->add_option("--method", cfg.method, "ls-loop, ls-callback, extensive or oracle")->default_val("ls-loop");
  s->add_option("--log", log_path, "iteration CSV (L-shaped methods)");
  s->add_option("--out,-o", solve_out, "result record as JSON");
  add_run_options(s);

  std::string manifest, compare_out;
  std::vector<std::string> methods = kMethods;
  std::size_t jobs = 1;
  auto* c = app.add_subcommand("compare", "Run several methods over a generated corpus");
  c->add_option("manifest", manifest)->required();
  c->add_option("--method,--methods", methods, "comma separated")->delimiter(',');
  c->add_option("--out,-o", compare_out, "comparison CSV (stdout when omitted)");
  c->add_option("--jobs,-j", jobs, "instances solved concurrently")->default_val(1);
  add_run_options(c);

  bool example_timing = true;
  auto* ex = app.add_subcommand("example", "Replay the two-cell walkthrough and check it against the golden record");
  ex->add_flag("--no-timing", [&](std::int64_t) { example_timing = false; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    if (g->parsed()) return cmd_generate(gen, gen_out);
    if (s->parsed()) return cmd_solve(instance_path, cfg, log_path, solve_out);
    if (c->parsed()) return cmd_compare(manifest, methods, cfg, compare_out, jobs);
    return cmd_example(example_timing);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
