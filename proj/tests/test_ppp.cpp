#include <gtest/gtest.h>

#include "ddsp/bundled.hpp"
#include "ddsp/instance_io.hpp"
#include "ddsp/lshaped.hpp"
#include "ddsp/ppp.hpp"

using namespace ddsp;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::MalformedProgram;
}

ppp::PppParams small(int variant, std::uint64_t seed) {
  ppp::PppParams p;
  p.variant = variant;
  p.seed = seed;
  if (variant == 2) p.locations = 2;
  if (variant == 3) {
    p.locations = 1;
    p.batches = 2;
  }
  return p;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// first-stage point with the listed (column, value) entries, zero elsewhere
std::vector<double> first_stage_point(const SpInstance& inst, const std::vector<std::pair<std::size_t, double>>& set) {
  std::vector<double> x(inst.n1(), 0.0);
  for (auto [j, v] : set) x[j] = v;
  return x;
}

}  // namespace

TEST(PppGenerator, DeterministicPerSeed) {
  for (int v = 1; v <= 3; ++v) {
    auto p = small(v, 7);
    EXPECT_EQ(dump_instance(ppp::generate_instance(p)), dump_instance(ppp::generate_instance(p)));
    auto q = p;
    q.seed = 8;
    EXPECT_NE(dump_instance(ppp::generate_instance(p)), dump_instance(ppp::generate_instance(q)));
  }
}

TEST(PppGenerator, DistributionAndScenarioCounts) {
  ppp::PppParams p;
  p.facilities = 3;
  p.levels = 5;
  p.scenarios = 4;
  auto g = ppp::generate_data(p);
  EXPECT_EQ(g.num_distributions(), 125u);
  SpInstance inst = ppp::build_instance(g);
  std::size_t total = 0;
  for (const auto& d : inst.distributions) total += d.scenarios.size();
  EXPECT_EQ(inst.num_distributions(), 125u);
  EXPECT_EQ(total, 125u * 4u);
}

TEST(PppGenerator, YieldsWithinTruncation) {
  for (int v = 1; v <= 3; ++v) {
    auto p = small(v, 3);
    p.facilities = 3;
    p.levels = 3;
    p.scenarios = 20;
    auto g = ppp::generate_data(p);
    for (const auto& d : g.yield)
      for (const auto& s : d)
        for (double y : s) {
          EXPECT_GE(y, 0.25);
          EXPECT_LE(y, 1.0);
        }
  }
}

TEST(PppGenerator, YieldSpreadShrinksWithLevel) {
  ppp::PppParams p;
  p.facilities = 1;
  p.levels = 3;
  p.scenarios = 4000;
  auto g = ppp::generate_data(p);
  std::vector<double> sd;
  for (std::size_t d = 0; d < g.num_distributions(); ++d) {
    double m = 0.0, m2 = 0.0;
    for (const auto& s : g.yield[d]) {
      m += s[0];
      m2 += s[0] * s[0];
    }
    m /= g.S;
    sd.push_back(std::sqrt(m2 / g.S - m * m));
  }
  EXPECT_GT(sd[0], sd[1]);
  EXPECT_GT(sd[1], sd[2]);
}

TEST(PppGenerator, LevelBandsAreDisjoint) {
  auto g = ppp::generate_data(small(2, 5));
  for (const auto& bands : g.level)
    for (std::size_t l = 1; l < bands.size(); ++l) EXPECT_LT(bands[l - 1].hi, bands[l].lo);
}

TEST(PppGenerator, ProfitSigns) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto g = ppp::generate_data(small(1 + static_cast<int>(seed % 3), seed));
    for (double c : g.cost) {
      EXPECT_GT(g.price, c);
      EXPECT_LT(g.salvage, c);
    }
  }
}

TEST(PppGenerator, RejectsInvalidParams) {
  ppp::PppParams p;
  p.levels = 1;
  EXPECT_EQ(code_of([&] { ppp::generate_instance(p); }), Errc::InvalidParams);
  p = {};
  p.variant = 4;
  EXPECT_EQ(code_of([&] { ppp::generate_instance(p); }), Errc::InvalidParams);
  p = {};
  p.salvage = {15.0, 200.0};
  EXPECT_EQ(code_of([&] { ppp::generate_instance(p); }), Errc::InvalidParams);
}

TEST(PppVariant1, ZeroProductionGivesZeroRecourse) {
  SpInstance inst = ppp::generate_instance(small(1, 2));
  std::vector<double> x(inst.n1(), 0.0);
  for (std::size_t d = 0; d < inst.num_distributions(); ++d) {
    auto ev = evaluate_recourse(inst, x, d);
    ASSERT_TRUE(ev.feasible);
    EXPECT_NEAR(ev.value, 0.0, 1e-9);
  }
}

TEST(PppVariant1, RecourseMatchesClosedForm) {
  auto g = ppp::generate_data(small(1, 4));
  SpInstance inst = ppp::build_instance(g);
  std::vector<double> x = first_stage_point(inst, {{0, 120.0}, {1, 90.0}});
  for (std::size_t d = 0; d < g.num_distributions(); ++d) {
    double expect = 0.0;
    for (std::size_t s = 0; s < g.S; ++s) {
      double out = g.yield[d][s][0] * 120.0 + g.yield[d][s][1] * 90.0;
      double sold = std::min(out, g.demand[d][s][0]);
      expect += g.probability[d][s] * (-g.price * sold - g.salvage * (out - sold));
    }
    EXPECT_NEAR(evaluate_recourse(inst, x, d).value, expect, 1e-6 * (1.0 + std::abs(expect)));
  }
}

TEST(PppVariant2, ZeroTransportSingleLocationEqualsVariant1) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto g1 = ppp::generate_data(small(1, seed));
    auto g2 = g1;
    g2.variant = 2;
    SpInstance a = ppp::build_instance(g1);
    SpInstance b = ppp::build_instance(g2);
    EXPECT_NEAR(ppp::enumeration_oracle(a).objective, ppp::enumeration_oracle(b).objective, 1e-6);
  }
}

TEST(PppVariant2, ZeroDemandSellsAtSalvage) {
  auto g = ppp::generate_data(small(2, 6));
  for (auto& d : g.demand)
    for (auto& s : d) std::fill(s.begin(), s.end(), 0.0);
  SpInstance inst = ppp::build_instance(g);
  std::vector<double> x = first_stage_point(inst, {{0, 100.0}, {1, 50.0}});
  for (std::size_t d = 0; d < g.num_distributions(); ++d) {
    auto ev = evaluate_recourse(inst, x, d);
    double expect = 0.0;
    for (std::size_t s = 0; s < g.S; ++s)
      expect -= g.probability[d][s] * g.salvage * (g.yield[d][s][0] * 100.0 + g.yield[d][s][1] * 50.0);
    EXPECT_NEAR(ev.value, expect, 1e-6 * (1.0 + std::abs(expect)));
  }
}

TEST(PppVariant3, RelaxationMatchesPerUnitTransport) {
  ppp::PppParams p = small(3, 9);
  p.locations = 2;
  auto g3 = ppp::generate_data(p);
  auto g2 = g3;
  g2.variant = 2;
  g2.B = 0;
  g2.batch.clear();
  for (std::size_t f = 0; f < g2.F; ++f)
    for (std::size_t q = 0; q < g2.Q; ++q) g2.unit_cost[f][q] = g3.trip_cost[f][q] / g3.vehicle_capacity;
  SpInstance i3 = ppp::build_instance(g3);
  SpInstance i2 = ppp::build_instance(g2);
  for (std::size_t b0 = 0; b0 < g3.B; ++b0)
    for (std::size_t b1 = 0; b1 < g3.B; ++b1) {
      std::vector<double> x3 = first_stage_point(i3, {{b0, 1.0}, {g3.B + b1, 1.0}});
      std::vector<double> x2 = first_stage_point(i2, {{0, g3.batch[0][b0]}, {1, g3.batch[1][b1]}});
      for (std::size_t d = 0; d < g3.num_distributions(); ++d) {
        double r3 = evaluate_recourse(i3, x3, d).relaxed_value;
        double r2 = evaluate_recourse(i2, x2, d).value;
        EXPECT_NEAR(r3, r2, 1e-6 * (1.0 + std::abs(r2)));
      }
    }
}

TEST(PppVariant3, ZeroBatchesGiveZeroObjective) {
  auto g = ppp::generate_data(small(3, 2));
  for (auto& sizes : g.batch) std::fill(sizes.begin(), sizes.end(), 0.0);
  SpInstance inst = ppp::build_instance(g);
  EXPECT_NEAR(ppp::enumeration_oracle(inst).objective, 0.0, 1e-9);
  EXPECT_NEAR(run(inst).objective, 0.0, 1e-9);
}

TEST(PppVariant3, UnreachableBatchesRejected) {
  auto g = ppp::generate_data(small(3, 2));
  for (auto& sizes : g.batch) std::fill(sizes.begin(), sizes.end(), g.level[0][0].hi + 0.5);
  EXPECT_EQ(code_of([&] { ppp::build_instance(g); }), Errc::InfeasibleBatchLevels);
}

TEST(PppVariant3, ShipmentsRespectVehicleCapacity) {
  auto g = ppp::generate_data(small(3, 5));
  SpInstance inst = ppp::build_instance(g);
  RunResult r = run(inst);
  ASSERT_EQ(r.status, RunStatus::Optimal);
  auto ev = evaluate_recourse(inst, r.x, r.d);
  ASSERT_TRUE(ev.feasible);
  const std::size_t FQ = g.F * g.Q;
  for (const auto& s : ev.scenarios)
    for (std::size_t k = 0; k < FQ; ++k) {
      double w = s.y[k], v = s.y[FQ + g.F + k];
      EXPECT_NEAR(v, std::round(v), 1e-6);
      EXPECT_LE(w, g.vehicle_capacity * v + 1e-6);
    }
}

TEST(PppExtensive, TwoCellInstance) {
  SpInstance inst = two_cell_instance();
  auto ex = ppp::build_extensive(inst);
  auto sol = ppp::solve_extensive(ex);
  ASSERT_EQ(sol.status, MilpStatus::Optimal);
  EXPECT_NEAR(sol.objective, 6.4, 1e-7);
  EXPECT_NEAR(sol.incumbent[0], 1.0, 1e-7);
}

TEST(PppExtensive, FixedIndicatorReducesToCellProgram) {
  SpInstance inst = ppp::generate_instance(small(1, 3));
  auto ex = ppp::build_extensive(inst);
  auto orc = ppp::enumeration_oracle(inst);
  for (std::size_t d = 0; d < inst.num_distributions(); ++d) {
    if (!orc.per_cell[d]) continue;
    auto fixed = ex;
    fixed.mip.lp.lower[ex.delta[d]] = 1.0;
    auto sol = ppp::solve_extensive(fixed);
    ASSERT_EQ(sol.status, MilpStatus::Optimal);
    EXPECT_LT(rel_diff(sol.objective, *orc.per_cell[d]), 1e-6);
  }
}

TEST(PppExtensive, RejectsInfiniteLinearizationBound) {
  SpInstance inst = two_cell_instance();
  inst.distributions[0].scenarios[0].y_upper[0] = kInf;
  EXPECT_EQ(code_of([&] { ppp::build_extensive(inst); }), Errc::UnboundedLinearizationBound);
}

TEST(PppOracle, TwoCellInstance) {
  auto orc = ppp::enumeration_oracle(two_cell_instance());
  EXPECT_NEAR(orc.objective, 6.4, 1e-7);
  EXPECT_EQ(orc.d, 0u);
  EXPECT_NEAR(orc.x[0], 1.0, 1e-7);
  // x + Q_d2(x) is piecewise linear on [3.5, 10] with kinks where xi - x = 2 + x
  auto closed = [](double x) { return x + 0.3 * std::max(10.0 - x, 2.0 + x) + 0.7 * std::max(18.0 - x, 2.0 + x); };
  double best = kInf;
  for (double x : {3.5, 4.0, 8.0, 10.0}) best = std::min(best, closed(x));
  ASSERT_TRUE(orc.per_cell[1]);
  EXPECT_NEAR(*orc.per_cell[1], best, 1e-7);
}

TEST(PppOracle, CapEnforced) {
  ppp::PppParams p;
  p.facilities = 5;
  p.levels = 5;
  p.scenarios = 1;
  SpInstance inst = ppp::generate_instance(p);
  EXPECT_EQ(code_of([&] { ppp::enumeration_oracle(inst); }), Errc::TooManyDistributions);
}

TEST(PppOracle, AgreesWithEngineOnVariant1Corpus) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SpInstance inst = ppp::generate_instance(small(1, seed));
    double o = ppp::enumeration_oracle(inst).objective;
    RunResult r = run(inst);
    ASSERT_EQ(r.status, RunStatus::Optimal) << seed;
    EXPECT_LT(rel_diff(r.objective, o), 1e-4) << seed;
  }
}

TEST(PppAgreement, AllMethodsAgree) {
  for (int v = 1; v <= 3; ++v)
    for (std::uint64_t seed = 1; seed <= 2; ++seed) {
      SpInstance inst = ppp::generate_instance(small(v, seed));
      double o = ppp::enumeration_oracle(inst).objective;
      EngineConfig loop, cb;
      cb.mode = Mode::Callback;
      RunResult a = run(inst, loop), b = run(inst, cb);
      MilpConfig mc;
      mc.mip_gap = 1e-9;
      auto e = ppp::solve_extensive(ppp::build_extensive(inst), mc);
      ASSERT_EQ(e.status, MilpStatus::Optimal);
      EXPECT_LT(rel_diff(a.objective, o), 1e-4) << v << " " << seed;
      EXPECT_LT(rel_diff(b.objective, o), 1e-4) << v << " " << seed;
      EXPECT_LT(rel_diff(e.objective, o), 1e-4) << v << " " << seed;
    }
}
