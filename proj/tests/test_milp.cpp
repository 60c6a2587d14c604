#include <gtest/gtest.h>

#include <random>

#include "ddsp/milp.hpp"
#include "oracles.hpp"

using namespace ddsp;

namespace {

MilpConfig exact() {
  MilpConfig c;
  c.mip_gap = 1e-9;
  return c;
}

}  // namespace

TEST(Milp, KnapsackMatchesEnumeration) {
  MixedIntegerProgram mip;
  mip.lp.sense = Sense::Maximize;
  mip.add_variable(5, 0, 1, Domain::Binary);
  mip.add_variable(4, 0, 1, Domain::Binary);
  mip.add_variable(3, 0, 1, Domain::Binary);
  mip.lp.add_row({2, 3, 1}, Relation::LessEqual, 4);
  auto ref = oracle::binary_enumeration(mip.lp);
  ASSERT_TRUE(ref);
  EXPECT_EQ(*ref, 8.0);
  MilpSolution s = solve_milp(mip, {}, exact());
  ASSERT_EQ(s.status, MilpStatus::Optimal);
  EXPECT_NEAR(s.objective, 8.0, 1e-9);
  EXPECT_NEAR(s.incumbent[0], 1.0, 1e-9);
  EXPECT_NEAR(s.incumbent[2], 1.0, 1e-9);
}

TEST(Milp, IntegralRelaxationUnchangedByTags) {
  // 2x2 transportation problem with integer supplies and demands
  MixedIntegerProgram mip;
  double cost[4] = {4, 6, 5, 3};
  for (double c : cost) mip.add_variable(c, 0, kInf, Domain::Integer);
  mip.lp.add_row({1, 1, 0, 0}, Relation::LessEqual, 7);
  mip.lp.add_row({0, 0, 1, 1}, Relation::LessEqual, 5);
  mip.lp.add_row({1, 0, 1, 0}, Relation::GreaterEqual, 6);
  mip.lp.add_row({0, 1, 0, 1}, Relation::GreaterEqual, 4);
  MilpSolution s = solve_milp(mip, {}, exact());
  LpSolution r = solve_lp(mip.lp);
  ASSERT_EQ(s.status, MilpStatus::Optimal);
  EXPECT_NEAR(s.objective, r.objective, 1e-9);
  EXPECT_EQ(s.node_count, 1u);
}

TEST(Milp, RandomBinaryProgramsMatchEnumeration) {
  std::mt19937_64 rng(99);
  int infeasible = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 3 + trial % 10;
    MixedIntegerProgram mip = oracle::random_binary_program(rng, n, 1 + trial % 4);
    auto ref = oracle::binary_enumeration(mip.lp);
    MilpSolution s = solve_milp(mip, {}, exact());
    if (!ref) {
      EXPECT_EQ(s.status, MilpStatus::Infeasible) << "trial " << trial;
      ++infeasible;
      continue;
    }
    ASSERT_EQ(s.status, MilpStatus::Optimal) << "trial " << trial;
    EXPECT_NEAR(s.objective, *ref, 1e-7) << "trial " << trial;
    EXPECT_TRUE(oracle::feasible(mip.lp, s.incumbent, 1e-7));
    for (std::size_t i = 1; i < s.bound_trace.size(); ++i) {
      if (mip.lp.sense == Sense::Minimize) EXPECT_GE(s.bound_trace[i], s.bound_trace[i - 1] - 1e-12);
      else EXPECT_LE(s.bound_trace[i], s.bound_trace[i - 1] + 1e-12);
    }
  }
  EXPECT_GT(infeasible, 0);
}

TEST(Milp, CutsDivingAndPrioritiesKeepOptimum) {
  std::mt19937_64 rng(314);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 4 + trial % 9;
    MixedIntegerProgram mip = oracle::random_binary_program(rng, n, 2 + trial % 4);
    mip.priority.resize(n);
    for (auto& p : mip.priority) p = static_cast<int>(rng() % 3);
    auto ref = oracle::binary_enumeration(mip.lp);
    MilpConfig cfg = exact();
    cfg.gomory_rounds = 10;
    cfg.dive_first = trial % 2 == 0;
    cfg.warm_start = trial % 3 != 0;
    MilpSolution s = solve_milp(mip, {}, cfg);
    if (!ref) {
      EXPECT_EQ(s.status, MilpStatus::Infeasible) << "trial " << trial;
      continue;
    }
    ASSERT_EQ(s.status, MilpStatus::Optimal) << "trial " << trial;
    EXPECT_NEAR(s.objective, *ref, 1e-7) << "trial " << trial;
    EXPECT_TRUE(oracle::feasible(mip.lp, s.incumbent, 1e-7));
  }
}

TEST(Milp, MixedProgramsWithCutsMatchEnumeration) {
  std::mt19937_64 rng(2718);
  std::uniform_int_distribution<int> coef(-5, 8);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t nb = 3 + trial % 4, nc = 2;
    MixedIntegerProgram mip;
    for (std::size_t j = 0; j < nb; ++j) mip.add_variable(coef(rng), 0.0, 1.0, Domain::Binary);
    for (std::size_t j = 0; j < nc; ++j) mip.add_variable(coef(rng), 0.0, 4.0, Domain::Continuous);
    for (int i = 0; i < 3; ++i) {
      std::vector<double> a(nb + nc);
      for (auto& v : a) v = coef(rng);
      mip.lp.add_row(a, i == 0 ? Relation::GreaterEqual : Relation::LessEqual, coef(rng));
    }
    // best over every binary assignment of the remaining LP
    std::optional<double> ref;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nb); ++mask) {
      LinearProgram fixed = mip.lp;
      for (std::size_t j = 0; j < nb; ++j) fixed.lower[j] = fixed.upper[j] = (mask >> j) & 1u ? 1.0 : 0.0;
      auto v = oracle::vertex_enumeration(fixed);
      if (v && (!ref || *v < *ref)) ref = v;
    }
    MilpConfig cfg = exact();
    cfg.gomory_rounds = 10;
    cfg.dive_first = true;
    MilpSolution s = solve_milp(mip, {}, cfg);
    if (!ref) {
      EXPECT_EQ(s.status, MilpStatus::Infeasible) << "trial " << trial;
      continue;
    }
    ASSERT_EQ(s.status, MilpStatus::Optimal) << "trial " << trial;
    EXPECT_NEAR(s.objective, *ref, 1e-7) << "trial " << trial;
  }
}

TEST(Milp, EmptyCallbackIsBitIdentical) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    MixedIntegerProgram mip = oracle::random_binary_program(rng, 8, 3);
    MilpSolution a = solve_milp(mip);
    MilpSolution b = solve_milp(mip, [](std::span<const double>, const NodeInfo&) { return std::vector<Row>{}; });
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.incumbent, b.incumbent);
    EXPECT_EQ(a.objective, b.objective);
    EXPECT_EQ(a.node_count, b.node_count);
    EXPECT_EQ(a.bound_trace, b.bound_trace);
  }
}

TEST(Milp, LazyRowsEnforcedAtIntegerNodes) {
  // max sum x subject to lazily separated pairwise conflicts x_i + x_{i+1} <= 1
  std::size_t n = 6;
  MixedIntegerProgram mip;
  mip.lp.sense = Sense::Maximize;
  for (std::size_t j = 0; j < n; ++j) mip.add_variable(1.0 + 0.1 * j, 0, 1, Domain::Binary);
  std::size_t calls = 0;
  auto cb = [&](std::span<const double> x, const NodeInfo&) {
    ++calls;
    std::vector<Row> rows;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      if (x[j] + x[j + 1] > 1.5) {
        Row r;
        r.coef.assign(n, 0.0);
        r.coef[j] = r.coef[j + 1] = 1.0;
        r.rel = Relation::LessEqual;
        r.rhs = 1.0;
        rows.push_back(r);
      }
    }
    return rows;
  };
  MilpSolution s = solve_milp(mip, cb, exact());
  MixedIntegerProgram full = mip;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    std::vector<double> a(n, 0.0);
    a[j] = a[j + 1] = 1.0;
    full.lp.add_row(a, Relation::LessEqual, 1.0);
  }
  auto ref = oracle::binary_enumeration(full.lp);
  ASSERT_EQ(s.status, MilpStatus::Optimal);
  EXPECT_NEAR(s.objective, *ref, 1e-9);
  EXPECT_GT(calls, 1u);
  for (std::size_t j = 0; j + 1 < n; ++j) EXPECT_LE(s.incumbent[j] + s.incumbent[j + 1], 1.0 + 1e-9);
}

TEST(Milp, FirstMasterOfTwoCellExample) {
  // variables x, mu, d1, d2
  MixedIntegerProgram mip;
  mip.add_variable(1.0, 0.0, 10.0, Domain::Continuous);
  mip.add_variable(1.0, 0.0, kInf, Domain::Continuous);
  mip.add_variable(0.0, 0.0, 1.0, Domain::Binary);
  mip.add_variable(0.0, 0.0, 1.0, Domain::Binary);
  mip.lp.add_row({1, 0, -0.5, -3.5}, Relation::GreaterEqual, 0.0);
  mip.lp.add_row({1, 0, -3.0, -10.0}, Relation::LessEqual, 0.0);
  mip.lp.add_row({0, 0, 1, 1}, Relation::Equal, 1.0);
  MilpSolution s = solve_milp(mip);
  ASSERT_EQ(s.status, MilpStatus::Optimal);
  EXPECT_NEAR(s.incumbent[0], 0.5, 1e-9);
  EXPECT_NEAR(s.incumbent[1], 0.0, 1e-9);
  EXPECT_NEAR(s.incumbent[2], 1.0, 1e-9);
  EXPECT_NEAR(s.incumbent[3], 0.0, 1e-9);
}

TEST(Milp, UnboundedAndTimeLimit) {
  MixedIntegerProgram mip;
  mip.add_variable(-1.0, 0.0, kInf, Domain::Integer);
  EXPECT_EQ(solve_milp(mip).status, MilpStatus::Unbounded);

  std::mt19937_64 rng(1);
  MixedIntegerProgram hard = oracle::random_binary_program(rng, 12, 2);
  MilpConfig cfg = exact();
  cfg.node_limit = 1;
  MilpSolution s = solve_milp(hard, {}, cfg);
  EXPECT_TRUE(s.status == MilpStatus::TimeLimit || s.status == MilpStatus::Optimal ||
              s.status == MilpStatus::Infeasible);
}

TEST(Milp, RejectsBadBinaryBounds) {
  MixedIntegerProgram mip;
  mip.add_variable(1.0, 0.0, 2.0, Domain::Binary);
  EXPECT_THROW(solve_milp(mip), Error);
}
