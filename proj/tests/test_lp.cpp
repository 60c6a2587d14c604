#include <gtest/gtest.h>

#include <random>

#include "ddsp/lp.hpp"
#include "oracles.hpp"

using namespace ddsp;

namespace {

void expect_certificates(const LinearProgram& lp, const LpSolution& sol) {
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  double tol = 1e-7;
  EXPECT_TRUE(oracle::feasible(lp, sol.primal, 1e-8));
  double sign = lp.sense == Sense::Minimize ? 1.0 : -1.0;
  double dual_obj = 0.0;
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    const Row& r = lp.rows[i];
    double y = sign * sol.dual[i];
    if (r.rel == Relation::LessEqual) {
      EXPECT_LE(y, tol);
    } else if (r.rel == Relation::GreaterEqual) {
      EXPECT_GE(y, -tol);
    }
    double act = dot(r.coef, sol.primal);
    EXPECT_LE(std::abs(sol.dual[i] * (act - r.rhs)), 1e-7);
    dual_obj += sol.dual[i] * r.rhs;
  }
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    double d = sign * sol.reduced_cost[j];
    if (d > tol) {
      EXPECT_NEAR(sol.primal[j], lp.lower[j], 1e-8);
      dual_obj += sol.reduced_cost[j] * lp.lower[j];
    } else if (d < -tol) {
      EXPECT_NEAR(sol.primal[j], lp.upper[j], 1e-8);
      dual_obj += sol.reduced_cost[j] * lp.upper[j];
    }
  }
  EXPECT_LE(std::abs(sol.objective - dual_obj), 1e-7 * (1.0 + std::abs(sol.objective)));
}

}  // namespace

TEST(Lp, DualOfSecondStageAtHalf) {
  LinearProgram lp;
  lp.sense = Sense::Maximize;
  double x = 0.5, xi = 4.0;
  lp.objective = {2.0 + x, xi - x};
  lp.lower = {0.0, 0.0};
  lp.upper = {kInf, kInf};
  lp.add_row({1.0, 1.0}, Relation::LessEqual, 1.0);
  lp.add_row({0.0, 1.0}, Relation::LessEqual, 2.0);
  LpSolution sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.primal[0], 0.0, 1e-12);
  EXPECT_NEAR(sol.primal[1], 1.0, 1e-12);
  EXPECT_NEAR(sol.objective, 3.5, 1e-12);
  expect_certificates(lp, sol);
}

TEST(Lp, ZeroObjectiveEquality) {
  LinearProgram lp;
  lp.objective = {0.0};
  lp.lower = {0.0};
  lp.upper = {kInf};
  lp.add_row({1.0}, Relation::Equal, 1.0);
  LpSolution sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.primal[0], 1.0, 1e-12);
  EXPECT_EQ(sol.objective, 0.0);
}

TEST(Lp, RecourseDualsMatchClosedForm) {
  // min y1 + 2 y2 s.t. y1 + y2 >= 2 + x, y1 >= xi - x
  struct Case { double x, xi, r1, r2; };
  for (Case c : {Case{0.5, 4, 0, 1}, Case{0.5, 12, 0, 1}, Case{3, 4, 1, 0}, Case{3, 12, 0, 1}}) {
    LinearProgram lp;
    lp.objective = {1.0, 2.0};
    lp.lower = {0.0, 0.0};
    lp.upper = {kInf, kInf};
    lp.add_row({1.0, 1.0}, Relation::GreaterEqual, 2.0 + c.x);
    lp.add_row({1.0, 0.0}, Relation::GreaterEqual, c.xi - c.x);
    LpSolution sol = solve_lp(lp);
    ASSERT_EQ(sol.status, LpStatus::Optimal);
    EXPECT_NEAR(sol.objective, std::max(c.xi - c.x, 2.0 + c.x), 1e-12);
    EXPECT_NEAR(sol.dual[0], c.r1, 1e-12);
    EXPECT_NEAR(sol.dual[1], c.r2, 1e-12);
  }
}

TEST(Lp, InfeasibleAndUnbounded) {
  LinearProgram lp;
  lp.objective = {1.0, 1.0};
  lp.lower = {0.0, 0.0};
  lp.upper = {kInf, kInf};
  lp.add_row({1.0, 1.0}, Relation::LessEqual, -1.0);
  LpSolution sol = solve_lp(lp);
  EXPECT_EQ(sol.status, LpStatus::Infeasible);
  ASSERT_EQ(sol.ray.size(), 1u);
  // Farkas multiplier: y * rhs > 0 with y <= 0 certifies x + y <= -1 has no nonnegative solution
  EXPECT_LT(sol.ray[0], 0.0);

  LinearProgram un;
  un.objective = {-1.0, 0.0};
  un.lower = {0.0, 0.0};
  un.upper = {kInf, kInf};
  un.add_row({1.0, -1.0}, Relation::LessEqual, 1.0);
  LpSolution s2 = solve_lp(un);
  EXPECT_EQ(s2.status, LpStatus::Unbounded);
  ASSERT_EQ(s2.ray.size(), 2u);
  EXPECT_LT(-s2.ray[0], 0.0);
  EXPECT_LE(s2.ray[0] - s2.ray[1], 1e-12);
}

TEST(Lp, MalformedProgramRejected) {
  LinearProgram lp;
  lp.objective = {1.0, 1.0};
  lp.lower = {0.0, 0.0};
  lp.upper = {kInf, kInf};
  lp.rows.push_back(Row{{1.0}, Relation::LessEqual, 1.0});
  try {
    solve_lp(lp);
    FAIL() << "expected MalformedProgram";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MalformedProgram);
  }
  lp.rows.clear();
  lp.lower[0] = 2.0;
  lp.upper[0] = 1.0;
  EXPECT_THROW(solve_lp(lp), Error);
}

TEST(Lp, PhaseOne) {
  Matrix w{{1.0}};
  std::vector<double> rhs{-1.0};
  LpSolution s = solve_phase_one(w, rhs);
  EXPECT_NEAR(s.objective, 1.0, 1e-12);
  EXPECT_NEAR(s.dual[0], -1.0, 1e-12);

  Matrix w2{{1.0, 1.0}, {1.0, 0.0}};
  std::vector<double> rhs2{3.0, 3.0};
  LpSolution s2 = solve_phase_one(w2, rhs2);
  EXPECT_NEAR(s2.objective, 0.0, 1e-12);
}

TEST(Lp, PhaseOneAgreesWithFeasibilityCheck) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    LinearProgram lp = oracle::random_lp(rng, 3, 4, trial % 2 == 1);
    Matrix w(3, 4);
    std::vector<Relation> rel;
    std::vector<double> rhs;
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 4; ++j) w(i, j) = lp.rows[i].coef[j];
      rel.push_back(lp.rows[i].rel);
      rhs.push_back(lp.rows[i].rhs);
    }
    LpSolution p1 = solve_phase_one(w, rel, rhs, lp.lower, lp.upper);
    for (double s : p1.dual) {
      EXPECT_LE(s, 1.0 + 1e-9);
      EXPECT_GE(s, -1.0 - 1e-9);
    }
    LinearProgram zero = lp;
    std::fill(zero.objective.begin(), zero.objective.end(), 0.0);
    LpSolution f = solve_lp(zero);
    EXPECT_EQ(p1.objective <= 1e-8, f.status == LpStatus::Optimal) << "trial " << trial;
  }
}

TEST(Lp, RandomLpsMatchVertexEnumeration) {
  std::mt19937_64 rng(20240601);
  int infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    LinearProgram lp = oracle::random_lp(rng, 3, 5, trial % 5 == 4);
    LpSolution sol = solve_lp(lp);
    auto ref = oracle::vertex_enumeration(lp);
    if (!ref) {
      EXPECT_EQ(sol.status, LpStatus::Infeasible) << "trial " << trial;
      ++infeasible;
      continue;
    }
    ASSERT_EQ(sol.status, LpStatus::Optimal) << "trial " << trial;
    EXPECT_NEAR(sol.objective, *ref, 1e-7 * (1.0 + std::abs(*ref))) << "trial " << trial;
    expect_certificates(lp, sol);
  }
  EXPECT_GT(infeasible, 0);
}

TEST(Lp, DegenerateTieBrokenDeterministically) {
  // x1 + x2 <= 1, x1 <= 1, x2 <= 1, max x1 + x2 has an optimal edge
  LinearProgram lp;
  lp.sense = Sense::Maximize;
  lp.objective = {1.0, 1.0};
  lp.lower = {0.0, 0.0};
  lp.upper = {1.0, 1.0};
  lp.add_row({1.0, 1.0}, Relation::LessEqual, 1.0);
  LpSolution a = solve_lp(lp);
  LpSolution b = solve_lp(lp);
  EXPECT_EQ(a.primal, b.primal);
  EXPECT_EQ(a.dual, b.dual);
  lp.tiebreak = {0.0, 1.0};
  LpSolution c = solve_lp(lp);
  EXPECT_NEAR(c.primal[1], 1.0, 1e-12);
  lp.tiebreak = {1.0, 0.0};
  LpSolution d = solve_lp(lp);
  EXPECT_NEAR(d.primal[0], 1.0, 1e-12);
  EXPECT_NEAR(d.objective, 1.0, 1e-12);
}

TEST(Lp, FreeVariables) {
  LinearProgram lp;
  lp.objective = {1.0, 1.0};
  lp.lower = {-kInf, -kInf};
  lp.upper = {kInf, kInf};
  lp.add_row({1.0, 0.0}, Relation::GreaterEqual, -3.0);
  lp.add_row({1.0, -1.0}, Relation::Equal, 1.0);
  LpSolution sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.primal[0], -3.0, 1e-12);
  EXPECT_NEAR(sol.primal[1], -4.0, 1e-12);
  EXPECT_NEAR(sol.objective, -7.0, 1e-12);
  expect_certificates(lp, sol);
}
