#pragma once

#include "ddsp/model.hpp"

namespace ddsp {

/// Two-cell instance: x in [0,10], cells [0.5,3] and [3.5,10],
/// recourse min y1 + 2 y2 s.t. y1 + y2 >= 2 + x, y1 >= xi - x.
inline SpInstance two_cell_instance() {
  SpInstance inst;
  inst.name = "two-cell";
  inst.first.names = {"x"};
  inst.first.cost = {1.0};
  inst.first.domains = {Domain::Continuous};
  inst.first.lower = {0.0};
  inst.first.upper = {10.0};

  auto& P = inst.partition;
  P.kind = PartitionKind::ExplicitDelta;
  P.forms = {{1.0}};
  P.cells = {{Interval{0.5, 3.0}}, {Interval{3.5, 10.0}}};

  auto& rc = inst.recourse;
  rc.kind = StageKind::Linear;
  rc.names = {"y1", "y2"};
  rc.relations = {Relation::GreaterEqual, Relation::GreaterEqual};
  rc.domains = {Domain::Continuous, Domain::Continuous};
  rc.lower = {0.0, 0.0};
  rc.upper = {kInf, kInf};

  auto scenario = [](double p, double xi) {
    ScenarioData s;
    s.probability = p;
    s.q = {1.0, 2.0};
    s.W = Matrix{{1.0, 1.0}, {1.0, 0.0}};
    s.T = Matrix{{-1.0}, {1.0}};
    s.h = {2.0, xi};
    s.y_upper = {20.0, 20.0};
    return s;
  };
  inst.distributions = {Distribution{"d1", {scenario(0.7, 4.0), scenario(0.3, 12.0)}},
                        Distribution{"d2", {scenario(0.3, 10.0), scenario(0.7, 18.0)}}};

  inst.uncertainty.convex_in_xi = true;
  inst.uncertainty.monotone_declared = true;
  inst.uncertainty.monotone_h = {1, 1};
  inst.uncertainty.monotone_T = {{-1}, {-1}};
  inst.bounds.u_opt = 12.5;
  inst.bounds.mu_lower = 0.0;
  return inst;
}

/// Five binary variables split into segments {x1,x2}, {x3,x4}, {x5}; each
/// segment is either empty (sum <= 0) or not (sum >= 1), giving 8 cells.
/// The recourse is a placeholder with zero cost.
inline SpInstance segmented_binary_instance() {
  SpInstance inst;
  inst.name = "segmented-binary";
  for (int j = 0; j < 5; ++j) {
    inst.first.names.push_back("x" + std::to_string(j + 1));
    inst.first.cost.push_back(0.0);
    inst.first.domains.push_back(Domain::Binary);
    inst.first.lower.push_back(0.0);
    inst.first.upper.push_back(1.0);
  }
  auto& P = inst.partition;
  P.kind = PartitionKind::BinarySegments;
  P.segments = {{0, 1}, {2, 3}, {4}};
  for (const auto& seg : P.segments) {
    std::vector<double> ones(seg.size(), 1.0);
    P.conditions.push_back({Condition{ones, Interval{-kInf, 0.0}}, Condition{ones, Interval{1.0, kInf}}});
  }
  P.choice = mixed_radix_choice({2, 2, 2});

  auto& rc = inst.recourse;
  rc.names = {"y"};
  rc.relations = {Relation::GreaterEqual};
  rc.domains = {Domain::Continuous};
  rc.lower = {0.0};
  rc.upper = {kInf};
  for (std::size_t d = 0; d < 8; ++d) {
    ScenarioData s;
    s.probability = 1.0;
    s.q = {0.0};
    s.W = Matrix{{1.0}};
    s.T = Matrix(1, 5);
    s.h = {0.0};
    inst.distributions.push_back(Distribution{"d" + std::to_string(d + 1), {s}});
  }
  return inst;
}

}  // namespace ddsp
