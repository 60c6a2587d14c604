// Solves the two-cell instance with the L-shaped loop, then a small generated
// production-planning instance with every method.
//
//   ddsp_sample [instance.json]

#include <iostream>

#include "ddsp/bundled.hpp"
#include "ddsp/instance_io.hpp"
#include "ddsp/lshaped.hpp"
#include "ddsp/ppp.hpp"

using namespace ddsp;

int main(int argc, char** argv) {
  SpInstance inst = argc > 1 ? load_instance(argv[1]) : two_cell_instance();
  RunResult r = run(inst);
  for (const auto& it : r.iterations) {
    std::cout << "iteration " << it.iteration << "  cell " << inst.distributions[it.d].id << "  LB " << it.lower_bound
              << "  UB " << it.upper_bound << "\n";
    for (std::size_t c : it.cuts) {
      const Cut& cut = r.cuts[c];
      std::string act = cut.d ? "(1 - delta_" + inst.distributions[*cut.d].id + ")" : "";
      std::cout << "    " << describe(cut, inst.first.names, act) << "\n";
    }
  }
  std::cout << "objective " << inst.native(r.objective) << " in cell " << inst.distributions[r.d].id << "\n\n";

  ppp::PppParams p;
  p.variant = 2;
  p.locations = 3;
  SpInstance plant = ppp::generate_instance(p);
  std::cout << plant.name << ": " << plant.num_distributions() << " distributions, " << plant.num_scenarios()
            << " scenarios\n";
  EngineConfig loop, callback;
  callback.mode = Mode::Callback;
  RunResult a = run(plant, loop), b = run(plant, callback);
  auto ext = ppp::solve_extensive(ppp::build_extensive(plant));
  auto orc = ppp::enumeration_oracle(plant);
  std::cout << "  ls-loop      profit " << plant.native(a.objective) << " (" << a.optimality_cuts() << " cuts)\n"
            << "  ls-callback  profit " << plant.native(b.objective) << " (" << b.optimality_cuts() << " cuts)\n"
            << "  extensive    profit " << plant.native(ext.objective) << " (" << ext.node_count << " nodes)\n"
            << "  oracle       profit " << plant.native(orc.objective) << "\n";
}
