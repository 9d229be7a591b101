#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pfs/harness.hpp"

namespace pfs {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

CheckResult check_moment_identities(std::uint64_t seed = 1);
CheckResult check_mass_flux_continuity(std::uint64_t seed = 2);
CheckResult check_positivity(std::uint64_t seed = 3);
CheckResult check_well_balanced();
CheckResult check_dry_flood();
CheckResult check_transition_solvers(std::uint64_t seed = 6);
CheckResult check_water_hammer();
CheckResult check_front_arrival();
CheckResult check_convergence_order();
CheckResult check_indicator_automaton();

// Criteria in numeric order; `quick` keeps the ones that run in seconds.
std::vector<CheckResult> run_checks(const std::vector<int>& ids);
std::vector<int> all_check_ids();
std::vector<int> quick_check_ids();

struct ConvergenceStudy {
  OrderFit fit;
  std::vector<std::size_t> cells;
  std::size_t reference_cells = 0;
  double time = 0.0;
};

// Self-convergence of the piezometric line at `time` against a mesh
// `ref_factor` times finer than the finest level.
ConvergenceStudy convergence_study(const ScenarioConfig& cfg, int levels, double time,
                                   int ref_factor = 8);

// Oscillation period of a sampled signal from its mean crossings after t0.
double oscillation_period(const std::vector<double>& t, const std::vector<double>& v, double t0);

}  // namespace pfs
