#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pfs/boundary.hpp"
#include "pfs/geometry.hpp"
#include "pfs/kinetic.hpp"
#include "pfs/model.hpp"
#include "pfs/transition.hpp"

namespace pfs {

// Cells include the fictitious cells 0 and N+1.
struct MeshState {
  std::vector<CellState> cells;
  std::vector<double> Zdyn;
  double t = 0.0;
  long step = 0;
};

struct StepperOptions {
  double cfl = 0.9;
  TransitionMethod method = TransitionMethod::fka;
  NewtonOptions newton;
  // Residual above which a converged front solve still counts as a fallback.
  double residual_limit = 1e-8;
};

struct StepDiagnostics {
  double t = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  double minA = 0.0;
  int transitions = 0;
  int fallbacks = 0;
  int boundary_failures = 0;
  // Mass entering through the two ends during the step, dt * (F_up - F_down).
  double boundary_inflow = 0.0;
  double clamped_mass = 0.0;
};

struct TransitionEvent {
  double t = 0.0;
  std::size_t interface = 0;  // between cells i and i+1
  TransitionMethod method = TransitionMethod::fka;
  double w = 0.0;
  double residual = 0.0;
  bool fallback = false;
};

class SimulationAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Discrete steady state between two neighbours: equal discharge and equal
// total head, each cell with its own geometry and dynamic slope.
bool equilibrium_interface(const CellGeometry& gl, const CellGeometry& gr, const CellState& l,
                           const CellState& r, double Zl, double Zr, const ModelParams& p);

// Flow type update from the new area and the previous-step neighbour types.
int update_state_indicator(int E, double A_new, double S, int E_left, int E_right);

// Sum of A h over the interior cells.
double interior_mass(const std::vector<CellState>& cells, const std::vector<CellGeometry>& geo);

class Stepper {
 public:
  Stepper(const PipeGeometry& geometry, ModelParams params, StepperOptions options,
          BoundaryCondition upstream, BoundaryCondition downstream);

  // Sets the fictitious cells from their neighbours and fills Zdyn.
  MeshState initial_state(std::vector<CellState> interior) const;

  // One step with dt = min(CFL step, dt_max).
  StepDiagnostics advance(MeshState& m, double dt_max);

  const std::vector<TransitionEvent>& events() const { return events_; }
  void clear_events() { events_.clear(); }

  const PipeGeometry& geometry() const { return geometry_; }
  const ModelParams& params() const { return params_; }
  const StepperOptions& options() const { return options_; }

  // Fluxes (minus, plus) at interface i+1/2 for the given state; exposed for tests.
  InterfaceFluxes interface_fluxes(const MeshState& m, std::size_t i, StepDiagnostics* diag = nullptr);

 private:
  PipeGeometry geometry_;
  ModelParams params_;
  StepperOptions options_;
  BoundaryCondition upstream_;
  BoundaryCondition downstream_;
  std::vector<TransitionEvent> events_;
};

}  // namespace pfs
