#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pfs/kinetic.hpp"
#include "pfs/model.hpp"
#include "pfs/transition.hpp"

namespace pfs {

// Piecewise-linear time series, clamped outside its range.
class TimeTable {
 public:
  TimeTable() = default;
  explicit TimeTable(std::vector<std::pair<double, double>> points);
  static TimeTable constant(double v) { return TimeTable({{0.0, v}}); }

  double operator()(double t) const;
  const std::vector<std::pair<double, double>>& points() const { return points_; }

 private:
  std::vector<std::pair<double, double>> points_;
};

enum class BoundaryEnd { upstream, downstream };
enum class BoundaryKind { level, discharge, head };

const char* to_string(BoundaryKind k);
BoundaryKind parse_boundary_kind(const std::string& s);

// Level is an altitude (m), discharge is along +x (m^3/s), head is Phi (m^2/s^2).
struct BoundaryCondition {
  BoundaryEnd end = BoundaryEnd::upstream;
  BoundaryKind kind = BoundaryKind::discharge;
  TimeTable table;

  double value(double t) const { return table(t); }
};

enum class ClosureOrder { zero, one };

// Residual of the outgoing kinetic characteristic at the upstream end, for
// the fictitious cell state `ghost` and the interior (or front) state
// `interior`. The common 1/(2 sqrt3) density factor is dropped.
double characteristic_closure(const Gibbs& ghost, const Gibbs& interior, double dphi,
                              ClosureOrder order, double g = kGravity);

// gamma_1 == delta_1: no interior particle leaves through the boundary.
bool closure_degenerate(const Gibbs& interior, double dphi, double g = kGravity);

// Indicator of the fictitious cell with its single neighbor duplicated.
int boundary_indicator(int E_prev, double A_prev, double S, int E_neighbor);

// Everything the solve needs, seen from the upstream side: for the downstream
// end the caller passes the data unchanged and solve_boundary mirrors it.
struct BoundaryInput {
  CellGeometry ghost_geo;
  CellGeometry interior_geo;
  CellState ghost_prev;  // U_0 at t^n
  CellState interior;    // U_1 at t^{n+1}
  double Z_ghost = 0.0;  // dynamic slope at t^n
  double Z_interior = 0.0;
};

struct BoundaryResult {
  CellState state;
  bool ok = true;
  bool transition = false;  // interior replaced by the front state U-
  std::string note;
};

BoundaryResult solve_boundary(const BoundaryCondition& bc, const BoundaryInput& in, double t,
                              const ModelParams& p, const NewtonOptions& opt = {});

// Level of the axis-relative altitude relation used by level conditions.
double boundary_level(const CellGeometry& geo, const ModelParams& p, double A, int E, double Zdyn);

}  // namespace pfs
