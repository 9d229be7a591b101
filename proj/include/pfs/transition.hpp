#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pfs/kinetic.hpp"
#include "pfs/model.hpp"
#include "pfs/newton.hpp"

namespace pfs {

enum class TransitionMethod { ghost, fka };

const char* to_string(TransitionMethod m);
TransitionMethod parse_method(const std::string& s);

// The two cells around a front at x_{i+1/2}.
struct InterfaceData {
  CellGeometry left_geo;
  CellGeometry right_geo;
  CellState left;
  CellState right;
  double Zl = 0.0;  // dynamic slope
  double Zr = 0.0;
};

struct TransitionSolution {
  double w = 0.0;
  CellState minus;
  CellState plus;
  TransitionMethod method = TransitionMethod::fka;
  double residual = 0.0;  // max-norm of the solved (scaled) system
  bool ok = false;
  std::string failure;
};

std::vector<std::size_t> detect_transitions(const std::vector<int>& E);

// (Q_r - Q_l) / (A_r - A_l); empty when |A_r - A_l| < 1e-12 * area_scale.
std::optional<double> predicted_speed(const CellState& l, const CellState& r, double area_scale);

// Mirror x -> -x: swap sides, flip discharges and barrier.
InterfaceData mirror(const InterfaceData& d);
TransitionSolution mirror(const TransitionSolution& s);

// Barrier used by the front solvers: pressurized branch of B at the mean area.
double front_barrier(const InterfaceData& d, const ModelParams& p);

TransitionSolution ghost_pressurized_downstream(const InterfaceData& d, const ModelParams& p,
                                                const NewtonOptions& opt = {});
TransitionSolution ghost_freesurface_downstream(const InterfaceData& d, const ModelParams& p,
                                                const NewtonOptions& opt = {});

// Full kinetic approach for a downstream-moving front (left state type kept by U-).
TransitionSolution fka_downstream(const InterfaceData& d, double dphi, const ModelParams& p,
                                  const NewtonOptions& opt = {});

// Dispatches on the flow types and the sign of the predicted speed; upstream
// moving fronts go through the mirror map.
TransitionSolution solve_transition(const InterfaceData& d, TransitionMethod method,
                                    const ModelParams& p, const NewtonOptions& opt = {});

// Scaled Rankine-Hugoniot residual max(|rh1|, |rh2|).
double rankine_hugoniot_residual(const TransitionSolution& s, const InterfaceData& d,
                                 const ModelParams& p);

struct InterfaceFluxes {
  Flux minus;  // seen by the left cell
  Flux plus;   // seen by the right cell
};

// w >= 0 pairs (left, U-), w < 0 pairs (U+, right). Momentum fluxes are returned in
// each cell's own gauge (pressurized cells carry the extra c^2 S of their Gibbs state).
InterfaceFluxes transition_fluxes(const TransitionSolution& s, const InterfaceData& d,
                                  const ModelParams& p);

// Plain kinetic fluxes between the two cells, gauged per cell when the types differ.
InterfaceFluxes plain_fluxes(const InterfaceData& d, const ModelParams& p);

}  // namespace pfs
