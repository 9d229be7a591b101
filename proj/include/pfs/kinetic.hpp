#pragma once

#include <vector>

#include "pfs/geometry.hpp"
#include "pfs/model.hpp"

namespace pfs {

// Uniform Gibbs density (A/b) chi((xi-u)/b), chi = 1/(2 sqrt3) on [-sqrt3, sqrt3].
struct Gibbs {
  double A = 0.0;
  double u = 0.0;
  double b = 0.0;

  bool empty() const { return !(A > 0.0) || !(b > 0.0); }
  double lower() const { return u - kSqrt3 * b; }
  double upper() const { return u + kSqrt3 * b; }
  double density() const { return empty() ? 0.0 : A / (2.0 * kSqrt3 * b); }
};

Gibbs gibbs_state(const CellGeometry& geo, const ModelParams& p, const CellState& s);

// Integral of xi^order times the density over [lo, hi] intersected with the support.
double partial_moment(const Gibbs& m, double lo, double hi, int order);

struct Flux {
  double mass = 0.0;
  double momentum = 0.0;
};

// Flux of the full equilibrium, (A u, A (u^2 + b^2)).
Flux equilibrium_flux(const Gibbs& m);

// Interface fluxes seen from the left cell (minus) and the right cell (plus).
Flux flux_minus(const Gibbs& left, const Gibbs& right, double dphi, double g = kGravity);
Flux flux_plus(const Gibbs& left, const Gibbs& right, double dphi, double g = kGravity);

struct SourceVector {
  double Zdyn = 0.0;
  double S = 0.0;
  double cos_theta = 1.0;
};

struct BarrierCoefficients {
  double section = 0.0;
  double angle = 0.0;
};

// Coefficient vector B (first component is 1) at the midpoint of an interface.
BarrierCoefficients barrier_coefficients(const Section& mid_section, double mid_cos,
                                         const ModelParams& p, double A_mid, int E_mid);

double potential_barrier(const SourceVector& left, const SourceVector& right,
                         const BarrierCoefficients& b);

// Barrier between two cells with the midpoint state A = mean, E = E_l * E_r.
double interface_barrier(const CellGeometry& gl, const CellGeometry& gr, const ModelParams& p,
                         double Zl, double Zr, double Al, double Ar, int E_mid);

// dt = cfl * min h / max(|u| + sqrt3 b); returns fallback when every cell is dry.
double cfl_timestep(const std::vector<CellState>& cells, const std::vector<CellGeometry>& geo,
                    const ModelParams& p, double cfl, double fallback);

}  // namespace pfs
