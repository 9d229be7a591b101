#pragma once

#include <vector>

#include "pfs/geometry.hpp"

namespace pfs {

struct CellState {
  double A = 0.0;
  double Q = 0.0;
  int E = 0;  // 0 free surface, 1 pressurized
};

struct ModelParams {
  double c = 1.0;
  double Ks = 0.0;  // Strickler; non-positive or infinite means frictionless
  double g = kGravity;
};

// Areas below this fraction of the full section carry no Gibbs density.
inline constexpr double kDryFraction = 1e-12;

bool is_dry(const CellGeometry& geo, double A);
double velocity(double A, double Q);

double physical_wet_area(double A, int E, double S_full);
double pressure(const CellGeometry& geo, const ModelParams& p, double A, int E);
double flux_momentum(const CellGeometry& geo, const ModelParams& p, double A, double Q, int E);
double kinetic_speed(const CellGeometry& geo, const ModelParams& p, double A, int E);
double celerity(const CellGeometry& geo, const ModelParams& p, double A, int E);
double total_head(const CellGeometry& geo, const ModelParams& p, double A, double Q, int E,
                  double Zdyn);
double friction_coefficient(const CellGeometry& geo, const ModelParams& p, double A, int E);
double entropy(const CellGeometry& geo, const ModelParams& p, double A, double Q, int E,
               double Zdyn);

// Cumulative trapezoid of K u|u| from the upstream ghost cell; Z_0 is the anchor.
std::vector<double> dynamic_slope(const std::vector<CellState>& cells,
                                  const std::vector<CellGeometry>& geo, const ModelParams& p);

}  // namespace pfs
