#include "pfs/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pfs {

namespace {

double wet_area(const CellGeometry& geo, double A, int E) {
  return E == 1 ? geo.S : std::min(A, geo.S);
}

bool frictionless(const ModelParams& p) { return !(p.Ks > 0.0) || std::isinf(p.Ks); }

}  // namespace

bool is_dry(const CellGeometry& geo, double A) { return !(A > kDryFraction * geo.S); }

double velocity(double A, double Q) { return A > 0.0 ? Q / A : 0.0; }

double physical_wet_area(double A, int E, double S_full) { return E == 1 ? S_full : A; }

double pressure(const CellGeometry& geo, const ModelParams& p, double A, int E) {
  const double ws = wet_area(geo, A, E);
  const double hydro = p.g * geo.section.hydrostatic_integral(ws) * geo.cos_theta;
  return E == 1 ? p.c * p.c * (A - ws) + hydro : hydro;
}

double flux_momentum(const CellGeometry& geo, const ModelParams& p, double A, double Q, int E) {
  if (!(A > 0.0)) return 0.0;
  return Q * Q / A + pressure(geo, p, A, E);
}

double kinetic_speed(const CellGeometry& geo, const ModelParams& p, double A, int E) {
  if (!(A > 0.0)) return 0.0;
  const double ws = wet_area(geo, A, E);
  const double b2 = p.g * geo.section.hydrostatic_integral(ws) * geo.cos_theta / A;
  return std::sqrt(E == 1 ? b2 + p.c * p.c : b2);
}

double celerity(const CellGeometry& geo, const ModelParams& p, double A, int E) {
  if (E == 1) return p.c;
  if (!(A > 0.0)) return 0.0;
  const double ws = wet_area(geo, A, E);
  const double T = geo.section.top_width(ws);
  if (!(T > 0.0)) return p.c;
  return std::sqrt(p.g * ws * geo.cos_theta / T);
}

double total_head(const CellGeometry& geo, const ModelParams& p, double A, double Q, int E,
                  double Zdyn) {
  if (!(A > 0.0)) throw std::domain_error("total_head: dry cell");
  const double ws = wet_area(geo, A, E);
  const double u = Q / A;
  double phi = 0.5 * u * u + p.g * geo.section.level_from_area(ws) * geo.cos_theta + p.g * Zdyn;
  if (E == 1) phi += p.c * p.c * std::log(A / ws);
  return phi;
}

double friction_coefficient(const CellGeometry& geo, const ModelParams& p, double A, int E) {
  if (is_dry(geo, A) || frictionless(p)) return 0.0;
  const double rh = geo.section.hydraulic_radius(wet_area(geo, A, E));
  return 1.0 / (p.Ks * p.Ks * std::pow(rh, 4.0 / 3.0));
}

double entropy(const CellGeometry& geo, const ModelParams& p, double A, double Q, int E,
               double Zdyn) {
  if (!(A > 0.0)) return 0.0;
  const double ws = wet_area(geo, A, E);
  const double zbar = geo.section.centroid_depth(ws);
  double e = 0.5 * Q * Q / A + p.c * p.c * geo.S + p.g * A * zbar * geo.cos_theta + p.g * A * Zdyn;
  if (E == 1) e += p.c * p.c * A * std::log(A / ws);
  return e;
}

std::vector<double> dynamic_slope(const std::vector<CellState>& cells,
                                  const std::vector<CellGeometry>& geo, const ModelParams& p) {
  const std::size_t n = cells.size();
  std::vector<double> out(n);
  if (n == 0) return out;
  auto integrand = [&](std::size_t i) {
    const double A = cells[i].A;
    if (is_dry(geo[i], A)) return 0.0;
    const double u = cells[i].Q / A;
    return friction_coefficient(geo[i], p, A, cells[i].E) * u * std::abs(u);
  };
  double acc = 0.0;
  double prev = integrand(0);
  out[0] = geo[0].Z;
  for (std::size_t i = 1; i < n; ++i) {
    const double cur = integrand(i);
    acc += 0.5 * (prev + cur) * (geo[i].x - geo[i - 1].x);
    out[i] = geo[i].Z + acc;
    prev = cur;
  }
  return out;
}

}  // namespace pfs
