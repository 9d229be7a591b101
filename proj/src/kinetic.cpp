#include "pfs/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pfs {

namespace {

double pow32(double v) {
  v = std::max(v, 0.0);
  return v * std::sqrt(v);
}

}  // namespace

Gibbs gibbs_state(const CellGeometry& geo, const ModelParams& p, const CellState& s) {
  if (is_dry(geo, s.A)) return {};
  return {s.A, s.Q / s.A, kinetic_speed(geo, p, s.A, s.E)};
}

double partial_moment(const Gibbs& m, double lo, double hi, int order) {
  if (m.empty() || !(hi > lo)) return 0.0;
  const double s0 = m.lower(), s1 = m.upper();
  if (lo <= s0 && hi >= s1) {
    switch (order) {
      case 0: return m.A;
      case 1: return m.A * m.u;
      default: return m.A * (m.u * m.u + m.b * m.b);
    }
  }
  const double a = std::max(lo, s0), c = std::min(hi, s1);
  if (!(c > a)) return 0.0;
  const double w = m.density() * (c - a);
  switch (order) {
    case 0: return w;
    case 1: return w * 0.5 * (c + a);
    default: return w * (c * c + c * a + a * a) / 3.0;
  }
}

Flux equilibrium_flux(const Gibbs& m) {
  if (m.empty()) return {};
  return {m.A * m.u, m.A * (m.u * m.u + m.b * m.b)};
}

Flux flux_minus(const Gibbs& left, const Gibbs& right, double dphi, double g) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double G = 2.0 * g * dphi;
  Flux f{partial_moment(left, 0.0, inf, 1), partial_moment(left, 0.0, inf, 2)};
  if (G > 0.0) {
    const double r = std::sqrt(G);
    f.mass -= partial_moment(left, 0.0, r, 1);
    f.momentum += partial_moment(left, 0.0, r, 2);
  }
  if (!right.empty()) {
    const double cut = -std::sqrt(std::max(0.0, -G));
    const double a = right.lower(), c = std::min(right.upper(), cut);
    if (c > a) {
      const double d = right.density();
      f.mass += d * (c - a) * 0.5 * (c + a);
      f.momentum += d / 3.0 * (pow32(a * a + G) - pow32(c * c + G));
    }
  }
  return f;
}

Flux flux_plus(const Gibbs& left, const Gibbs& right, double dphi, double g) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double G = 2.0 * g * dphi;
  Flux f{partial_moment(right, -inf, 0.0, 1), partial_moment(right, -inf, 0.0, 2)};
  if (G < 0.0) {
    const double r = std::sqrt(-G);
    f.mass -= partial_moment(right, -r, 0.0, 1);
    f.momentum += partial_moment(right, -r, 0.0, 2);
  }
  if (!left.empty()) {
    const double cut = std::sqrt(std::max(0.0, G));
    const double a = std::max(left.lower(), cut), c = left.upper();
    if (c > a) {
      const double d = left.density();
      f.mass += d * (c - a) * 0.5 * (c + a);
      f.momentum += d / 3.0 * (pow32(c * c - G) - pow32(a * a - G));
    }
  }
  return f;
}

BarrierCoefficients barrier_coefficients(const Section& mid_section, double mid_cos,
                                         const ModelParams& p, double A_mid, int E_mid) {
  BarrierCoefficients b;
  const double S = mid_section.full_area();
  if (!(A_mid > 0.0)) {
    b.angle = -mid_section.half_height();
    return b;
  }
  const double ws = E_mid == 1 ? S : std::min(A_mid, S);
  const double gam = mid_section.gamma(ws);
  b.section = -gam * mid_cos / A_mid;
  if (E_mid == 1) b.section -= p.c * p.c / p.g * (A_mid - S) / (A_mid * S);
  b.angle = mid_section.centroid_depth(ws);
  return b;
}

double potential_barrier(const SourceVector& left, const SourceVector& right,
                         const BarrierCoefficients& b) {
  return (right.Zdyn - left.Zdyn) + (right.S - left.S) * b.section +
         (right.cos_theta - left.cos_theta) * b.angle;
}

double interface_barrier(const CellGeometry& gl, const CellGeometry& gr, const ModelParams& p,
                         double Zl, double Zr, double Al, double Ar, int E_mid) {
  const SourceVector wl{Zl, gl.S, gl.cos_theta};
  const SourceVector wr{Zr, gr.S, gr.cos_theta};
  if (wl.S == wr.S && wl.cos_theta == wr.cos_theta) return Zr - Zl;
  const Section mid = lerp(gl.section, gr.section, 0.5);
  const double cmid = 0.5 * (gl.cos_theta + gr.cos_theta);
  return potential_barrier(wl, wr, barrier_coefficients(mid, cmid, p, 0.5 * (Al + Ar), E_mid));
}

double cfl_timestep(const std::vector<CellState>& cells, const std::vector<CellGeometry>& geo,
                    const ModelParams& p, double cfl, double fallback) {
  double hmin = std::numeric_limits<double>::infinity();
  double smax = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    hmin = std::min(hmin, geo[i].h);
    const Gibbs m = gibbs_state(geo[i], p, cells[i]);
    if (m.empty()) continue;
    smax = std::max(smax, std::abs(m.u) + kSqrt3 * m.b);
  }
  if (!(smax > 0.0)) return fallback;
  return cfl * hmin / smax;
}

}  // namespace pfs
