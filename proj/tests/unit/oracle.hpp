#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pfs/geometry.hpp"

namespace oracle {

inline double integrate(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-13);
}

// Width of the section at height z above the axis.
inline double width(const pfs::Section& s, double z) {
  if (s.shape == pfs::Shape::circular) {
    const double r2 = s.radius * s.radius - z * z;
    return r2 > 0.0 ? 2.0 * std::sqrt(r2) : 0.0;
  }
  return std::abs(z) <= 0.5 * s.height ? s.width : 0.0;
}

inline double bottom(const pfs::Section& s) {
  return s.shape == pfs::Shape::circular ? -s.radius : -0.5 * s.height;
}

inline double area(const pfs::Section& s, double level) {
  return integrate([&](double z) { return width(s, z); }, bottom(s), level);
}

inline double hydrostatic(const pfs::Section& s, double level) {
  return integrate([&](double z) { return (level - z) * width(s, z); }, bottom(s), level);
}

// Hydrostatic thrust of the wall variation at a fixed level per unit change of the full area.
inline double gamma(const pfs::Section& s, double level) {
  if (s.shape == pfs::Shape::circular) {
    // d(width)/dR = 2R / sqrt(R^2 - z^2); z = -R cos(t) removes the endpoint singularity.
    const double R = s.radius;
    const double top = std::acos(std::clamp(-level / R, -1.0, 1.0));
    const double thrust = integrate([&](double t) { return (level + R * std::cos(t)) * 2.0 * R; }, 0.0, top);
    return thrust / (2.0 * pfs::kPi * R);
  }
  const double lo = bottom(s);
  return integrate([&](double z) { return level - z; }, lo, level) / s.height;
}

inline pfs::CellGeometry cell(const pfs::Section& s, double x = 0.0, double Z = 0.0, double h = 1.0) {
  pfs::CellGeometry g;
  g.x = x;
  g.h = h;
  g.Z = Z;
  g.section = s;
  g.S = s.full_area();
  return g;
}

}  // namespace oracle
