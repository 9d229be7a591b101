#include "pfs/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pfs {

namespace {

// Circular segment quantities are written in the half-angle phi of the wetted
// arc: level = -R cos(phi), top width = 2R sin(phi). The direct trigonometric
// forms cancel catastrophically for shallow water, so small angles use series.
constexpr double kSeriesSwitch = 0.5;

template <std::size_t N>
double odd_series(double p, int lead, const std::array<double, N>& c) {
  const double p2 = p * p;
  double acc = 0.0;
  for (std::size_t k = N; k-- > 0;) acc = acc * p2 + c[k];
  return acc * std::pow(p, lead);
}

// phi - sin(phi)cos(phi); area / R^2
double unit_area(double p) {
  if (p < kSeriesSwitch) {
    static const std::array<double, 9> c = {
        2.0 / 3.0,        -2.0 / 15.0,           4.0 / 315.0,
        -2.0 / 2835.0,    4.0 / 155925.0,        -4.0 / 6081075.0,
        8.0 / 638512875.0, -2.0 / 10854718875.0, 4.0 / 1856156927625.0};
    return odd_series(p, 3, c);
  }
  return p - std::sin(p) * std::cos(p);
}

// sin(phi) - sin(phi)^3/3 - phi cos(phi); I1 / R^3
double unit_i1(double p) {
  if (p < kSeriesSwitch) {
    static const std::array<double, 8> c = {
        2.0 / 15.0,          -11.0 / 315.0,        17.0 / 3780.0,
        -461.0 / 1247400.0,  8303.0 / 389188800.0, -24911.0 / 27243216000.0,
        168151.0 / 5557616064000.0, -1513361.0 / 1900704693888000.0};
    return odd_series(p, 5, c);
  }
  const double s = std::sin(p);
  return s - s * s * s / 3.0 - p * std::cos(p);
}

// sin(phi) - phi cos(phi); pi * gamma / R
double unit_gamma(double p) {
  if (p < kSeriesSwitch) {
    static const std::array<double, 10> c = {
        1.0 / 3.0,          -1.0 / 30.0,           1.0 / 840.0,
        -1.0 / 45360.0,     1.0 / 3991680.0,       -1.0 / 518918400.0,
        1.0 / 93405312000.0, -1.0 / 22230464256000.0, 1.0 / 6758061133824000.0,
        -1.0 / 2554547108585472000.0};
    return odd_series(p, 3, c);
  }
  return std::sin(p) - p * std::cos(p);
}

// Solves unit_area(phi) = t on [0, pi/2] by Newton, bisecting whenever the
// iterate leaves the bracket.
double small_side_angle(double t) {
  if (t <= 0.0) return 0.0;
  double lo = 0.0, hi = kPi / 2.0;
  double p = std::min(std::cbrt(1.5 * t), hi);
  for (int it = 0; it < 80; ++it) {
    const double f = unit_area(p) - t;
    if (f > 0.0) hi = p; else lo = p;
    const double s = std::sin(p);
    const double d = 2.0 * s * s;
    double next = d > 0.0 ? p - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - p) <= 1e-16 * std::max(p, 1e-300)) return next;
    p = next;
  }
  return p;
}

double angle_from_area(double a, double r) {
  const double t = a / (r * r);
  if (t <= kPi / 2.0) return small_side_angle(t);
  const double full = kPi * r * r;
  return kPi - small_side_angle((full - a) / (r * r));
}

void check_area(const Section& s, double a, const char* who) {
  const double full = s.full_area();
  if (!(a >= 0.0) || a > full * (1.0 + 1e-12)) {
    throw std::domain_error(std::string(who) + ": wet area " + std::to_string(a) +
                            " outside [0, " + std::to_string(full) + "]");
  }
}

}  // namespace

Section Section::circular(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("Section::circular: radius must be positive");
  Section s;
  s.shape = Shape::circular;
  s.radius = r;
  return s;
}

Section Section::rectangular(double b, double h) {
  if (!(b > 0.0) || !(h > 0.0)) {
    throw std::invalid_argument("Section::rectangular: width and height must be positive");
  }
  Section s;
  s.shape = Shape::rectangular;
  s.width = b;
  s.height = h;
  return s;
}

double Section::full_area() const {
  return shape == Shape::circular ? kPi * radius * radius : width * height;
}

double Section::half_height() const {
  return shape == Shape::circular ? radius : 0.5 * height;
}

double Section::full_perimeter() const {
  return shape == Shape::circular ? 2.0 * kPi * radius : 2.0 * (width + height);
}

double Section::area_from_level(double level) const {
  const double hh = half_height();
  if (level <= -hh) return 0.0;
  if (level >= hh) return full_area();
  if (shape == Shape::rectangular) return width * (level + hh);
  const double r = radius;
  return r * r * unit_area(std::acos(-level / r));
}

double Section::level_from_area(double a) const {
  check_area(*this, a, "level_from_area");
  const double full = full_area();
  if (a >= full) return half_height();
  if (shape == Shape::rectangular) return a / width - 0.5 * height;
  const double p = angle_from_area(a, radius);
  return -radius * std::cos(p);
}

double Section::top_width(double a) const {
  check_area(*this, a, "top_width");
  if (shape == Shape::rectangular) return a >= full_area() ? 0.0 : width;
  if (a >= full_area()) return 0.0;
  return 2.0 * radius * std::sin(angle_from_area(a, radius));
}

double Section::hydrostatic_integral(double a) const {
  check_area(*this, a, "hydrostatic_integral");
  a = std::min(a, full_area());
  if (shape == Shape::rectangular) {
    const double depth = a / width;
    return 0.5 * width * depth * depth;
  }
  const double r = radius;
  return r * r * r * unit_i1(angle_from_area(a, r));
}

double Section::gamma(double a) const {
  check_area(*this, a, "gamma");
  a = std::min(a, full_area());
  if (shape == Shape::rectangular) {
    const double depth = a / width;
    return depth * depth / (2.0 * height);
  }
  return radius / kPi * unit_gamma(angle_from_area(a, radius));
}

double Section::centroid_depth(double a) const {
  check_area(*this, a, "centroid_depth");
  a = std::min(a, full_area());
  if (a <= 0.0) return -half_height();
  return level_from_area(a) - hydrostatic_integral(a) / a;
}

double Section::wet_perimeter(double a) const {
  check_area(*this, a, "wet_perimeter");
  if (a >= full_area()) return full_perimeter();
  if (shape == Shape::rectangular) return width + 2.0 * a / width;
  return 2.0 * radius * angle_from_area(a, radius);
}

double Section::hydraulic_radius(double a) const {
  if (!(a > 0.0)) throw std::domain_error("hydraulic_radius: dry section");
  return std::min(a, full_area()) / wet_perimeter(std::min(a, full_area()));
}

double Section::full_level_sensitivity() const {
  // S dR/dS = R/2 for a circle; a rectangle grows in width at fixed height.
  return shape == Shape::circular ? 0.5 * radius : 0.0;
}

Section lerp(const Section& a, const Section& b, double t) {
  if (a.shape != b.shape) throw std::invalid_argument("lerp: sections of different shape");
  Section s = a;
  s.radius = a.radius + t * (b.radius - a.radius);
  s.width = a.width + t * (b.width - a.width);
  s.height = a.height + t * (b.height - a.height);
  return s;
}

//----------------------------------------------------------------------------

PipeGeometry::PipeGeometry(double upstream_altitude, std::vector<SegmentSpec> segments) {
  if (segments.empty()) throw std::invalid_argument("PipeGeometry: no segments");
  double x = 0.0, z = upstream_altitude;
  std::vector<CellGeometry> interior;
  for (const auto& seg : segments) {
    if (!(seg.length > 0.0) || seg.cells < 1) {
      throw std::invalid_argument("PipeGeometry: segment needs positive length and cells");
    }
    if (std::abs(seg.slope) >= 1.0) throw std::invalid_argument("PipeGeometry: |slope| must be < 1");
    if (seg.start.shape != seg.end.shape) {
      throw std::invalid_argument("PipeGeometry: segment changes section shape");
    }
    Piece p{x, x + seg.length, z, z - seg.slope * seg.length, std::asin(seg.slope), seg.start, seg.end};
    pieces_.push_back(p);
    const double h = seg.length / seg.cells;
    for (int k = 0; k < seg.cells; ++k) {
      const double t = (k + 0.5) / seg.cells;
      CellGeometry c;
      c.x = x + (k + 0.5) * h;
      c.h = h;
      c.Z = p.z0 + t * (p.z1 - p.z0);
      c.theta = p.theta;
      c.cos_theta = std::cos(p.theta);
      c.section = lerp(seg.start, seg.end, t);
      c.S = c.section.full_area();
      interior.push_back(c);
    }
    x = p.x1;
    z = p.z1;
  }
  length_ = x;

  CellGeometry up = interior.front();
  CellGeometry down = interior.back();
  up.x -= up.h;
  down.x += down.h;
  if (interior.size() >= 2) {
    up.Z = 2.0 * interior[0].Z - interior[1].Z;
    const std::size_t n = interior.size();
    down.Z = 2.0 * interior[n - 1].Z - interior[n - 2].Z;
  }
  cells_.reserve(interior.size() + 2);
  cells_.push_back(up);
  cells_.insert(cells_.end(), interior.begin(), interior.end());
  cells_.push_back(down);
}

const PipeGeometry::Piece& PipeGeometry::piece_at(double x) const {
  if (!(x >= 0.0 && x <= length_)) {
    throw std::domain_error("PipeGeometry: position " + std::to_string(x) + " outside [0, " +
                            std::to_string(length_) + "]");
  }
  for (const auto& p : pieces_) {
    if (x <= p.x1) return p;
  }
  return pieces_.back();
}

Section PipeGeometry::section_at(double x) const {
  const auto& p = piece_at(x);
  return lerp(p.s0, p.s1, (x - p.x0) / (p.x1 - p.x0));
}

double PipeGeometry::altitude(double x) const {
  const auto& p = piece_at(x);
  return p.z0 + (x - p.x0) / (p.x1 - p.x0) * (p.z1 - p.z0);
}

double PipeGeometry::angle(double x) const { return piece_at(x).theta; }

double PipeGeometry::full_section_area(double x) const { return section_at(x).full_area(); }

double PipeGeometry::level_from_area(double x, double a) const {
  return section_at(x).level_from_area(a);
}

double PipeGeometry::hydrostatic_integral(double x, double a) const {
  return section_at(x).hydrostatic_integral(a);
}

double PipeGeometry::gamma_coefficient(double x, double a) const {
  const Section s = section_at(x);
  if (!(a > 0.0)) throw std::domain_error("gamma_coefficient: dry section");
  return s.gamma(a);
}

double PipeGeometry::hydraulic_radius(double x, double a) const {
  return section_at(x).hydraulic_radius(a);
}

}  // namespace pfs
