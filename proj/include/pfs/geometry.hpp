#pragma once

#include <cstddef>
#include <vector>

namespace pfs {

inline constexpr double kGravity = 9.81;
inline constexpr double kSqrt3 = 1.7320508075688772935;
inline constexpr double kPi = 3.14159265358979323846;

enum class Shape { circular, rectangular };

// Closed cross-section; levels are measured from the pipe axis, so the
// wetted range is [-half_height(), half_height()].
struct Section {
  Shape shape = Shape::circular;
  double radius = 1.0;
  double width = 1.0;
  double height = 1.0;

  static Section circular(double r);
  static Section rectangular(double b, double h);

  double full_area() const;
  double half_height() const;
  double full_perimeter() const;

  double area_from_level(double level) const;
  double level_from_area(double a) const;

  double top_width(double a) const;
  double hydrostatic_integral(double a) const;
  double gamma(double a) const;
  double centroid_depth(double a) const;
  double wet_perimeter(double a) const;
  double hydraulic_radius(double a) const;

  // S * dH/dS of the full section as its size varies (pressurized branch).
  double full_level_sensitivity() const;
};

Section lerp(const Section& a, const Section& b, double t);

struct SegmentSpec {
  double length = 1.0;
  int cells = 1;
  Section start;
  Section end;
  // Drop of the axis per unit length (sine of the inclination).
  double slope = 0.0;
};

struct CellGeometry {
  double x = 0.0;
  double h = 1.0;
  double Z = 0.0;
  double theta = 0.0;
  double cos_theta = 1.0;
  Section section;
  double S = 0.0;
};

class PipeGeometry {
 public:
  PipeGeometry(double upstream_altitude, std::vector<SegmentSpec> segments);

  double length() const { return length_; }
  std::size_t interior_count() const { return cells_.size() - 2; }

  // Cells 0 and N+1 are the fictitious boundary cells.
  const std::vector<CellGeometry>& cells() const { return cells_; }
  const CellGeometry& cell(std::size_t i) const { return cells_[i]; }

  Section section_at(double x) const;
  double altitude(double x) const;
  double angle(double x) const;

  double full_section_area(double x) const;
  double level_from_area(double x, double a) const;
  double hydrostatic_integral(double x, double a) const;
  double gamma_coefficient(double x, double a) const;
  double hydraulic_radius(double x, double a) const;

 private:
  struct Piece {
    double x0, x1, z0, z1, theta;
    Section s0, s1;
  };
  const Piece& piece_at(double x) const;

  std::vector<Piece> pieces_;
  std::vector<CellGeometry> cells_;
  double length_ = 0.0;
};

}  // namespace pfs
