#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracle.hpp"
#include "pfs/geometry.hpp"

using namespace pfs;

TEST_SUITE("geometry") {

TEST_CASE("area, hydrostatic integral and level match quadrature") {
  const std::vector<Section> sections = {Section::circular(0.7), Section::rectangular(1.3, 0.9)};
  for (const auto& s : sections) {
    const double R = s.half_height();
    for (double f : {0.01, 0.2, 0.5, 0.77, 0.99}) {
      const double level = -R + 2.0 * R * f;
      const double a = oracle::area(s, level);
      CHECK(s.area_from_level(level) == doctest::Approx(a).epsilon(1e-11));
      CHECK(s.level_from_area(a) == doctest::Approx(level).epsilon(1e-10));
      CHECK(s.hydrostatic_integral(a) == doctest::Approx(oracle::hydrostatic(s, level)).epsilon(1e-10));
      CHECK(s.centroid_depth(a) == doctest::Approx(level - s.hydrostatic_integral(a) / a).epsilon(1e-10));
      CHECK(s.top_width(a) == doctest::Approx(oracle::width(s, level)).epsilon(1e-8));
    }
    CHECK(s.area_from_level(R) == doctest::Approx(s.full_area()).epsilon(1e-14));
  }
}

TEST_CASE("gamma is the wall thrust per unit change of the full area") {
  // Circles grow in radius, rectangles in width at fixed height.
  for (const auto& s : {Section::circular(0.5), Section::rectangular(1.0, 0.8)}) {
    for (double f : {0.1, 0.4, 0.8, 0.97, 1.0}) {
      const double a = f * s.full_area();
      CHECK(s.gamma(a) == doctest::Approx(oracle::gamma(s, s.level_from_area(a))).epsilon(1e-10));
    }
  }
}

TEST_CASE("wet perimeter of the circle and the rectangle") {
  const Section c = Section::circular(0.4);
  for (double level : {-0.3, 0.0, 0.25}) {
    const double a = c.area_from_level(level);
    CHECK(c.wet_perimeter(a) == doctest::Approx(2.0 * 0.4 * std::acos(-level / 0.4)).epsilon(1e-10));
    CHECK(c.hydraulic_radius(a) == doctest::Approx(a / c.wet_perimeter(a)));
  }
  CHECK(c.hydraulic_radius(c.full_area()) == doctest::Approx(0.2).epsilon(1e-10));
  const Section r = Section::rectangular(2.0, 1.0);
  CHECK(r.wet_perimeter(0.6) == doctest::Approx(2.0 + 0.6).epsilon(1e-12));
}

TEST_CASE("pipe cells follow the segments") {
  SegmentSpec a{10.0, 5, Section::circular(0.5), Section::circular(1.0), 0.01};
  SegmentSpec b{4.0, 4, Section::circular(1.0), Section::circular(1.0), -0.02};
  const PipeGeometry g(3.0, {a, b});
  REQUIRE(g.interior_count() == 9);
  CHECK(g.length() == doctest::Approx(14.0));
  CHECK(g.cell(1).x == doctest::Approx(1.0));
  CHECK(g.cell(1).Z == doctest::Approx(3.0 - 0.01));
  CHECK(g.cell(1).section.radius == doctest::Approx(0.55));
  CHECK(g.cell(6).x == doctest::Approx(10.5));
  CHECK(g.cell(6).Z == doctest::Approx(2.9 + 0.02 * 0.5));
  CHECK(g.cell(0).x == doctest::Approx(-1.0));
  CHECK(g.cell(10).x == doctest::Approx(14.5));
  CHECK(g.cell(0).Z == doctest::Approx(3.01));
  CHECK(g.altitude(10.0) == doctest::Approx(2.9));
  CHECK(g.section_at(5.0).radius == doctest::Approx(0.75));
  for (const auto& c : g.cells()) CHECK(c.S == doctest::Approx(c.section.full_area()));
}

TEST_CASE("invalid geometry is rejected") {
  CHECK_THROWS(PipeGeometry(0.0, {}));
  CHECK_THROWS(PipeGeometry(0.0, {SegmentSpec{1.0, 0, Section::circular(1), Section::circular(1), 0}}));
  CHECK_THROWS(PipeGeometry(0.0, {SegmentSpec{1.0, 2, Section::circular(1), Section::rectangular(1, 1), 0}}));
}

}
