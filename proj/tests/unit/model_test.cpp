#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "pfs/model.hpp"

using namespace pfs;

TEST_SUITE("model") {

TEST_CASE("pressure is continuous across the pressurization threshold") {
  const ModelParams p{30.0, 0.0};
  for (const auto& s : {Section::circular(0.6), Section::rectangular(1.0, 0.5)}) {
    const auto g = oracle::cell(s);
    CHECK(pressure(g, p, g.S, 0) == doctest::Approx(pressure(g, p, g.S, 1)).epsilon(1e-14));
    CHECK(pressure(g, p, g.S, 1) == doctest::Approx(p.g * oracle::hydrostatic(s, s.half_height())).epsilon(1e-10));
  }
}

TEST_CASE("pressurized pressure grows with c^2 and depressions follow the same law") {
  const ModelParams p{100.0, 0.0};
  const auto g = oracle::cell(Section::circular(0.5));
  const double p0 = pressure(g, p, g.S, 1);
  CHECK(pressure(g, p, 1.01 * g.S, 1) - p0 == doctest::Approx(p.c * p.c * 0.01 * g.S));
  CHECK(pressure(g, p, 0.9 * g.S, 1) - p0 == doctest::Approx(-p.c * p.c * 0.1 * g.S));
}

TEST_CASE("A b^2 is the pressure in the cell's own gauge") {
  const ModelParams p{20.0, 0.0};
  auto g = oracle::cell(Section::circular(0.5));
  g.cos_theta = std::cos(0.1);
  for (double f : {0.2, 0.9, 1.0}) {
    const double A = f * g.S;
    const double b = kinetic_speed(g, p, A, 0);
    CHECK(A * b * b == doctest::Approx(pressure(g, p, A, 0)).epsilon(1e-13));
  }
  for (double f : {0.95, 1.0, 1.05}) {
    const double A = f * g.S;
    const double b = kinetic_speed(g, p, A, 1);
    CHECK(A * b * b == doctest::Approx(pressure(g, p, A, 1) + p.c * p.c * g.S).epsilon(1e-13));
  }
  CHECK(kinetic_speed(g, p, 0.0, 0) == 0.0);
}

TEST_CASE("gravity wave celerity in a rectangle is sqrt(g depth)") {
  const ModelParams p{50.0, 0.0};
  const auto g = oracle::cell(Section::rectangular(2.0, 1.0));
  CHECK(celerity(g, p, 0.8, 0) == doctest::Approx(std::sqrt(p.g * 0.4)));
  CHECK(celerity(g, p, 2.0, 1) == p.c);
}

TEST_CASE("total head is u^2/2 + g(level + Z) for free surface flow") {
  const ModelParams p{10.0, 0.0};
  const auto g = oracle::cell(Section::rectangular(1.0, 2.0), 0.0, 5.0);
  CHECK(total_head(g, p, 0.5, 0.25, 0, 5.0) == doctest::Approx(0.125 + p.g * (-0.5 + 5.0)));
  CHECK(total_head(g, p, 2.2, 0.0, 1, 5.0) ==
        doctest::Approx(p.g * (1.0 + 5.0) + p.c * p.c * std::log(1.1)));
  CHECK_THROWS(total_head(g, p, 0.0, 0.0, 0, 0.0));
}

TEST_CASE("friction follows Manning-Strickler and vanishes without Ks") {
  const auto g = oracle::cell(Section::circular(0.5));
  const double rh = g.section.hydraulic_radius(0.5 * g.S);
  CHECK(friction_coefficient(g, ModelParams{10.0, 80.0}, 0.5 * g.S, 0) ==
        doctest::Approx(1.0 / (6400.0 * std::pow(rh, 4.0 / 3.0))));
  CHECK(friction_coefficient(g, ModelParams{10.0, 0.0}, 0.5 * g.S, 0) == 0.0);
  CHECK(friction_coefficient(g, ModelParams{10.0, INFINITY}, 0.5 * g.S, 0) == 0.0);
  CHECK(friction_coefficient(g, ModelParams{10.0, 80.0}, 0.0, 0) == 0.0);
}

TEST_CASE("dynamic slope accumulates the friction integrand") {
  const ModelParams p{10.0, 50.0};
  std::vector<CellGeometry> geo;
  std::vector<CellState> cells;
  for (int i = 0; i < 4; ++i) {
    geo.push_back(oracle::cell(Section::circular(0.5), i * 2.0, -0.1 * i));
    cells.push_back({0.3, 0.3, 0});
  }
  const auto Z = dynamic_slope(cells, geo, p);
  const double k = friction_coefficient(geo[0], p, 0.3, 0);
  for (int i = 0; i < 4; ++i) CHECK(Z[i] == doctest::Approx(-0.1 * i + 2.0 * i * k).epsilon(1e-13));
  const auto Z0 = dynamic_slope(cells, geo, ModelParams{10.0, 0.0});
  for (int i = 0; i < 4; ++i) CHECK(Z0[i] == geo[i].Z);
}

}
