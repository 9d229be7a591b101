#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "pfs/boundary.hpp"

using namespace pfs;

namespace {

const ModelParams kParams{30.0, 0.0};

BoundaryInput input(CellState s, double h = 0.5) {
  BoundaryInput in;
  in.ghost_geo = oracle::cell(Section::circular(0.5), -h, 0.0, h);
  in.interior_geo = oracle::cell(Section::circular(0.5), 0.0, 0.0, h);
  in.ghost_prev = s;
  in.interior = s;
  return in;
}

BoundaryCondition bc(BoundaryEnd end, BoundaryKind kind, double v) {
  return {end, kind, TimeTable::constant(v)};
}

}  // namespace

TEST_SUITE("boundary") {

TEST_CASE("time tables interpolate linearly and clamp outside") {
  const TimeTable t({{0.0, 1.0}, {2.0, 3.0}, {4.0, 3.0}});
  CHECK(t(-1.0) == 1.0);
  CHECK(t(1.0) == doctest::Approx(2.0));
  CHECK(t(2.0) == 3.0);
  CHECK(t(3.5) == 3.0);
  CHECK(t(10.0) == 3.0);
  CHECK(TimeTable::constant(7.0)(123.0) == 7.0);
  CHECK_THROWS(TimeTable(std::vector<std::pair<double, double>>{}));
  CHECK_THROWS(TimeTable({{1.0, 0.0}, {1.0, 2.0}}));
}

TEST_CASE("boundary kinds round trip") {
  for (auto k : {BoundaryKind::level, BoundaryKind::discharge, BoundaryKind::head}) {
    CHECK(parse_boundary_kind(to_string(k)) == k);
  }
  CHECK_THROWS(parse_boundary_kind("weir"));
}

TEST_CASE("characteristic closures vanish at the interior state") {
  for (const Gibbs m : {Gibbs{0.3, 0.4, 1.1}, Gibbs{0.3, -0.4, 1.1}, Gibbs{0.9, 3.0, 1.0}, Gibbs{0.5, -2.5, 0.8}}) {
    for (auto order : {ClosureOrder::zero, ClosureOrder::one}) {
      CHECK(characteristic_closure(m, m, 0.0, order) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("no outgoing particles makes the closure degenerate") {
  // Supersonic inflow: every interior particle moves downstream.
  CHECK(closure_degenerate(Gibbs{0.3, 5.0, 1.0}, 0.0));
  CHECK_FALSE(closure_degenerate(Gibbs{0.3, 0.5, 1.0}, 0.0));
  CHECK(closure_degenerate(Gibbs{}, 0.0));
}

TEST_CASE("boundary cell indicator") {
  CHECK(boundary_indicator(0, 1.0, 1.0, 0) == 1);
  CHECK(boundary_indicator(0, 0.9, 1.0, 1) == 0);
  CHECK(boundary_indicator(1, 0.9, 1.0, 1) == 1);
  CHECK(boundary_indicator(1, 0.9, 1.0, 0) == 0);
  CHECK(boundary_indicator(1, 1.2, 1.0, 0) == 1);
}

TEST_CASE("boundary level of free surface and pressurized states") {
  const auto g = oracle::cell(Section::circular(0.5), 0, 2.0);
  CHECK(boundary_level(g, kParams, 0.5 * g.S, 0, 2.0) == doctest::Approx(2.0).scale(1.0).epsilon(1e-12));
  CHECK(boundary_level(g, kParams, g.S, 1, 2.0) == doctest::Approx(2.5));
  CHECK(boundary_level(g, kParams, 0.0, 0, 2.0) == doctest::Approx(1.5));
}

TEST_CASE("conditions matching the interior state reproduce it") {
  for (const CellState s : {CellState{0.35, 0.0, 0}, CellState{0.35, 0.12, 0}, CellState{0.6, 0.05, 0}}) {
    const BoundaryInput in = input(s);
    const double level = boundary_level(in.interior_geo, kParams, s.A, s.E, 0.0);
    const double head = total_head(in.interior_geo, kParams, s.A, s.Q, s.E, 0.0);
    for (auto end : {BoundaryEnd::upstream, BoundaryEnd::downstream}) {
      for (auto [kind, v] : {std::pair{BoundaryKind::level, level}, std::pair{BoundaryKind::discharge, s.Q},
                             std::pair{BoundaryKind::head, head}}) {
        CAPTURE(to_string(kind));
        CAPTURE(s.Q);
        const BoundaryResult r = solve_boundary(bc(end, kind, v), in, 0.0, kParams);
        REQUIRE(r.ok);
        CHECK(r.state.A == doctest::Approx(s.A).epsilon(1e-8));
        CHECK(r.state.Q == doctest::Approx(s.Q).epsilon(1e-8).scale(1.0));
        CHECK(r.state.E == 0);
      }
    }
  }
}

TEST_CASE("a raised upstream level drives inflow") {
  const BoundaryInput in = input({0.3, 0.0, 0});
  const double level = boundary_level(in.interior_geo, kParams, 0.3, 0, 0.0);
  const BoundaryResult up = solve_boundary(bc(BoundaryEnd::upstream, BoundaryKind::level, level + 0.1), in, 0.0, kParams);
  REQUIRE(up.ok);
  CHECK(up.state.A > 0.3);
  CHECK(up.state.Q > 0.0);
  const BoundaryResult down =
      solve_boundary(bc(BoundaryEnd::downstream, BoundaryKind::level, level + 0.1), in, 0.0, kParams);
  REQUIRE(down.ok);
  CHECK(down.state.Q < 0.0);
}

TEST_CASE("downstream conditions are the mirror of upstream ones") {
  const BoundaryInput in = input({0.3, 0.05, 0});
  BoundaryInput m = in;
  m.ghost_prev.Q = -0.05;
  m.interior.Q = -0.05;
  const BoundaryResult a = solve_boundary(bc(BoundaryEnd::downstream, BoundaryKind::discharge, 0.08), in, 0.0, kParams);
  const BoundaryResult b = solve_boundary(bc(BoundaryEnd::upstream, BoundaryKind::discharge, -0.08), m, 0.0, kParams);
  REQUIRE(a.ok);
  REQUIRE(b.ok);
  CHECK(a.state.A == doctest::Approx(b.state.A).epsilon(1e-12));
  CHECK(a.state.Q == doctest::Approx(-b.state.Q).epsilon(1e-12));
}

}
