#include "pfs/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

namespace pfs {

TimeTable::TimeTable(std::vector<std::pair<double, double>> points) : points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("TimeTable: empty table");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i].first > points_[i - 1].first)) {
      throw std::invalid_argument("TimeTable: times must be strictly increasing");
    }
  }
}

double TimeTable::operator()(double t) const {
  if (points_.empty()) return 0.0;
  if (t <= points_.front().first) return points_.front().second;
  if (t >= points_.back().first) return points_.back().second;
  const auto it = std::upper_bound(points_.begin(), points_.end(), t,
                                   [](double v, const auto& pt) { return v < pt.first; });
  const auto& [t1, v1] = *it;
  const auto& [t0, v0] = *(it - 1);
  return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
}

const char* to_string(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::level: return "level";
    case BoundaryKind::discharge: return "discharge";
    default: return "head";
  }
}

BoundaryKind parse_boundary_kind(const std::string& s) {
  if (s == "level") return BoundaryKind::level;
  if (s == "discharge") return BoundaryKind::discharge;
  if (s == "head") return BoundaryKind::head;
  throw std::invalid_argument("parse_boundary_kind: unknown kind '" + s + "'");
}

namespace {

struct Bounds {
  double lo, hi;
};

Bounds clipped(const Gibbs& m, double xi) {
  return {std::min(xi, m.lower()), std::min(xi, m.upper())};
}

double xi_ghost(double G) { return -std::sqrt(std::max(0.0, G)); }
double xi_interior(double G) { return -std::sqrt(std::max(0.0, -G)); }

using Fn = std::function<double(double)>;

std::optional<double> refine(const Fn& f, double a, double b, double fa, double fb) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  boost::uintmax_t iters = 200;
  const auto tol = boost::math::tools::eps_tolerance<double>(52);
  try {
    const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
    return 0.5 * (r.first + r.second);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// Root of f in [lo, hi] nearest to x0, found on a grid that refines
// geometrically around x0.
std::optional<double> root_near(const Fn& f, double x0, double lo, double hi) {
  if (!(hi > lo)) return std::nullopt;
  x0 = std::clamp(x0, lo, hi);
  std::vector<double> up{x0}, down{x0};
  const double scale = std::max(std::abs(x0), hi * 1e-6);
  for (double d = 1e-10 * scale;; d *= 1.6) {
    const bool more_up = up.back() < hi, more_down = down.back() > lo;
    if (!more_up && !more_down) break;
    if (more_up) up.push_back(std::min(hi, x0 + d));
    if (more_down) down.push_back(std::max(lo, x0 - d));
  }
  auto eval = [&](double x) {
    const double v = f(x);
    return std::isfinite(v) ? std::optional<double>(v) : std::nullopt;
  };
  std::optional<double> fu = eval(x0), fd = fu;
  if (fu && *fu == 0.0) return x0;
  std::size_t iu = 0, id = 0;
  while (iu + 1 < up.size() || id + 1 < down.size()) {
    if (iu + 1 < up.size()) {
      const auto fn = eval(up[iu + 1]);
      if (fu && fn && (*fu) * (*fn) <= 0.0) return refine(f, up[iu], up[iu + 1], *fu, *fn);
      fu = fn;
      ++iu;
    }
    if (id + 1 < down.size()) {
      const auto fn = eval(down[id + 1]);
      if (fd && fn && (*fd) * (*fn) <= 0.0) return refine(f, down[id + 1], down[id], *fn, *fd);
      fd = fn;
      ++id;
    }
  }
  return std::nullopt;
}

bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

class UpstreamSolver {
 public:
  UpstreamSolver(const BoundaryInput& in, const ModelParams& p, double value, BoundaryKind kind)
      : in_(in), p_(p), value_(value), kind_(kind) {
    G_ = 2.0 * p.g * (in.Z_interior - in.Z_ghost);
  }

  BoundaryResult solve(const NewtonOptions& opt) {
    const auto& gg = in_.ghost_geo;
    E0_ = boundary_indicator(in_.ghost_prev.E, in_.ghost_prev.A, gg.S, in_.interior.E);
    if (kind_ == BoundaryKind::level) E0_ = level_type();

    BoundaryResult res;
    CellState interior = in_.interior;
    if (E0_ != interior.E) {
      InterfaceData d{gg, in_.interior_geo, {in_.ghost_prev.A, in_.ghost_prev.Q, E0_}, interior,
                      in_.Z_ghost, in_.Z_interior};
      const TransitionSolution s = solve_transition(d, TransitionMethod::fka, p_, opt);
      if (s.ok && s.w >= 0.0) {
        interior = s.minus;
        res.transition = true;
      } else {
        // No front entering the pipe: the fictitious cell takes the interior's flow type.
        E0_ = interior.E;
      }
    }
    interior_ = interior;
    m1_ = gibbs_state(interior.E == E0_ ? in_.interior_geo : gg, p_, interior);

    if (auto eq = equilibrium_candidate()) {
      res.state = *eq;
      res.note = "equilibrium";
      return res;
    }

    std::optional<CellState> st;
    if (m1_.empty()) {
      st = dry_interior();
      res.note = "dry interior";
    } else if (interior.Q / interior.A + celerity(in_.interior_geo, p_, interior.A, interior.E) <= 0.0) {
      st = CellState{interior.A, interior.Q, interior.E};
      res.note = "outgoing supercritical";
    } else if (closure_degenerate(m1_, G_ / (2.0 * p_.g), p_.g)) {
      st = critical();
      res.note = "incoming supercritical";
    } else {
      st = regular();
    }
    if (!st) {
      res.ok = false;
      res.state = in_.ghost_prev;
      res.note = std::string("boundary solve failed (") + to_string(kind_) + ")";
      return res;
    }
    res.state = *st;
    return res;
  }

 private:
  const CellGeometry& gg() const { return in_.ghost_geo; }

  Gibbs ghost(double A, double Q, int E) const { return gibbs_state(gg(), p_, {A, Q, E}); }

  double closure(double A, double Q, int E, ClosureOrder o) const {
    return characteristic_closure(ghost(A, Q, E), m1_, G_ / (2.0 * p_.g), o, p_.g);
  }

  double head(double A, double Q, int E) const { return total_head(gg(), p_, A, Q, E, in_.Z_ghost); }

  double amin() const { return 1e-9 * gg().S; }
  double amax(int E) const { return E == 1 ? 1e3 * gg().S : gg().S; }

  int level_type() const {
    const double crown = in_.Z_ghost + gg().section.half_height() * gg().cos_theta;
    if (value_ >= crown) return 1;
    return E0_;
  }

  double area_for_level(int E) const {
    const auto& g = gg();
    if (E == 1) {
      const double crown = in_.Z_ghost + g.section.half_height() * g.cos_theta;
      return g.S * std::exp(p_.g / (p_.c * p_.c) * (value_ - crown));
    }
    const double level = (value_ - in_.Z_ghost) / g.cos_theta;
    if (level <= -g.section.half_height()) return 0.0;
    return g.section.area_from_level(std::min(level, g.section.half_height()));
  }

  // Fictitious cell in equilibrium with the interior: same Q and total head.
  std::optional<CellState> equilibrium_candidate() const {
    if (m1_.empty() || interior_.E != E0_) return std::nullopt;
    const double Q = interior_.Q;
    double A;
    if (G_ == 0.0 && gg().S == in_.interior_geo.S) {
      A = interior_.A;
    } else {
      const double target = total_head(in_.interior_geo, p_, interior_.A, Q, interior_.E, in_.Z_interior);
      const auto r = root_near([&](double a) { return head(a, Q, E0_) - target; }, interior_.A,
                               amin(), amax(E0_));
      if (!r) return std::nullopt;
      A = *r;
    }
    if (E0_ == 0 && A > gg().S) return std::nullopt;
    bool match = false;
    switch (kind_) {
      case BoundaryKind::level: match = close(boundary_level(gg(), p_, A, E0_, in_.Z_ghost), value_, 1e-10); break;
      case BoundaryKind::discharge: match = std::abs(Q - value_) <= 1e-12 * (1.0 + std::abs(value_)); break;
      case BoundaryKind::head: match = close(head(A, Q, E0_), value_, 1e-10); break;
    }
    if (!match) return std::nullopt;
    return CellState{A, Q, E0_};
  }

  std::optional<CellState> dry_interior() {
    if (kind_ == BoundaryKind::discharge && !(value_ > 0.0)) return CellState{0.0, 0.0, 0};
    return critical();
  }

  // Critical inflow u0 = c(A0) together with the prescribed quantity.
  std::optional<CellState> critical() {
    auto crit_q = [&](double A, int E) { return A * celerity(gg(), p_, A, E); };
    for (int E : {E0_, 1 - E0_}) {
      if (kind_ == BoundaryKind::level && E != E0_) break;
      std::optional<double> A;
      switch (kind_) {
        case BoundaryKind::level: {
          const double a = area_for_level(E);
          if (!(a > amin())) return CellState{0.0, 0.0, 0};
          return CellState{a, crit_q(a, E), E};
        }
        case BoundaryKind::discharge:
          if (!(value_ > 0.0)) return std::nullopt;
          A = root_near([&](double a) { return crit_q(a, E) - value_; }, gg().S * 0.5, amin(), amax(E));
          break;
        case BoundaryKind::head:
          A = root_near([&](double a) { return head(a, crit_q(a, E), E) - value_; }, gg().S * 0.5,
                        amin(), amax(E));
          break;
      }
      if (A) return CellState{*A, crit_q(*A, E), E};
    }
    return std::nullopt;
  }

  // Q0 from the order-1 closure at fixed A0; the closure is monotone in u0.
  std::optional<double> discharge_from_order1(double A, int E) const {
    const Gibbs g0 = ghost(A, 0.0, E);
    if (g0.empty()) return 0.0;
    const double u_hi = xi_ghost(G_) + kSqrt3 * g0.b;
    auto f = [&](double u) { return closure(A, A * u, E, ClosureOrder::one); };
    const double f_hi = f(u_hi);
    double step = std::max(g0.b, 1e-6), u_lo = u_hi - step, f_lo = f(u_lo);
    for (int k = 0; k < 200 && f_lo > 0.0; ++k) {
      step *= 2.0;
      u_lo = u_hi - step;
      f_lo = f(u_lo);
    }
    if (!(f_lo <= 0.0) || !(f_hi >= 0.0)) return std::nullopt;
    const auto u = refine(f, u_lo, u_hi, f_lo, f_hi);
    if (!u) return std::nullopt;
    return A * *u;
  }

  std::optional<CellState> regular() {
    switch (kind_) {
      case BoundaryKind::level: {
        const double A = area_for_level(E0_);
        if (!(A > amin())) return CellState{0.0, 0.0, 0};
        const auto Q = discharge_from_order1(A, E0_);
        if (!Q) return std::nullopt;
        return CellState{A, *Q, E0_};
      }
      case BoundaryKind::discharge: {
        for (int E : {E0_, 1 - E0_}) {
          const auto A = root_near([&](double a) { return closure(a, value_, E, ClosureOrder::zero); },
                                   interior_.A, amin(), amax(E));
          if (A) return CellState{*A, value_, E};
        }
        return std::nullopt;
      }
      case BoundaryKind::head: {
        for (int E : {E0_, 1 - E0_}) {
          auto f = [&](double a) {
            const auto q = discharge_from_order1(a, E);
            return q ? head(a, *q, E) - value_ : std::numeric_limits<double>::quiet_NaN();
          };
          const auto A = root_near(f, interior_.A, amin(), amax(E));
          if (A) {
            const auto Q = discharge_from_order1(*A, E);
            if (Q) return CellState{*A, *Q, E};
          }
        }
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  const BoundaryInput& in_;
  const ModelParams& p_;
  double value_;
  BoundaryKind kind_;
  double G_ = 0.0;
  int E0_ = 0;
  CellState interior_;
  Gibbs m1_;
};

CellState flip(CellState s) {
  s.Q = -s.Q;
  return s;
}

}  // namespace

double characteristic_closure(const Gibbs& ghost, const Gibbs& interior, double dphi,
                              ClosureOrder order, double g) {
  const double G = 2.0 * g * dphi;
  double lhs = 0.0, rhs = 0.0;
  if (!ghost.empty()) {
    const Bounds b0 = clipped(ghost, xi_ghost(G));
    lhs = ghost.A / ghost.b *
          (order == ClosureOrder::zero ? b0.hi - b0.lo : b0.hi * b0.hi - b0.lo * b0.lo);
  }
  if (!interior.empty()) {
    const Bounds b1 = clipped(interior, xi_interior(G));
    rhs = interior.A / interior.b *
          (order == ClosureOrder::zero
               ? std::sqrt(std::max(0.0, b1.lo * b1.lo + G)) - std::sqrt(std::max(0.0, b1.hi * b1.hi + G))
               : b1.hi * b1.hi - b1.lo * b1.lo);
  }
  return lhs - rhs;
}

bool closure_degenerate(const Gibbs& interior, double dphi, double g) {
  if (interior.empty()) return true;
  const Bounds b1 = clipped(interior, xi_interior(2.0 * g * dphi));
  return b1.lo == b1.hi;
}

int boundary_indicator(int E_prev, double A_prev, double S, int E_neighbor) {
  if (A_prev >= S) return 1;
  return E_prev == 0 ? 0 : E_neighbor * E_neighbor;
}

double boundary_level(const CellGeometry& geo, const ModelParams& p, double A, int E, double Zdyn) {
  const double R = geo.section.half_height();
  if (E == 1) {
    return p.c * p.c / p.g * std::log(A / geo.S) + R * geo.cos_theta + Zdyn;
  }
  if (is_dry(geo, A)) return Zdyn - R * geo.cos_theta;
  return geo.section.level_from_area(std::min(A, geo.S)) * geo.cos_theta + Zdyn;
}

BoundaryResult solve_boundary(const BoundaryCondition& bc, const BoundaryInput& in, double t,
                              const ModelParams& p, const NewtonOptions& opt) {
  double value = bc.value(t);
  if (bc.end == BoundaryEnd::upstream) return UpstreamSolver(in, p, value, bc.kind).solve(opt);
  BoundaryInput m = in;
  m.ghost_prev = flip(in.ghost_prev);
  m.interior = flip(in.interior);
  if (bc.kind == BoundaryKind::discharge) value = -value;
  BoundaryResult r = UpstreamSolver(m, p, value, bc.kind).solve(opt);
  r.state = flip(r.state);
  return r;
}

}  // namespace pfs
