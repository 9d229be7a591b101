#include "pfs/transition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pfs {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Scales {
  double A = 1.0;
  double V = 1.0;
  double Q() const { return A * V; }
  double F() const { return A * V * V; }
};

Scales scales_of(const InterfaceData& d, const ModelParams& p) {
  Scales s;
  s.A = std::max(d.left_geo.S, d.right_geo.S);
  double v = 1e-8;
  for (const auto* side : {&d.left, &d.right}) {
    const auto& geo = side == &d.left ? d.left_geo : d.right_geo;
    if (side->A > 0.0) {
      v = std::max(v, std::abs(side->Q / side->A));
      v = std::max(v, kinetic_speed(geo, p, side->A, side->E));
    }
  }
  s.V = v;
  return s;
}

double f2(const CellGeometry& geo, const ModelParams& p, double A, double Q, int E) {
  if (!(A > 0.0)) return kNaN;
  return flux_momentum(geo, p, A, Q, E);
}

double head_no_slope(const CellGeometry& geo, const ModelParams& p, double A, double Q, int E) {
  if (!(A > 0.0)) return kNaN;
  return total_head(geo, p, A, Q, E, 0.0);
}

bool admissible_area(const CellGeometry& geo, double A, int E) {
  if (!(A > 0.0) || !std::isfinite(A)) return false;
  return E == 1 || A <= geo.S * (1.0 + 1e-12);
}

TransitionSolution failed(TransitionMethod m, std::string why) {
  TransitionSolution s;
  s.method = m;
  s.ok = false;
  s.failure = std::move(why);
  return s;
}

// Kinetic bound families; "c(A)" of the moment equations is the kinetic speed b.
struct Half {
  double A, u, b;
};

Half half_of(const CellGeometry& geo, const ModelParams& p, double A, double Q, int E) {
  if (!(A > 0.0)) return {kNaN, kNaN, kNaN};
  return {A, Q / A, kinetic_speed(geo, p, A, E)};
}

}  // namespace

const char* to_string(TransitionMethod m) { return m == TransitionMethod::ghost ? "ghost" : "fka"; }

TransitionMethod parse_method(const std::string& s) {
  if (s == "ghost") return TransitionMethod::ghost;
  if (s == "fka") return TransitionMethod::fka;
  throw std::invalid_argument("parse_method: unknown transition method '" + s + "'");
}

std::vector<std::size_t> detect_transitions(const std::vector<int>& E) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i + 1 < E.size(); ++i) {
    if (E[i] != E[i + 1]) out.push_back(i);
  }
  return out;
}

std::optional<double> predicted_speed(const CellState& l, const CellState& r, double area_scale) {
  const double dA = r.A - l.A;
  if (!(std::abs(dA) >= 1e-12 * area_scale)) return std::nullopt;
  return (r.Q - l.Q) / dA;
}

InterfaceData mirror(const InterfaceData& d) {
  InterfaceData m;
  m.left_geo = d.right_geo;
  m.right_geo = d.left_geo;
  m.left = {d.right.A, -d.right.Q, d.right.E};
  m.right = {d.left.A, -d.left.Q, d.left.E};
  m.Zl = d.Zr;
  m.Zr = d.Zl;
  return m;
}

TransitionSolution mirror(const TransitionSolution& s) {
  TransitionSolution m = s;
  m.w = -s.w;
  m.minus = {s.plus.A, -s.plus.Q, s.plus.E};
  m.plus = {s.minus.A, -s.minus.Q, s.minus.E};
  return m;
}

double front_barrier(const InterfaceData& d, const ModelParams& p) {
  return interface_barrier(d.left_geo, d.right_geo, p, d.Zl, d.Zr, d.left.A, d.right.A, 1);
}

//----------------------------------------------------------------------------
// Ghost waves: pressurized state moving downstream. U+ = U_{i+1}, unknown U-.

TransitionSolution ghost_pressurized_downstream(const InterfaceData& d, const ModelParams& p,
                                                const NewtonOptions& opt) {
  const auto M = TransitionMethod::ghost;
  if (d.left.E != 1 || d.right.E != 0) return failed(M, "ghost_pressurized_downstream: wrong flow types");
  const Scales sc = scales_of(d, p);
  const auto& gl = d.left_geo;
  const auto& gr = d.right_geo;
  const double c = p.c;
  const double ul = velocity(d.left.A, d.left.Q);
  const double F2r = f2(gr, p, d.right.A, d.right.Q, 0);

  const Section mid = lerp(gl.section, gr.section, 0.5);
  const double S_mid = 0.5 * (gl.S + gr.S);
  const double cos_mid = 0.5 * (gl.cos_theta + gr.cos_theta);

  auto system = [&](const Eigen::VectorXd& x) {
    const double Am = x(0) * sc.A, Qm = x(1) * sc.Q();
    Eigen::VectorXd r(2);
    if (!(Am > 0.0)) return Eigen::VectorXd(Eigen::VectorXd::Constant(2, kNaN));
    const double ut = 0.5 * (ul + Qm / Am);
    const double At = 0.5 * (d.left.A + Am);
    const double Psi = p.g * mid.full_level_sensitivity() * cos_mid - c * c * At / S_mid;
    const double psi = d.Zr - d.Zl + mid.half_height() * (gr.cos_theta - gl.cos_theta) +
                       Psi / (p.g * At) * (gr.S - gl.S);
    const double dQ = d.right.Q - Qm;
    r(0) = (F2r - f2(gl, p, Am, Qm, 1) - dQ * dQ / (d.right.A - Am)) / sc.F();
    r(1) = (Qm - d.left.Q - (Am - d.left.A) * (ut - c) + p.g * psi * At / (c + ut)) / sc.Q();
    return r;
  };

  Eigen::VectorXd x0(2);
  x0 << d.left.A / sc.A, d.left.Q / sc.Q();
  const NewtonResult res = solve_newton(system, x0, opt);
  if (!res.converged) return failed(M, "ghost_pressurized_downstream: no convergence");

  TransitionSolution s;
  s.method = M;
  s.residual = res.residual;
  s.minus = {res.x(0) * sc.A, res.x(1) * sc.Q(), 1};
  s.plus = d.right;
  if (!admissible_area(gl, s.minus.A, 1)) return failed(M, "ghost_pressurized_downstream: A- not positive");
  s.w = (s.plus.Q - s.minus.Q) / (s.plus.A - s.minus.A);
  const double ut_l = 0.5 * (ul + s.minus.Q / s.minus.A);
  const double lo = velocity(d.right.A, d.right.Q) + celerity(gr, p, d.right.A, 0);
  const double hi = ut_l + c;
  if (!(lo < s.w && s.w < hi)) return failed(M, "ghost_pressurized_downstream: characteristic ordering violated");
  s.ok = true;
  return s;
}

//----------------------------------------------------------------------------
// Ghost waves: free surface state moving downstream, w = w_pred.

TransitionSolution ghost_freesurface_downstream(const InterfaceData& d, const ModelParams& p,
                                                const NewtonOptions& opt) {
  const auto M = TransitionMethod::ghost;
  if (d.left.E != 0 || d.right.E != 1) return failed(M, "ghost_freesurface_downstream: wrong flow types");
  const Scales sc = scales_of(d, p);
  const auto wp = predicted_speed(d.left, d.right, sc.A);
  if (!wp) return failed(M, "ghost_freesurface_downstream: degenerate predicted speed");
  const double w = *wp;
  const auto& gl = d.left_geo;
  const auto& gr = d.right_geo;
  const double c = p.c;
  const double ur = velocity(d.right.A, d.right.Q);

  auto system = [&](const Eigen::VectorXd& x) {
    const double Am = x(0) * sc.A, Qm = x(1) * sc.Q();
    const double Ap = x(2) * sc.A, Qp = x(3) * sc.Q();
    Eigen::VectorXd r(4);
    if (!(Am > 0.0) || !(Ap > 0.0)) return Eigen::VectorXd(Eigen::VectorXd::Constant(4, kNaN));
    const double up = Qp / Ap, um = Qm / Am;
    const double ut = 0.5 * (up + ur);
    r(0) = ((d.right.Q - Qp) - (d.right.A - Ap) * (ut + c)) / sc.Q();
    r(1) = ((f2(gr, p, Ap, Qp, 1) - f2(gl, p, Am, Qm, 0)) - w * (Qp - Qm)) / sc.F();
    r(2) = (head_no_slope(gr, p, Ap, Qp, 1) - head_no_slope(gl, p, Am, Qm, 0) - w * (up - um)) /
           (sc.V * sc.V);
    r(3) = ((Qp - Qm) - w * (Ap - Am)) / sc.Q();
    return r;
  };

  Eigen::VectorXd x0(4);
  x0 << d.left.A / sc.A, d.left.Q / sc.Q(), d.right.A / sc.A, d.right.Q / sc.Q();
  const NewtonResult res = solve_newton(system, x0, opt);
  if (!res.converged) return failed(M, "ghost_freesurface_downstream: no convergence");

  TransitionSolution s;
  s.method = M;
  s.residual = res.residual;
  s.w = w;
  s.minus = {res.x(0) * sc.A, res.x(1) * sc.Q(), 0};
  s.plus = {res.x(2) * sc.A, res.x(3) * sc.Q(), 1};
  if (!admissible_area(gl, s.minus.A, 0) || !admissible_area(gr, s.plus.A, 1)) {
    return failed(M, "ghost_freesurface_downstream: inadmissible areas");
  }
  const double ut_l = 0.5 * (velocity(d.left.A, d.left.Q) + s.minus.Q / s.minus.A);
  const double At_l = 0.5 * (d.left.A + s.minus.A);
  const double lo = ut_l + celerity(gl, p, At_l, 0);
  const double hi = 0.5 * (s.plus.Q / s.plus.A + ur) + c;
  if (!(lo < w && w < hi)) return failed(M, "ghost_freesurface_downstream: characteristic ordering violated");
  s.ok = true;
  return s;
}

//----------------------------------------------------------------------------
// Full kinetic approach.

namespace {

struct FkaBounds {
  double wp, wpp;
};

FkaBounds effective_bounds(double w, double G) {
  return {std::max(w, std::sqrt(std::max(0.0, -G))),
          std::max(std::sqrt(std::max(0.0, w * w + G)), std::sqrt(std::max(0.0, G)))};
}

// Zone i matching through the barrier (order 0 and 1).
void zone_minus(const Half& m, const Half& i, double w, double G, double& e0, double& e1) {
  const FkaBounds fb = effective_bounds(w, G);
  const double gm = std::max(fb.wp, m.u - kSqrt3 * m.b);
  const double dm = std::max(fb.wp, m.u + kSqrt3 * m.b);
  const double gi = std::max(fb.wpp, i.u - kSqrt3 * i.b);
  const double di = std::max(fb.wpp, i.u + kSqrt3 * i.b);
  e0 = m.A / m.b * (dm - gm) -
       i.A / i.b * (std::sqrt(std::max(0.0, di * di - G)) - std::sqrt(std::max(0.0, gi * gi - G)));
  e1 = m.A / m.b * (dm * dm - gm * gm) - i.A / i.b * (di * di - gi * gi);
}

// Zone i+1 matching below w (order 0 and the simplified order 1).
void zone_plus(const Half& m, const Half& r, double w, double& e0, double& e1) {
  const double ap = std::min(w, m.u - kSqrt3 * m.b);
  const double bp = std::min(w, m.u + kSqrt3 * m.b);
  const double ar = std::min(w, r.u - kSqrt3 * r.b);
  const double br = std::min(w, r.u + kSqrt3 * r.b);
  e0 = m.A / m.b * (bp - ap) - r.A / r.b * (br - ar);
  e1 = (ap + bp) - (ar + br);
}

}  // namespace

TransitionSolution fka_downstream(const InterfaceData& d, double dphi, const ModelParams& p,
                                  const NewtonOptions& opt) {
  const auto M = TransitionMethod::fka;
  if (d.left.E == d.right.E) return failed(M, "fka_downstream: not a transition");
  const Scales sc = scales_of(d, p);
  const auto wp = predicted_speed(d.left, d.right, sc.A);
  if (!wp) return failed(M, "fka_downstream: degenerate predicted speed");
  const double G = 2.0 * p.g * dphi;
  const auto& gl = d.left_geo;
  const auto& gr = d.right_geo;
  const int El = d.left.E, Er = d.right.E;
  const Half hl = half_of(gl, p, d.left.A, d.left.Q, El);
  const Half hr = half_of(gr, p, d.right.A, d.right.Q, Er);

  Eigen::VectorXd x0(5);
  x0 << *wp / sc.V, d.left.A / sc.A, d.left.Q / sc.Q(), d.right.A / sc.A, d.right.Q / sc.Q();

  auto unpack = [&](const Eigen::VectorXd& x, double& w, Half& hm, Half& hp) {
    w = x(0) * sc.V;
    hm = half_of(gl, p, x(1) * sc.A, x(2) * sc.Q(), El);
    hp = half_of(gr, p, x(3) * sc.A, x(4) * sc.Q(), Er);
  };
  auto rh = [&](double w, const Half& hm, const Half& hp, Eigen::VectorXd& r) {
    const double Qm = hm.A * hm.u, Qp = hp.A * hp.u;
    r(0) = ((Qp - Qm) - w * (hp.A - hm.A)) / sc.Q();
    r(1) = ((f2(gr, p, hp.A, Qp, Er) - f2(gl, p, hm.A, Qm, El)) - w * (Qp - Qm)) / sc.F();
  };

  auto full_system = [&](const Eigen::VectorXd& x) {
    double w;
    Half hm, hp;
    unpack(x, w, hm, hp);
    Eigen::VectorXd r(5);
    if (!(hm.A > 0.0) || !(hp.A > 0.0)) return Eigen::VectorXd(Eigen::VectorXd::Constant(5, kNaN));
    rh(w, hm, hp, r);
    double e0, e1, f0, f1;
    zone_minus(hm, hl, w, G, e0, e1);
    zone_plus(hp, hr, w, f0, f1);
    r(2) = e0 / sc.A;
    r(3) = e1 / (sc.A * sc.V);
    r(4) = f0 / sc.A;
    return r;
  };

  // Under-determined zone-i equations: bounds frozen at w_pred, head jump instead.
  const double wfix = *wp;
  auto critical_system = [&](const Eigen::VectorXd& x) {
    double w;
    Half hm, hp;
    unpack(x, w, hm, hp);
    Eigen::VectorXd r(5);
    if (!(hm.A > 0.0) || !(hp.A > 0.0)) return Eigen::VectorXd(Eigen::VectorXd::Constant(5, kNaN));
    rh(w, hm, hp, r);
    const double Qm = hm.A * hm.u, Qp = hp.A * hp.u;
    r(2) = (head_no_slope(gr, p, hp.A, Qp, Er) - head_no_slope(gl, p, hm.A, Qm, El) -
            w * (hp.u - hm.u)) / (sc.V * sc.V);
    double f0, f1;
    zone_plus(hp, hr, wfix, f0, f1);
    r(3) = f0 / sc.A;
    r(4) = f1 / sc.V;
    return r;
  };

  auto finish = [&](const NewtonResult& res) {
    TransitionSolution s;
    s.method = M;
    s.residual = res.residual;
    s.w = res.x(0) * sc.V;
    s.minus = {res.x(1) * sc.A, res.x(2) * sc.Q(), El};
    s.plus = {res.x(3) * sc.A, res.x(4) * sc.Q(), Er};
    s.ok = res.converged && admissible_area(gl, s.minus.A, El) && admissible_area(gr, s.plus.A, Er) &&
           s.w >= 0.0;
    if (!s.ok) {
      s.failure = !res.converged ? "fka_downstream: no convergence"
                  : s.w < 0.0    ? "fka_downstream: upstream-moving root"
                                 : "fka_downstream: inadmissible areas";
    }
    return s;
  };

  // The moment equations are only piecewise smooth in w, so Newton can stall on a
  // kink; restart from speeds spread around the predicted one and from the
  // characteristic speeds of the downstream state.
  std::vector<double> seeds;
  // With U- = left and A+ = A_r the Rankine-Hugoniot pair is a quadratic in w.
  {
    const double dA = d.right.A - d.left.A, Ql = d.left.Q;
    const double qa = dA * dA / d.right.A - dA;
    const double qb = 2.0 * Ql * dA / d.right.A;
    const double qc = Ql * Ql / d.right.A + f2(gr, p, d.right.A, 0.0, Er) - f2(gl, p, d.left.A, Ql, El);
    const double disc = qb * qb - 4.0 * qa * qc;
    if (qa != 0.0 && disc >= 0.0) {
      for (double sg : {1.0, -1.0}) {
        const double w = (-qb + sg * std::sqrt(disc)) / (2.0 * qa);
        if (w >= 0.0 && std::isfinite(w)) seeds.push_back(w);
      }
    }
  }
  for (double k : {1.0, 1.5, 0.5, 2.0, 3.0, 0.25, 5.0}) seeds.push_back(k * *wp);
  const double cr = celerity(gr, p, d.right.A, Er);
  for (double k : {1.0, 1.5, 2.0, 0.5, 3.0}) seeds.push_back(hr.u + k * cr);
  auto solve_seeded = [&](const NonlinearSystem& f) {
    TransitionSolution first;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      Eigen::VectorXd x = x0;
      x(0) = seeds[k] / sc.V;
      TransitionSolution s = finish(solve_newton(f, x, opt));
      if (s.ok) return s;
      if (k == 0) first = s;
    }
    return first;
  };

  const bool critical = El == 0 && effective_bounds(wfix, G).wp > hl.u + kSqrt3 * hl.b;
  if (!critical) {
    TransitionSolution s = solve_seeded(full_system);
    if (s.ok || El == 1) return s;
  }
  return solve_seeded(critical_system);
}

//----------------------------------------------------------------------------

TransitionSolution solve_transition(const InterfaceData& d, TransitionMethod method,
                                    const ModelParams& p, const NewtonOptions& opt) {
  if (d.left.E == d.right.E) return failed(method, "solve_transition: not a transition");
  const double area_scale = std::max(d.left_geo.S, d.right_geo.S);
  const auto wp = predicted_speed(d.left, d.right, area_scale);
  if (!wp) return failed(method, "solve_transition: degenerate predicted speed");
  auto downstream = [&](const InterfaceData& dd) {
    TransitionSolution s;
    if (method == TransitionMethod::fka) {
      s = fka_downstream(dd, front_barrier(dd, p), p, opt);
    } else if (dd.left.E == 1) {
      s = ghost_pressurized_downstream(dd, p, opt);
    } else {
      s = ghost_freesurface_downstream(dd, p, opt);
    }
    if (s.ok && s.w < 0.0) {
      s.ok = false;
      s.failure = "solve_transition: front moves against the solved orientation";
    }
    return s;
  };
  // The sign of the predicted speed picks the orientation; a near-zero area jump
  // makes it unreliable, so the other orientation is tried when the first fails.
  const bool flip = *wp < 0.0;
  TransitionSolution s = flip ? mirror(downstream(mirror(d))) : downstream(d);
  if (s.ok) return s;
  TransitionSolution t = flip ? downstream(d) : mirror(downstream(mirror(d)));
  return t.ok ? t : s;
}

double rankine_hugoniot_residual(const TransitionSolution& s, const InterfaceData& d,
                                 const ModelParams& p) {
  const Scales sc = scales_of(d, p);
  const auto& m = s.minus;
  const auto& pl = s.plus;
  const double r1 = (pl.Q - m.Q) - s.w * (pl.A - m.A);
  const double r2 = (f2(d.right_geo, p, pl.A, pl.Q, pl.E) - f2(d.left_geo, p, m.A, m.Q, m.E)) -
                    s.w * (pl.Q - m.Q);
  const double v = std::max(std::abs(r1) / sc.Q(), std::abs(r2) / sc.F());
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

namespace {

// Pressurized Gibbs states carry A b^2 = p + c^2 S, so the kinetic momentum flux of a
// pair of them exceeds F2 by c^2 S. Across a front each cell must see the flux in its
// own gauge; `offset` is the excess carried by the fluxes as computed.
InterfaceFluxes to_cell_gauge(InterfaceFluxes F, double offset, const InterfaceData& d,
                              const ModelParams& p) {
  const double c2 = p.c * p.c;
  F.minus.momentum += c2 * d.left_geo.S * d.left.E - offset;
  F.plus.momentum += c2 * d.right_geo.S * d.right.E - offset;
  return F;
}

}  // namespace

InterfaceFluxes transition_fluxes(const TransitionSolution& s, const InterfaceData& d,
                                  const ModelParams& p) {
  Gibbs gl, gr;
  double dphi, offset;
  const double c2 = p.c * p.c;
  if (s.w >= 0.0) {
    gl = gibbs_state(d.left_geo, p, d.left);
    gr = gibbs_state(d.left_geo, p, s.minus);
    dphi = interface_barrier(d.left_geo, d.right_geo, p, d.Zl, d.Zr, d.left.A, s.minus.A,
                             d.left.E);
    offset = c2 * d.left_geo.S * d.left.E;
  } else {
    gl = gibbs_state(d.right_geo, p, s.plus);
    gr = gibbs_state(d.right_geo, p, d.right);
    dphi = interface_barrier(d.left_geo, d.right_geo, p, d.Zl, d.Zr, s.plus.A, d.right.A,
                             d.right.E);
    offset = c2 * d.right_geo.S * d.right.E;
  }
  return to_cell_gauge({flux_minus(gl, gr, dphi, p.g), flux_plus(gl, gr, dphi, p.g)}, offset, d, p);
}

InterfaceFluxes plain_fluxes(const InterfaceData& d, const ModelParams& p) {
  const Gibbs gl = gibbs_state(d.left_geo, p, d.left);
  const Gibbs gr = gibbs_state(d.right_geo, p, d.right);
  const double dphi = interface_barrier(d.left_geo, d.right_geo, p, d.Zl, d.Zr, d.left.A,
                                        d.right.A, d.left.E * d.right.E);
  const InterfaceFluxes F{flux_minus(gl, gr, dphi, p.g), flux_plus(gl, gr, dphi, p.g)};
  if (d.left.E == d.right.E) return F;
  // Mixed pair: the pressurized side contributes about half of its excess.
  const double c2 = p.c * p.c;
  const double offset = 0.5 * c2 * (d.left_geo.S * d.left.E + d.right_geo.S * d.right.E);
  return to_cell_gauge(F, offset, d, p);
}

}  // namespace pfs
