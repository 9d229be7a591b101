#include "pfs/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace pfs {

bool equilibrium_interface(const CellGeometry& gl, const CellGeometry& gr, const CellState& l,
                           const CellState& r, double Zl, double Zr, const ModelParams& p) {
  if (is_dry(gl, l.A) || is_dry(gr, r.A)) return false;
  const double qs = std::max(std::abs(l.Q), std::abs(r.Q));
  if (!(std::abs(l.Q - r.Q) <= 1e-12 * (1.0 + qs))) return false;
  const double hl = total_head(gl, p, l.A, l.Q, l.E, Zl);
  const double hr = total_head(gr, p, r.A, r.Q, r.E, Zr);
  return std::abs(hl - hr) <= 1e-10 * std::max({1.0, std::abs(hl), std::abs(hr)});
}

int update_state_indicator(int E, double A_new, double S, int E_left, int E_right) {
  if (A_new >= S) return 1;
  return E == 0 ? 0 : E_left * E_right;
}

double interior_mass(const std::vector<CellState>& cells, const std::vector<CellGeometry>& geo) {
  double m = 0.0;
  for (std::size_t i = 1; i + 1 < cells.size(); ++i) m += cells[i].A * geo[i].h;
  return m;
}

Stepper::Stepper(const PipeGeometry& geometry, ModelParams params, StepperOptions options,
                 BoundaryCondition upstream, BoundaryCondition downstream)
    : geometry_(geometry),
      params_(params),
      options_(options),
      upstream_(std::move(upstream)),
      downstream_(std::move(downstream)) {
  upstream_.end = BoundaryEnd::upstream;
  downstream_.end = BoundaryEnd::downstream;
}

MeshState Stepper::initial_state(std::vector<CellState> interior) const {
  const auto& geo = geometry_.cells();
  if (interior.size() + 2 != geo.size()) {
    throw std::invalid_argument("Stepper::initial_state: expected " +
                                std::to_string(geo.size() - 2) + " interior cells");
  }
  MeshState m;
  m.cells.reserve(geo.size());
  m.cells.push_back(interior.front());
  m.cells.insert(m.cells.end(), interior.begin(), interior.end());
  m.cells.push_back(interior.back());
  m.Zdyn = dynamic_slope(m.cells, geo, params_);

  const std::size_t n = m.cells.size();
  const BoundaryResult up = solve_boundary(
      upstream_, {geo[0], geo[1], m.cells[0], m.cells[1], m.Zdyn[0], m.Zdyn[1]}, 0.0, params_,
      options_.newton);
  const BoundaryResult down = solve_boundary(
      downstream_, {geo[n - 1], geo[n - 2], m.cells[n - 1], m.cells[n - 2], m.Zdyn[n - 1], m.Zdyn[n - 2]},
      0.0, params_, options_.newton);
  if (up.ok) m.cells[0] = up.state;
  if (down.ok) m.cells[n - 1] = down.state;
  m.Zdyn = dynamic_slope(m.cells, geo, params_);
  return m;
}

InterfaceFluxes Stepper::interface_fluxes(const MeshState& m, std::size_t i, StepDiagnostics* diag) {
  const auto& geo = geometry_.cells();
  const CellState& l = m.cells[i];
  const CellState& r = m.cells[i + 1];
  if (equilibrium_interface(geo[i], geo[i + 1], l, r, m.Zdyn[i], m.Zdyn[i + 1], params_)) {
    return {equilibrium_flux(gibbs_state(geo[i], params_, l)),
            equilibrium_flux(gibbs_state(geo[i + 1], params_, r))};
  }
  const InterfaceData d{geo[i], geo[i + 1], l, r, m.Zdyn[i], m.Zdyn[i + 1]};
  if (l.E == r.E) return plain_fluxes(d, params_);

  const double area_scale = std::max(geo[i].S, geo[i + 1].S);
  if (!predicted_speed(l, r, area_scale)) return plain_fluxes(d, params_);

  auto accepted = [&](const TransitionSolution& s) {
    return s.ok && rankine_hugoniot_residual(s, d, params_) <= options_.residual_limit;
  };
  TransitionSolution s = solve_transition(d, options_.method, params_, options_.newton);
  // The critical kinetic system can lack a physical root (only the acoustic one near
  // w = c survives); the other solver is tried before the plain fluxes.
  if (!accepted(s)) {
    const TransitionMethod other =
        options_.method == TransitionMethod::fka ? TransitionMethod::ghost : TransitionMethod::fka;
    TransitionSolution t = solve_transition(d, other, params_, options_.newton);
    if (accepted(t)) s = std::move(t);
  }
  const bool fallback = !accepted(s);
  events_.push_back({m.t, i, s.ok ? s.method : options_.method, s.w, s.residual, fallback});
  if (diag) {
    ++diag->transitions;
    if (fallback) ++diag->fallbacks;
  }
  return fallback ? plain_fluxes(d, params_) : transition_fluxes(s, d, params_);
}

StepDiagnostics Stepper::advance(MeshState& m, double dt_max) {
  const auto& geo = geometry_.cells();
  const std::size_t n = m.cells.size();
  StepDiagnostics diag;

  m.Zdyn = dynamic_slope(m.cells, geo, params_);
  const double dt = std::min(cfl_timestep(m.cells, geo, params_, options_.cfl, dt_max), dt_max);

  std::vector<InterfaceFluxes> F(n - 1);
  // Index into events_ of each interface whose fluxes come from a transition solution.
  std::vector<std::optional<std::size_t>> substituted(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t before = events_.size();
    F[i] = interface_fluxes(m, i, &diag);
    if (events_.size() > before && !events_.back().fallback) substituted[i] = before;
  }

  // A prescribed discharge is the exact mass flux through that end.
  auto impose_discharge = [&] {
    if (upstream_.kind == BoundaryKind::discharge) {
      F.front().minus.mass = F.front().plus.mass = upstream_.value(m.t);
    }
    if (downstream_.kind == BoundaryKind::discharge) {
      F.back().minus.mass = F.back().plus.mass = downstream_.value(m.t);
    }
  };
  impose_discharge();

  std::vector<CellState> next = m.cells;
  auto update = [&] {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double k = dt / geo[i].h;
      next[i].A = m.cells[i].A - k * (F[i].minus.mass - F[i - 1].plus.mass);
      next[i].Q = m.cells[i].Q - k * (F[i].minus.momentum - F[i - 1].plus.momentum);
    }
  };
  update();

  // Transition fluxes carry no positivity guarantee: an interface whose substituted
  // fluxes empty a neighbour below zero falls back to the plain kinetic fluxes.
  for (bool again = true; again;) {
    again = false;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (next[i].A >= 0.0) continue;
      for (std::size_t j : {i - 1, i}) {
        if (!substituted[j]) continue;
        F[j] = plain_fluxes({geo[j], geo[j + 1], m.cells[j], m.cells[j + 1], m.Zdyn[j], m.Zdyn[j + 1]},
                            params_);
        events_[*substituted[j]].fallback = true;
        ++diag.fallbacks;
        substituted[j].reset();
        again = true;
      }
    }
    if (again) {
      impose_discharge();
      update();
    }
  }
  diag.boundary_inflow = dt * (F.front().plus.mass - F.back().minus.mass);

  for (std::size_t i = 1; i + 1 < n; ++i) {
    auto& c = next[i];
    const double S = geo[i].S;
    if (!std::isfinite(c.A) || !std::isfinite(c.Q) || c.A < -kDryFraction * S) {
      std::ostringstream os;
      os.precision(17);
      os << "advance: invalid state in cell " << i << " at t=" << m.t << " (A=" << c.A
         << ", Q=" << c.Q << "); left interface F-=(" << F[i - 1].minus.mass << ", "
         << F[i - 1].minus.momentum << ") F+=(" << F[i - 1].plus.mass << ", "
         << F[i - 1].plus.momentum << "), right interface F-=(" << F[i].minus.mass << ", "
         << F[i].minus.momentum << ") F+=(" << F[i].plus.mass << ", " << F[i].plus.momentum
         << "); previous state A=" << m.cells[i].A << " Q=" << m.cells[i].Q << " E=" << m.cells[i].E;
      throw SimulationAbort(os.str());
    }
    if (c.A < kDryFraction * S) {
      diag.clamped_mass += c.A * geo[i].h;
      c.A = 0.0;
      c.Q = 0.0;
    }
  }

  for (std::size_t i = 1; i + 1 < n; ++i) {
    next[i].E = update_state_indicator(m.cells[i].E, next[i].A, geo[i].S, m.cells[i - 1].E,
                                       m.cells[i + 1].E);
  }

  const double t_new = m.t + dt;
  const BoundaryResult up = solve_boundary(
      upstream_, {geo[0], geo[1], m.cells[0], next[1], m.Zdyn[0], m.Zdyn[1]}, t_new, params_,
      options_.newton);
  const BoundaryResult down = solve_boundary(
      downstream_, {geo[n - 1], geo[n - 2], m.cells[n - 1], next[n - 2], m.Zdyn[n - 1], m.Zdyn[n - 2]},
      t_new, params_, options_.newton);
  next[0] = up.state;
  next[n - 1] = down.state;
  diag.boundary_failures = int(!up.ok) + int(!down.ok);

  m.cells = std::move(next);
  m.t = t_new;
  ++m.step;

  diag.t = m.t;
  diag.dt = dt;
  diag.mass = interior_mass(m.cells, geo);
  diag.minA = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < n; ++i) diag.minA = std::min(diag.minA, m.cells[i].A);
  return diag;
}

}  // namespace pfs
