#include "vvl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vvl/error.hpp"

namespace vvl {

namespace {

struct Conserved {
  double rho = 0.0;
  Vec2 m;
};

// Primitive view of one side of a face.
struct FaceState {
  double rho = 0.0;
  Vec2 m, u;
  double p = 0.0, c = 0.0;

  FaceState mirrored() const { return {rho, -m, -u, p, c}; }
};

struct Flux {
  double rho = 0.0;
  Vec2 m;
};

Flux physical_flux(const FaceState& s, int dir) {
  const double un = dir == 0 ? s.u.x : s.u.y;
  Flux f{dir == 0 ? s.m.x : s.m.y, un * s.m};
  if (dir == 0) f.m.x += s.p; else f.m.y += s.p;
  return f;
}

Flux numerical_flux(const FaceState& l, const FaceState& r, int dir, FluxKind kind) {
  const Flux fl = physical_flux(l, dir), fr = physical_flux(r, dir);
  const double unl = dir == 0 ? l.u.x : l.u.y;
  const double unr = dir == 0 ? r.u.x : r.u.y;
  if (kind == FluxKind::kRusanov) {
    const double s = std::max(std::abs(unl) + l.c, std::abs(unr) + r.c);
    return {0.5 * (fl.rho + fr.rho) - 0.5 * s * (r.rho - l.rho), 0.5 * (fl.m + fr.m) - (0.5 * s) * (r.m - l.m)};
  }
  const double sl = std::min(unl - l.c, unr - r.c);
  const double sr = std::max(unl + l.c, unr + r.c);
  if (sl >= 0.0) return fl;
  if (sr <= 0.0) return fr;
  const double inv = 1.0 / (sr - sl);
  return {(sr * fl.rho - sl * fr.rho + sl * sr * (r.rho - l.rho)) * inv,
          inv * (sr * fl.m - sl * fr.m + (sl * sr) * (r.m - l.m))};
}

// Neighbour index in direction dir (0 = x, 1 = y) with offset +-1, wrapping when periodic.
// Returns grid.size() when the neighbour is outside the box.
std::size_t neighbour(const Grid& g, std::size_t c, int dir, int off) {
  int i = g.col(c), j = g.row(c);
  if (dir == 0) i += off; else j += off;
  if (g.boundary() == BoundaryKind::kPeriodic) {
    i = (i + g.nx()) % g.nx();
    j = (j + g.ny()) % g.ny();
  } else if (i < 0 || j < 0 || i >= g.nx() || j >= g.ny()) {
    return g.size();
  }
  return g.index(i, j);
}

struct Workspace {
  std::vector<Vec2> u;
  std::vector<Mat2> grad;
  std::vector<double> p, c;
};

void fill_workspace(Workspace& w, const FluidState& s, const Grid& g, const GasLaw& law, bool need_grad,
                    double floor, std::size_t* floor_hits) {
  w.u = velocity_field(s, g, floor, floor_hits);
  w.p.assign(g.size(), 0.0);
  w.c.assign(g.size(), 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.kind(k) == CellKind::kSolid) continue;
    const double r = std::max(s.rho[k], 0.0);
    w.p[k] = law.a * std::pow(r, law.gamma);
    w.c[k] = sound_speed(law, r);
  }
  if (need_grad) w.grad = velocity_gradients(s, g, floor);
}

FaceState face_state(const FluidState& s, const Workspace& w, std::size_t k) {
  return {s.rho[k], s.m(k), w.u[k], w.p[k], w.c[k]};
}

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

// Limited slopes of rho and u per direction; zero unless both neighbours carry a state.
struct Slopes {
  std::vector<double> rho[2];
  std::vector<Vec2> u[2];
};

void fill_slopes(Slopes& sl, const FluidState& s, const Workspace& w, const Grid& g) {
  for (int dir = 0; dir < 2; ++dir) {
    sl.rho[dir].assign(g.size(), 0.0);
    sl.u[dir].assign(g.size(), Vec2{});
    for (std::size_t k : g.fluid_cells()) {
      const std::size_t a = neighbour(g, k, dir, -1), b = neighbour(g, k, dir, +1);
      if (a == g.size() || b == g.size()) continue;
      if (g.kind(a) == CellKind::kSolid || g.kind(b) == CellKind::kSolid) continue;
      sl.rho[dir][k] = minmod(s.rho[k] - s.rho[a], s.rho[b] - s.rho[k]);
      sl.u[dir][k] = {minmod(w.u[k].x - w.u[a].x, w.u[b].x - w.u[k].x),
                      minmod(w.u[k].y - w.u[a].y, w.u[b].y - w.u[k].y)};
    }
  }
}

// State of cell k extrapolated half a cell towards side (+1 or -1) in direction dir.
FaceState reconstructed(const FluidState& s, const Workspace& w, const Slopes& sl, const GasLaw& law, std::size_t k,
                        int dir, double side) {
  const double dr = sl.rho[dir][k];
  const Vec2 du = sl.u[dir][k];
  if (dr == 0.0 && du.x == 0.0 && du.y == 0.0) return face_state(s, w, k);
  const double rho = s.rho[k] + 0.5 * side * dr;
  const Vec2 u = w.u[k] + (0.5 * side) * du;
  return {rho, rho * u, u, law.a * std::pow(rho, law.gamma), sound_speed(law, rho)};
}

struct Rhs {
  std::vector<double> rho;
  std::vector<Vec2> m;
};

void assemble_rhs(Rhs& out, const FluidState& s, const Grid& g, const GasLaw& law, const ViscosityPair& visc,
                  double eps, const StepOptions& opt, double t, std::size_t* floor_hits) {
  const bool viscous = eps > 0.0 && (visc.mu > 0.0 || visc.lambda > 0.0);
  Workspace w;
  fill_workspace(w, s, g, law, viscous, opt.density_floor, floor_hits);
  out.rho.assign(g.size(), 0.0);
  out.m.assign(g.size(), Vec2{});
  const double h[2] = {g.dx(), g.dy()};
  const bool periodic = g.boundary() == BoundaryKind::kPeriodic;
  const bool muscl = opt.reconstruction == Reconstruction::kMuscl;
  Slopes slopes;
  if (muscl) fill_slopes(slopes, s, w, g);

  for (int dir = 0; dir < 2; ++dir) {
    for (std::size_t r = 0; r < g.size(); ++r) {
      const int pos = dir == 0 ? g.col(r) : g.row(r);
      if (!periodic && pos == 0) continue;
      const std::size_t l = neighbour(g, r, dir, -1);
      const CellKind kl = g.kind(l), kr = g.kind(r);
      if (kl != CellKind::kFluid && kr != CellKind::kFluid) continue;

      const bool wall = kl == CellKind::kSolid || kr == CellKind::kSolid;
      FaceState sl, sr;
      if (kl == CellKind::kSolid) {
        sr = face_state(s, w, r);
        sl = sr.mirrored();
      } else if (kr == CellKind::kSolid) {
        sl = face_state(s, w, l);
        sr = sl.mirrored();
      } else {
        sl = face_state(s, w, l);
        sr = face_state(s, w, r);
      }
      if (wall) {
        const Vec2 uw = 0.5 * (sl.u + sr.u);
        require(uw.x == 0.0 && uw.y == 0.0, ErrorCode::kGeometry, "no-slip violated at a wall face");
      }
      // Viscous terms below keep the cell-centred states.
      Flux f = muscl && !wall ? numerical_flux(reconstructed(s, w, slopes, law, l, dir, +1.0),
                                               reconstructed(s, w, slopes, law, r, dir, -1.0), dir, opt.flux)
                              : numerical_flux(sl, sr, dir, opt.flux);

      if (viscous) {
        const Vec2 du = (1.0 / h[dir]) * (sr.u - sl.u);
        Vec2 tangential;  // d_t u on the face, t the other direction
        if (!wall) {
          const Mat2& gl = w.grad[l];
          const Mat2& gr = w.grad[r];
          tangential = dir == 0 ? Vec2{0.5 * (gl.xy + gr.xy), 0.5 * (gl.yy + gr.yy)}
                                : Vec2{0.5 * (gl.xx + gr.xx), 0.5 * (gl.yx + gr.yx)};
        }
        const Mat2 G = dir == 0 ? Mat2{du.x, tangential.x, du.y, tangential.y}
                                : Mat2{tangential.x, du.x, tangential.y, du.y};
        const Sym2 S = viscous_stress(visc, G);
        const Vec2 sn = dir == 0 ? Vec2{S.xx, S.xy} : Vec2{S.xy, S.yy};
        f.m -= eps * sn;
      }

      const double inv_h = 1.0 / h[dir];
      if (kl == CellKind::kFluid) {
        out.rho[l] -= inv_h * f.rho;
        out.m[l] -= inv_h * f.m;
      }
      if (kr == CellKind::kFluid) {
        out.rho[r] += inv_h * f.rho;
        out.m[r] += inv_h * f.m;
      }
    }
  }

  if (opt.source) {
    for (std::size_t k : g.fluid_cells()) {
      double sr = 0.0;
      Vec2 sm;
      opt.source(g.center(k), t, sr, sm);
      out.rho[k] += sr;
      out.m[k] += sm;
    }
  }
}

std::size_t sanitize(FluidState& s, const Grid& g, double floor) {
  std::size_t clipped = 0;
  for (std::size_t k : g.fluid_cells()) {
    if (!std::isfinite(s.rho[k]) || !std::isfinite(s.mx[k]) || !std::isfinite(s.my[k]))
      fail(ErrorCode::kNonFinite, "non-finite value in the solution");
    if (s.rho[k] < -floor) fail(ErrorCode::kNegativeDensity, "negative density beyond the floor");
    if (s.rho[k] < 0.0) {
      s.rho[k] = 0.0;
      ++clipped;
    }
  }
  return clipped;
}

FluidState euler_stage(const FluidState& s, const Rhs& rhs, const Grid& g, double dt) {
  FluidState out = s;
  for (std::size_t k : g.fluid_cells()) {
    out.rho[k] += dt * rhs.rho[k];
    out.mx[k] += dt * rhs.m[k].x;
    out.my[k] += dt * rhs.m[k].y;
  }
  out.time = s.time + dt;
  return out;
}

double total_relative_energy(const FluidState& s, const Grid& g, const GasLaw& law, const FarField& far) {
  double e = 0.0;
  for (std::size_t k : g.fluid_cells()) e += relative_energy(law, s.rho[k], s.m(k), far);
  return e * g.cell_area();
}

}  // namespace

void validate(const SolverConfig& cfg) {
  require(cfg.cfl > 0.0 && cfg.cfl < 1.0, ErrorCode::kConfig, "cfl must lie in (0, 1)");
  require(cfg.t_end > 0.0 && std::isfinite(cfg.t_end), ErrorCode::kConfig, "t_end must be > 0");
  require(cfg.epsilon >= 0.0 && std::isfinite(cfg.epsilon), ErrorCode::kConfig, "epsilon must be >= 0");
  require(!cfg.snapshot_times.empty(), ErrorCode::kConfig, "at least one snapshot time is required");
  for (std::size_t k = 0; k < cfg.snapshot_times.size(); ++k) {
    const double t = cfg.snapshot_times[k];
    require(t >= 0.0 && t <= cfg.t_end, ErrorCode::kConfig, "snapshot time outside [0, t_end]");
    if (k > 0) require(t > cfg.snapshot_times[k - 1], ErrorCode::kConfig, "snapshot times must increase strictly");
  }
}

std::vector<double> Trajectory::times() const {
  std::vector<double> t;
  t.reserve(states.size());
  for (const auto& s : states) t.push_back(s.time);
  return t;
}

FluidState uniform_state(const Grid& grid, const FarField& far, double time) {
  FluidState s;
  s.time = time;
  s.rho.assign(grid.size(), far.rho);
  s.mx.assign(grid.size(), far.momentum().x);
  s.my.assign(grid.size(), far.momentum().y);
  apply_cell_conventions(s, grid, far);
  return s;
}

void apply_cell_conventions(FluidState& s, const Grid& grid, const FarField& far) {
  require(s.rho.size() == grid.size() && s.mx.size() == grid.size() && s.my.size() == grid.size(),
          ErrorCode::kMismatch, "state size does not match the grid");
  const Vec2 m_inf = far.momentum();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid.kind(k) == CellKind::kSolid) {
      s.rho[k] = s.mx[k] = s.my[k] = 0.0;
    } else if (grid.kind(k) == CellKind::kGhost) {
      s.rho[k] = far.rho;
      s.mx[k] = m_inf.x;
      s.my[k] = m_inf.y;
    }
  }
}

std::vector<Vec2> velocity_field(const FluidState& s, const Grid& grid, double floor, std::size_t* floor_hits) {
  std::vector<Vec2> u(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid.kind(k) == CellKind::kSolid) continue;
    if (s.rho[k] < floor) {
      if (floor_hits && grid.is_fluid(k)) ++*floor_hits;
      u[k] = s.m(k) / floor;
    } else {
      u[k] = s.m(k) / s.rho[k];
    }
  }
  return u;
}

std::vector<Mat2> velocity_gradients(const FluidState& s, const Grid& grid, double floor) {
  const auto u = velocity_field(s, grid, floor);
  std::vector<Mat2> g(grid.size());
  const double h[2] = {grid.dx(), grid.dy()};
  for (std::size_t k : grid.fluid_cells()) {
    Vec2 d[2];
    for (int dir = 0; dir < 2; ++dir) {
      Vec2 side[2];
      for (int e = 0; e < 2; ++e) {
        const std::size_t n = neighbour(grid, k, dir, e == 0 ? -1 : 1);
        side[e] = grid.kind(n) == CellKind::kSolid ? -u[k] : u[n];
      }
      d[dir] = (0.5 / h[dir]) * (side[1] - side[0]);
    }
    g[k] = {d[0].x, d[1].x, d[0].y, d[1].y};
  }
  return g;
}

double dissipation_rate(const FluidState& s, const Grid& grid, const ViscosityPair& visc, double epsilon,
                        double floor) {
  if (epsilon == 0.0) return 0.0;
  const auto g = velocity_gradients(s, grid, floor);
  double sum = 0.0;
  for (std::size_t k : grid.fluid_cells()) sum += contract(viscous_stress(visc, g[k]), g[k]);
  return epsilon * sum * grid.cell_area();
}

double max_stable_dt(const FluidState& s, const Grid& grid, const GasLaw& law, const ViscosityPair& visc,
                     double epsilon, double cfl, double floor) {
  const auto u = velocity_field(s, grid, floor);
  double speed = 0.0, rho_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid.kind(k) == CellKind::kSolid) continue;
    const double r = std::max(s.rho[k], 0.0);
    speed = std::max(speed, norm(u[k]) + sound_speed(law, r));
    if (grid.is_fluid(k)) rho_min = std::min(rho_min, std::max(r, floor));
  }
  const double h = std::min(grid.dx(), grid.dy());
  double dt = speed > 0.0 ? cfl * h / speed : std::numeric_limits<double>::infinity();
  const double nu = epsilon * std::max(visc.mu, visc.lambda);
  if (nu > 0.0 && std::isfinite(rho_min)) dt = std::min(dt, cfl * h * h * rho_min / (4.0 * nu));
  return dt;
}

FluidState step(const FluidState& state, const Grid& grid, const GasLaw& law, const ViscosityPair& visc,
                double epsilon, double dt, const StepOptions& opt, StepStats* stats) {
  require(state.size() == grid.size(), ErrorCode::kMismatch, "state size does not match the grid");
  require(dt > 0.0 && std::isfinite(dt), ErrorCode::kInvalidArgument, "dt must be positive");
  const double bound = max_stable_dt(state, grid, law, visc, epsilon, opt.cfl, opt.density_floor);
  if (!(dt <= bound * (1.0 + 1e-12))) fail(ErrorCode::kCflViolation, "time step exceeds the stability bound");

  std::size_t hits = 0;
  Rhs rhs;
  assemble_rhs(rhs, state, grid, law, visc, epsilon, opt, state.time, &hits);
  FluidState next = euler_stage(state, rhs, grid, dt);
  hits += sanitize(next, grid, opt.density_floor);
  if (opt.integrator == TimeIntegrator::kSsp2) {
    assemble_rhs(rhs, next, grid, law, visc, epsilon, opt, next.time, &hits);
    const FluidState second = euler_stage(next, rhs, grid, dt);
    for (std::size_t k : grid.fluid_cells()) {
      next.rho[k] = 0.5 * (state.rho[k] + second.rho[k]);
      next.mx[k] = 0.5 * (state.mx[k] + second.mx[k]);
      next.my[k] = 0.5 * (state.my[k] + second.my[k]);
    }
    next.time = state.time + dt;
    hits += sanitize(next, grid, opt.density_floor);
  }
  if (stats) stats->floor_hits += hits;
  return next;
}

Trajectory solve(const FluidState& initial, const SolverConfig& cfg, const Grid& grid, const GasLaw& law,
                 const ViscosityPair& visc, const FarField& far, const SourceTerm& source) {
  validate(cfg);
  validate(law);
  validate(visc);
  validate(far);
  require(initial.size() == grid.size(), ErrorCode::kMismatch, "initial state does not match the grid");
  Trajectory traj;
  traj.epsilon = cfg.epsilon;

  StepOptions opt;
  opt.flux = cfg.flux;
  opt.integrator = cfg.integrator;
  opt.reconstruction = cfg.reconstruction;
  opt.cfl = cfg.cfl;
  opt.density_floor = 1e-10 * far.rho;
  opt.source = source;

  FluidState cur = initial;
  apply_cell_conventions(cur, grid, far);
  {
    FluidState probe = cur;
    sanitize(probe, grid, 0.0);
  }
  double dissipated = 0.0;
  std::size_t next_snap = 0;
  auto record = [&](const FluidState& s) {
    if (!std::isfinite(total_relative_energy(s, grid, law, far)))
      fail(ErrorCode::kNonFinite, "relative energy is not finite");
    traj.states.push_back(s);
    traj.dissipation.push_back(dissipated);
  };

  try {
    while (next_snap < cfg.snapshot_times.size() && cfg.snapshot_times[next_snap] <= cur.time) {
      FluidState s = cur;
      s.time = cfg.snapshot_times[next_snap];
      record(s);
      ++next_snap;
    }
    while (next_snap < cfg.snapshot_times.size()) {
      const double target = cfg.snapshot_times[next_snap];
      const double bound = max_stable_dt(cur, grid, law, visc, cfg.epsilon, cfg.cfl, opt.density_floor);
      if (!(bound > 1e-14 * std::max(cfg.t_end, 1.0))) fail(ErrorCode::kNonFinite, "time step collapsed");
      double dt = std::min(bound, target - cur.time);
      const bool hits_target = dt >= target - cur.time;
      StepStats stats;
      FluidState next = step(cur, grid, law, visc, cfg.epsilon, dt, opt, &stats);
      traj.floor_hits += stats.floor_hits;
      if (cfg.epsilon > 0.0) {
        FluidState mid = cur;
        for (std::size_t k : grid.fluid_cells()) {
          mid.rho[k] = 0.5 * (cur.rho[k] + next.rho[k]);
          mid.mx[k] = 0.5 * (cur.mx[k] + next.mx[k]);
          mid.my[k] = 0.5 * (cur.my[k] + next.my[k]);
        }
        dissipated += dt * dissipation_rate(mid, grid, visc, cfg.epsilon, opt.density_floor);
      }
      cur = std::move(next);
      if (hits_target) {
        cur.time = target;
        record(cur);
        ++next_snap;
      }
    }
  } catch (const Error& e) {
    traj.status = TrajectoryStatus::kBlowUp;
    traj.message = e.what();
  }
  return traj;
}

WeakResidual weak_residual_ns(const Trajectory& traj, const Grid& grid, const GasLaw& law, const ViscosityPair& visc,
                              const ScalarTestFunction& phi, const VectorTestFunction& phi_vec, const TimeWeight& psi,
                              double floor) {
  const auto ds = discretize(phi, grid);
  const auto dv = discretize(phi_vec, grid);
  const auto times = traj.times();
  const auto tq = time_quadrature(times, psi);
  WeakResidual res;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    if (tq.w[k] == 0.0 && tq.w_prime[k] == 0.0) continue;
    const FluidState& s = traj.states[k];
    double cont_t = 0.0, cont_x = 0.0, mom_t = 0.0, mom_x = 0.0;
    for (std::size_t c : ds.cells) {
      cont_t += s.rho[c] * ds.integral[c];
      cont_x += dot(s.m(c), ds.grad_integral[c]);
    }
    std::vector<Mat2> g;
    const bool viscous = traj.epsilon > 0.0 && (visc.mu > 0.0 || visc.lambda > 0.0);
    if (viscous) g = velocity_gradients(s, grid, floor);
    for (std::size_t c : dv.cells) {
      const Vec2 m = s.m(c);
      const double rho = std::max(s.rho[c], 0.0);
      mom_t += dot(m, dv.integral[c]);
      Sym2 flux = pressure(law, rho) * Sym2::identity();
      if (rho > 0.0) flux += (1.0 / std::max(rho, floor)) * Sym2::outer(m);
      if (viscous) flux -= traj.epsilon * viscous_stress(visc, g[c]);
      mom_x += contract(flux, dv.grad_integral[c]);
    }
    res.continuity += tq.w_prime[k] * cont_t + tq.w[k] * cont_x;
    res.momentum += tq.w_prime[k] * mom_t + tq.w[k] * mom_x;
  }
  return res;
}

}  // namespace vvl
