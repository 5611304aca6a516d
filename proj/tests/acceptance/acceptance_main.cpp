// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "vvl/config.hpp"
#include "vvl/defect.hpp"
#include "vvl/error.hpp"
#include "vvl/quadrature.hpp"
#include "vvl/solver.hpp"
#include "vvl/stats.hpp"
#include "vvl/weak_form.hpp"

using namespace vvl;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void note(Outcome& o, const std::string& s) { o.detail += (o.detail.empty() ? "" : " ") + s; }

void check(Outcome& o, bool ok, const std::string& what) {
  if (!ok) {
    o.pass = false;
    note(o, "[" + what + "]");
  }
}

GridConfig periodic_box(int n, double half) {
  GridConfig g;
  g.nx = g.ny = n;
  g.x_min = g.y_min = -half;
  g.x_max = g.y_max = half;
  g.boundary = BoundaryKind::kPeriodic;
  return g;
}

std::vector<double> uniform_times(int k, double t_end) {
  std::vector<double> t;
  for (int i = 0; i < k; ++i) t.push_back(t_end * i / (k - 1));
  return t;
}

// ---- synthetic ensembles ----

using Field = std::function<void(std::size_t cell, double t, double& rho, Vec2& m)>;

Trajectory synthetic_member(const Grid& g, const FarField& far, const std::vector<double>& times, double eps,
                            const Field& f) {
  Trajectory tr;
  tr.epsilon = eps;
  for (double t : times) {
    FluidState s;
    s.time = t;
    s.rho.assign(g.size(), 0.0);
    s.mx.assign(g.size(), 0.0);
    s.my.assign(g.size(), 0.0);
    for (std::size_t c : g.fluid_cells()) {
      double r;
      Vec2 m;
      f(c, t, r, m);
      s.rho[c] = r;
      s.mx[c] = m.x;
      s.my[c] = m.y;
    }
    apply_cell_conventions(s, g, far);
    tr.states.push_back(std::move(s));
    tr.dissipation.push_back(0.0);
  }
  return tr;
}

// Random states with occasional vacuum cells (rho = 0, m = 0).
Ensemble random_synthetic(std::mt19937_64& rng, const GridConfig& gc, GasLaw law, std::size_t members, int snaps,
                          double vacuum_probability) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Ensemble e;
  e.grid = std::make_shared<const Grid>(gc);
  e.law = law;
  e.far = {1.0, {0.2, -0.1}};
  e.visc = {1.0, 0.5};
  const auto times = uniform_times(snaps, 1.0);
  for (std::size_t n = 0; n < members; ++n) {
    Trajectory tr = synthetic_member(*e.grid, e.far, times, 0.1 / (n + 1), [&](std::size_t, double, double& r, Vec2& m) {
      if (u(rng) < vacuum_probability) {
        r = 0.0;
        m = {};
        return;
      }
      r = 1e-3 + 3.0 * u(rng);
      m = {6.0 * u(rng) - 3.0, 6.0 * u(rng) - 3.0};
    });
    double d = 0.0;
    for (double& x : tr.dissipation) x = (d += u(rng));
    e.members.push_back(std::move(tr));
  }
  return e;
}

// ---- solver ensembles ----

struct SolverEnsemble {
  ExperimentConfig cfg;
  Ensemble ens;
  std::size_t blown_up = 0;
};

SolverEnsemble solve_ensemble(ExperimentConfig cfg) {
  finalize_config(cfg);
  SolverEnsemble out;
  out.ens.grid = std::make_shared<const Grid>(cfg.grid);
  out.ens.law = cfg.law;
  out.ens.far = cfg.far;
  out.ens.visc = cfg.visc;
  for (int n = 1; n <= cfg.members; ++n) {
    const FluidState init = make_initial_state(cfg, *out.ens.grid, n);
    Trajectory tr = solve(init, make_solver_config(cfg, n), *out.ens.grid, cfg.law, cfg.visc, cfg.far);
    if (tr.status == TrajectoryStatus::kComplete) out.ens.members.push_back(std::move(tr));
    else ++out.blown_up;
  }
  out.cfg = std::move(cfg);
  return out;
}

ExperimentConfig ensemble_config(int i, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ExperimentConfig c;
  c.grid.nx = c.grid.ny = 32;
  if (i % 2 == 0) {
    c.grid.x_min = c.grid.y_min = -2.0;
    c.grid.x_max = c.grid.y_max = 2.0;
    c.grid.boundary = BoundaryKind::kFarField;
    c.grid.obstacle.shape = Disc{{0.1 * (u(rng) - 0.5), 0.1 * (u(rng) - 0.5)}, 0.25 + 0.15 * u(rng)};
  } else {
    c.grid.x_min = c.grid.y_min = -1.0;
    c.grid.x_max = c.grid.y_max = 1.0;
    c.grid.boundary = BoundaryKind::kPeriodic;
  }
  const double gammas[3] = {1.4, 2.0, 3.0};
  c.law = {0.5 + u(rng), gammas[i % 3]};
  c.far = {0.5 + u(rng), {0.6 * u(rng) - 0.1, 0.2 * (u(rng) - 0.5)}};
  c.visc = {1.0, u(rng)};
  c.epsilon.eps0 = 0.005 + 0.03 * u(rng);
  c.members = 2 + i % 15;
  c.seed = 1000 + i;
  const InitialFamily fams[3] = {InitialFamily::kGaussianBump, InitialFamily::kShearInflow, InitialFamily::kGaussianBump};
  c.initial.family = fams[(i / 3) % 3];
  c.initial.amplitude = 0.1 + 0.3 * u(rng);
  c.initial.width = 0.2 + 0.3 * u(rng);
  c.initial.center = {-0.8 + 0.4 * u(rng), 0.4 * (u(rng) - 0.5)};
  c.initial.mode = 1 + i % 3;
  c.solver.t_end = 0.1;
  c.solver.flux = i % 4 == 3 ? FluxKind::kHll : FluxKind::kRusanov;
  return c;
}

std::vector<SolverEnsemble>& solver_ensembles() {
  static std::vector<SolverEnsemble> all = [] {
    std::vector<SolverEnsemble> v;
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 50; ++i) v.push_back(solve_ensemble(ensemble_config(i, rng)));
    return v;
  }();
  return all;
}

// ---- criteria ----

Outcome criterion1() {
  const auto t0 = Clock::now();
  Outcome o;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double breg = 0.0, pres = 0.0;
  bool positive = true;
  for (int i = 0; i < 100000; ++i) {
    const GasLaw law{0.1 + 2.0 * u(rng), 1.01 + 2.5 * u(rng)};
    const FarField far{0.1 + 2.0 * u(rng), {4.0 * u(rng) - 2.0, 4.0 * u(rng) - 2.0}};
    const double rho = 1e-3 + 4.0 * u(rng);
    const Vec2 m{8.0 * u(rng) - 4.0, 8.0 * u(rng) - 4.0};
    const double direct = relative_energy(law, rho, m, far);
    const double bregman = relative_energy_bregman(law, rho, m, far);
    breg = std::max(breg, std::abs(direct - bregman) / std::abs(direct));
    const double p = pressure(law, rho), pp = (law.gamma - 1.0) * pressure_potential(law, rho);
    pres = std::max(pres, std::abs(p - pp) / p);
    positive = positive && direct > 0.0;
    if (relative_energy(law, far.rho, far.momentum(), far) != 0.0) positive = false;
  }
  const double rt = seconds_since(t0);
  check(o, breg <= 1e-12, "bregman");
  check(o, pres <= 1e-13, "pressure");
  check(o, positive, "zero iff base state");
  check(o, rt < 5.0, "runtime");
  note(o, "bregman_rel=" + fmt("%.2e", breg) + " pressure_rel=" + fmt("%.2e", pres) + " runtime=" + fmt("%.2fs", rt));
  return o;
}

struct PsdSandwichStats {
  double min_scaled = INFINITY;
  double min_slack = INFINITY;
  std::size_t ensembles = 0;
  std::size_t blown_up = 0;
  double seconds = 0.0;
  std::array<std::size_t, 3> per_gamma{};
};

int gamma_slot(double g) { return g == 1.4 ? 0 : g == 2.0 ? 1 : g == 3.0 ? 2 : -1; }

const PsdSandwichStats& psd_sandwich() {
  static PsdSandwichStats st = [] {
    PsdSandwichStats s;
    const auto t0 = Clock::now();
    auto visit = [&](const Ensemble& e) {
      const CesaroField f = cesaro_average(e, e.size());
      const DefectField d = reynolds_defect(f, *e.grid, e.law);
      const Grid& g = *e.grid;
      for (const auto& snap : d.snapshots)
        for (std::size_t c : g.fluid_cells()) {
          const Sym2& R = snap.R[c];
          const double tr = R.trace();
          const double disc = std::sqrt(0.25 * (R.xx - R.yy) * (R.xx - R.yy) + R.xy * R.xy);
          s.min_scaled = std::min(s.min_scaled, (0.5 * tr - disc) / (1.0 + std::abs(tr)));
        }
      s.min_slack = std::min(s.min_slack, trace_energy_sandwich(f, g, e.law).min_slack);
      const int slot = gamma_slot(e.law.gamma);
      if (slot >= 0) ++s.per_gamma[slot];
      ++s.ensembles;
    };
    for (const auto& se : solver_ensembles()) {
      s.blown_up += se.blown_up;
      if (se.ens.size() >= 1) visit(se.ens);
    }
    std::mt19937_64 rng(7);
    const double gammas[3] = {1.4, 2.0, 3.0};
    for (int i = 0; i < 1000; ++i) {
      const Ensemble e = random_synthetic(rng, periodic_box(i % 2 == 0 ? 4 : 8, 1.0), {1.0, gammas[i % 3]},
                                          2 + i % 15, 3, i % 5 == 0 ? 0.1 : 0.0);
      visit(e);
    }
    s.seconds = seconds_since(t0);
    return s;
  }();
  return st;
}

Outcome criterion2() {
  const auto t0 = Clock::now();
  solver_ensembles();
  const double solve_s = seconds_since(t0);
  const auto& s = psd_sandwich();
  Outcome o;
  const double rt = solve_s + s.seconds;
  check(o, s.min_scaled >= -1e-10, "psd");
  check(o, s.ensembles >= 1050, "ensemble count");
  check(o, s.blown_up == 0, "blow-up");
  check(o, rt < 120.0, "runtime");
  note(o, "ensembles=" + std::to_string(s.ensembles) + " min_scaled_eigenvalue=" + fmt("%.3e", s.min_scaled) +
              " runtime=" + fmt("%.1fs", rt));
  return o;
}

Outcome criterion3() {
  const auto& s = psd_sandwich();
  Outcome o;
  check(o, s.min_slack >= -1e-12, "slack");
  for (std::size_t k : s.per_gamma) check(o, k > 0, "gamma coverage");
  const double gammas[3] = {1.4, 2.0, 3.0};
  for (double g : gammas) {
    const SandwichConstants c = sandwich_constants({1.0, g});
    const double c1 = std::max(0.5, 1.0 / ((g - 1.0) * 2.0)), c2 = std::max(2.0, 2.0 * (g - 1.0));
    check(o, c.c1 == c1 && c.c2 == c2, "constants");
  }
  note(o, "min_slack=" + fmt("%.3e", s.min_slack) + " per_gamma=" + std::to_string(s.per_gamma[0]) + "/" +
              std::to_string(s.per_gamma[1]) + "/" + std::to_string(s.per_gamma[2]));
  return o;
}

// Independent assembly of the momentum weak form pieces.
struct Forms {
  double bary = 0.0, defect = 0.0, member_mean = 0.0, viscous = 0.0;
};

Forms assemble_forms(const Ensemble& e, const VectorTestFunction& phi, const TimeWeight& psi) {
  const Grid& g = *e.grid;
  const DiscreteVectorTest dv = discretize(phi, g);
  const auto times = e.times();
  const TimeQuadrature tq = time_quadrature(times, psi);
  const double n = static_cast<double>(e.size());
  auto flux = [&](double rho, Vec2 m) {
    Sym2 f = pressure(e.law, rho) * Sym2::identity();
    if (rho > 0.0) f += (1.0 / rho) * Sym2::outer(m);
    return f;
  };
  Forms out;
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (std::size_t c : dv.cells) {
      double rho_bar = 0.0;
      Vec2 m_bar;
      Sym2 flux_bar;
      for (const auto& tr : e.members) {
        const FluidState& s = tr.states[k];
        rho_bar += s.rho[c];
        m_bar += s.m(c);
        flux_bar += flux(s.rho[c], s.m(c));
        out.member_mean += (tq.w_prime[k] * dot(s.m(c), dv.integral[c]) +
                            tq.w[k] * contract(flux(s.rho[c], s.m(c)), dv.grad_integral[c])) / n;
      }
      rho_bar /= n;
      m_bar = (1.0 / n) * m_bar;
      flux_bar = (1.0 / n) * flux_bar;
      const Sym2 R = flux_bar - flux(rho_bar, m_bar);
      out.bary += tq.w_prime[k] * dot(m_bar, dv.integral[c]) + tq.w[k] * contract(flux(rho_bar, m_bar), dv.grad_integral[c]);
      out.defect += tq.w[k] * contract(R, dv.grad_integral[c]);
    }
    for (const auto& tr : e.members) {
      const auto grad = velocity_gradients(tr.states[k], g, 1e-10);
      for (std::size_t c : dv.cells)
        out.viscous += tq.w[k] * tr.epsilon * contract(viscous_stress(e.visc, grad[c]), dv.grad_integral[c]) / n;
    }
  }
  return out;
}

Outcome criterion4() {
  Outcome o;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double gap = 0.0, lib_gap = 0.0, agree = 0.0;
  const TimeWeight psi{0.1, 0.9, 0.2};
  for (int i = 0; i < 200; ++i) {
    Ensemble e = random_synthetic(rng, periodic_box(4, 1.0), {0.5 + u(rng), 1.2 + u(rng)}, 2 + i % 6, 6, 0.0);
    const VectorTestFunction phi(
        BumpVector{{{0.4 * (u(rng) - 0.5), 0.4 * (u(rng) - 0.5)}, {0.5 + 0.1 * u(rng), 0.5 + 0.1 * u(rng)}},
                   {u(rng) - 0.5, u(rng) - 0.5}});
    const Forms f = assemble_forms(e, phi, psi);
    gap = std::max(gap, std::abs(f.bary + f.defect - (f.member_mean - f.viscous) - f.viscous));
    const DefectField d = reynolds_defect(cesaro_average(e, e.size()), *e.grid, e.law);
    const DefectResidualReport r = defect_momentum_residual(e, e.size(), d, phi, psi);
    lib_gap = std::max(lib_gap, std::abs(r.identity_gap));
    agree = std::max({agree, std::abs(r.barycentric_form - f.bary), std::abs(r.defect_pairing - f.defect),
                      std::abs(r.viscous_remainder - f.viscous)});
  }
  check(o, gap <= 1e-12, "oracle identity");
  check(o, lib_gap <= 1e-12, "library identity");
  check(o, agree <= 1e-12, "library vs oracle");
  note(o, "oracle_gap=" + fmt("%.2e", gap) + " library_gap=" + fmt("%.2e", lib_gap) + " agreement=" + fmt("%.2e", agree));
  return o;
}

Outcome criterion5() {
  const auto t0 = Clock::now();
  Outcome o;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Grid g(periodic_box(64, 5.0));
  const TimeWeight psi{0.1, 0.9, 0.2};
  const auto times = uniform_times(5, 1.0);
  double worst_slack = INFINITY, worst_ratio = 0.0;
  bool seen = true;
  for (int trial = 0; trial < 100; ++trial) {
    const double support = 1.0 + 0.5 * u(rng);
    const ConvexProfile F{0.5, 0.5 + 1.5 * u(rng)};
    DefectField d;
    d.n = 1;
    for (double t : times) {
      DefectSnapshot s;
      s.time = t;
      s.R.assign(g.size(), Sym2{});
      for (std::size_t c : g.fluid_cells()) {
        const double r = norm(g.center(c));
        if (r > support) continue;
        const Vec2 v{2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0};
        const double env = std::pow(1.0 - (r / support) * (r / support), 2);
        s.R[c] = env * (Sym2::outer(v) + Sym2{u(rng), 0.0, u(rng)});
      }
      d.snapshots.push_back(std::move(s));
    }
    const double L = 0.75 * support;
    const PairingReport a = convex_pairing(d, g, F, {}, L, psi);
    const PairingReport b = convex_pairing(d, g, F, {}, 2.0 * L, psi);
    for (const PairingReport* r : {&a, &b}) {
      const double scale = 1.0 + std::abs(r->hessian_term) + std::abs(r->trace_lower_bound);
      worst_slack = std::min(worst_slack, (r->hessian_term - r->trace_lower_bound) / scale);
    }
    seen = seen && a.cutoff_term != 0.0;
    worst_ratio = std::max(worst_ratio, a.cutoff_term != 0.0 ? std::abs(b.cutoff_term) / std::abs(a.cutoff_term) : INFINITY);
  }
  const double rt = seconds_since(t0);
  check(o, worst_slack >= -1e-10, "hessian vs trace");
  check(o, seen, "cutoff sees the support");
  check(o, worst_ratio <= 0.5, "cutoff decrease");
  check(o, rt < 30.0, "runtime");
  note(o, "min_scaled_slack=" + fmt("%.3e", worst_slack) + " max_cutoff_ratio=" + fmt("%.3e", worst_ratio) +
              " runtime=" + fmt("%.2fs", rt));
  return o;
}

Outcome criterion6() {
  const auto t0 = Clock::now();
  Outcome o;
  double worst = -INFINITY;
  std::size_t checks = 0;
  for (const auto& se : solver_ensembles()) {
    const Ensemble& e = se.ens;
    if (e.size() == 0) continue;
    const ObservableLibrary lib = make_library(*e.grid, se.cfg.observables.psi, 1, 4);
    const DefectField d = reynolds_defect(cesaro_average(e, e.size()), *e.grid, e.law);
    for (const auto& phi : lib.vectors) {
      const DefectResidualReport r = defect_momentum_residual(e, e.size(), d, phi, lib.psi);
      worst = std::max(worst, std::abs(r.viscous_remainder) - r.remainder_bound);
      ++checks;
    }
  }
  check(o, worst <= 0.0 && checks > 0, "remainder bound");

  // Harmonic schedule: remainder along N_max = 8, 32, 128.
  ExperimentConfig c;
  c.grid = periodic_box(32, 1.0);
  c.law = {1.0, 1.4};
  c.far = {1.0, {0.3, 0.0}};
  c.visc = {1.0, 0.5};
  c.epsilon.eps0 = 0.05;
  c.members = 128;
  c.seed = 99;
  c.initial.family = InitialFamily::kGaussianBump;
  c.initial.amplitude = 0.3;
  c.initial.width = 0.3;
  c.solver.t_end = 0.1;
  const SolverEnsemble se = solve_ensemble(c);
  check(o, se.blown_up == 0, "blow-up");
  const ObservableLibrary lib = make_library(*se.ens.grid, se.cfg.observables.psi, 1, 4);
  std::vector<double> series;
  for (std::size_t n : {8, 32, 128}) {
    const DefectField d = reynolds_defect(cesaro_average(se.ens, n), *se.ens.grid, se.ens.law);
    double total = 0.0;
    for (const auto& phi : lib.vectors) {
      const DefectResidualReport r = defect_momentum_residual(se.ens, n, d, phi, lib.psi);
      total += std::abs(r.viscous_remainder);
      check(o, std::abs(r.viscous_remainder) <= r.remainder_bound, "bound along schedule");
    }
    series.push_back(total);
  }
  check(o, series[1] <= 1.05 * series[0] && series[2] <= 1.05 * series[1], "monotone");
  note(o, "checks=" + std::to_string(checks) + " max_excess=" + fmt("%.3e", worst) + " remainder(8,32,128)=" +
              fmt("%.3e", series[0]) + "," + fmt("%.3e", series[1]) + "," + fmt("%.3e", series[2]) +
              " runtime=" + fmt("%.1fs", seconds_since(t0)));
  return o;
}

CompactRegion whole(const Grid& g) { return rectangle_cells(g, g.x_min(), g.x_max(), g.y_min(), g.y_max()); }

Outcome criterion7() {
  Outcome o;
  std::mt19937_64 rng(77);
  const std::vector<CompositeBump> bs = {{{1.0, 0.0, 0.0}, 1.5, 1.0}, {{1.5, 0.5, -0.5}, 1.0, 2.0}, {{0.5, 1.0, 0.0}, INFINITY, 1.0}};
  std::vector<std::size_t> schedule;
  for (std::size_t n = 1; n <= 9; ++n) schedule.push_back(n);

  // Dirac: identical synthetic members and identical solver members.
  std::vector<Ensemble> diracs;
  {
    Ensemble e = random_synthetic(rng, periodic_box(8, 1.0), {1.0, 1.4}, 1, 4, 0.0);
    for (int k = 0; k < 8; ++k) e.members.push_back(e.members[0]);
    diracs.push_back(std::move(e));
    ExperimentConfig c;
    c.grid = periodic_box(32, 1.0);
    c.members = 5;
    c.dirac = true;
    c.initial.family = InitialFamily::kGaussianBump;
    c.initial.amplitude = 0.3;
    c.solver.t_end = 0.05;
    diracs.push_back(solve_ensemble(c).ens);
  }
  double dirac_max = 0.0;
  for (const Ensemble& e : diracs) {
    const std::size_t n = e.size();
    const DefectField d = reynolds_defect(cesaro_average(e, n), *e.grid, e.law);
    for (const auto& s : d.snapshots)
      for (const Sym2& R : s.R) dirac_max = std::max({dirac_max, std::abs(R.xx), std::abs(R.xy), std::abs(R.yy)});
    const SpaceTimeSet set = full_window(e, whole(*e.grid));
    std::vector<CompositeTable> ref;
    for (const auto& b : bs) ref.push_back(composite_average(e, n, b, set.region));
    std::vector<std::size_t> sched;
    for (std::size_t k = 1; k <= n; ++k) sched.push_back(k);
    for (const auto& r : s_convergence_metric(e, sched, bs, ref, set)) dirac_max = std::max(dirac_max, r.distance);
    for (const auto& r : statistical_convergence_fraction(e, barycenter(e, n), 1e-6, set, sched))
      dirac_max = std::max(dirac_max, r.fraction);
  }
  check(o, dirac_max == 0.0, "dirac");

  // Alternating two-state ensemble against the two-state mixture.
  Ensemble alt;
  alt.grid = std::make_shared<const Grid>(periodic_box(8, 1.0));
  alt.law = {1.0, 1.4};
  alt.far = {1.0, {}};
  alt.visc = {1.0, 0.0};
  const double ra = 1.0, rb = 2.5;
  const Vec2 ma{1.0, 0.0}, mb{-0.5, 0.5};
  const auto times = uniform_times(4, 1.0);
  for (std::size_t k = 0; k < 9; ++k) {
    const bool a = k % 2 == 0;
    alt.members.push_back(synthetic_member(*alt.grid, alt.far, times, 0.1 / (k + 1), [&](std::size_t, double, double& r, Vec2& m) {
      r = a ? ra : rb;
      m = a ? ma : mb;
    }));
  }
  const SpaceTimeSet set = full_window(alt, whole(*alt.grid));
  std::vector<CompositeTable> ref;
  std::vector<double> gap;
  const double T = times.back() - times.front();
  for (const auto& b : bs) {
    const double va = evaluate_state(b, ra, ma), vb = evaluate_state(b, rb, mb);
    ref.push_back(CompositeTable(times.size(), std::vector<double>(set.region.cells.size(), 0.5 * (va + vb))));
    gap.push_back(std::abs(va - vb) * set.region.area * T);
  }
  double worst = 0.0;
  for (const auto& r : s_convergence_metric(alt, schedule, bs, ref, set)) {
    const double expected = r.n % 2 == 0 ? 0.0 : gap[r.composite] / (2.0 * r.n);
    worst = std::max(worst, std::abs(r.distance - expected));
  }
  check(o, worst <= 1e-12, "alternating S-distance");
  Ensemble even = alt;
  even.members.pop_back();
  const SpaceTimeSet eset = full_window(even, whole(*even.grid));
  double frac_min = 1.0;
  const std::size_t esched[] = {2, 4, 6, 8};
  for (const auto& r : statistical_convergence_fraction(even, barycenter(even, 8), 0.05, eset, esched))
    frac_min = std::min(frac_min, r.fraction);
  check(o, frac_min == 1.0, "alternating i8");
  note(o, "dirac_max=" + fmt("%.1e", dirac_max) + " alternating_err=" + fmt("%.2e", worst) +
              " i8_min=" + fmt("%.3f", frac_min));
  return o;
}

double slope(const std::vector<double>& h, const std::vector<double>& e) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]), y = std::log(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Outcome criterion8() {
  const auto t0 = Clock::now();
  Outcome o;
  // Translating density wave with constant velocity, forced by the pressure gradient.
  const GasLaw law{1.0, 1.4};
  const ViscosityPair visc{1.0, 0.5};
  const double c = 0.5, amp = 0.2, t_end = 0.5;
  auto rho_exact = [&](Vec2 x, double t) { return 1.0 + amp * std::sin(M_PI * (x.x - c * t)); };
  const SourceTerm source = [&](Vec2 x, double t, double& s_rho, Vec2& s_m) {
    const double r = rho_exact(x, t);
    s_rho = 0.0;
    s_m = {law.a * law.gamma * std::pow(r, law.gamma - 1.0) * amp * M_PI * std::cos(M_PI * (x.x - c * t)), 0.0};
  };
  const ScalarTestFunction phi(TensorBump{{0.1, 0.0}, {0.6, 0.6}});
  const VectorTestFunction phv(BumpVector{{{-0.1, 0.1}, {0.6, 0.6}}, {0.8, 0.6}});
  const TimeWeight psi{0.05, 0.45, 0.1};

  std::vector<double> hs, errs, res, errs_first;
  for (int n : {32, 64, 128}) {
    const Grid g(periodic_box(n, 1.0));
    const FarField far{1.0, {c, 0.0}};
    FluidState init = uniform_state(g, far);
    for (std::size_t k : g.fluid_cells()) {
      init.rho[k] = rho_exact(g.center(k), 0.0);
      init.mx[k] = c * init.rho[k];
      init.my[k] = 0.0;
    }
    SolverConfig sc;
    sc.t_end = t_end;
    sc.snapshot_times = uniform_times(101, t_end);
    sc.epsilon = 0.01;
    sc.reconstruction = Reconstruction::kMuscl;
    const Trajectory tr = solve(init, sc, g, law, visc, far, source);
    // First-order scheme, reported for reference only.
    SolverConfig first = sc;
    first.reconstruction = Reconstruction::kFirstOrder;
    first.snapshot_times = {0.0, t_end};
    const Trajectory tr1 = solve(init, first, g, law, visc, far, source);
    double err1 = 0.0;
    for (std::size_t k : g.fluid_cells())
      err1 += std::abs(tr1.states.back().rho[k] - rho_exact(g.center(k), t_end)) * g.cell_area();
    errs_first.push_back(err1);
    if (tr.status != TrajectoryStatus::kComplete) {
      check(o, false, "manufactured blow-up");
      return o;
    }
    const FluidState& last = tr.states.back();
    double err = 0.0;
    for (std::size_t k : g.fluid_cells()) err += std::abs(last.rho[k] - rho_exact(g.center(k), t_end)) * g.cell_area();
    // Weak residual with the forcing added to the momentum form.
    const WeakResidual w = weak_residual_ns(tr, g, law, visc, phi, phv, psi);
    const DiscreteVectorTest dv = discretize(phv, g);
    const TimeQuadrature tq = time_quadrature(tr.times(), psi);
    double forcing = 0.0;
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
      if (tq.w[k] == 0.0) continue;
      for (std::size_t cell : dv.cells) {
        double sr;
        Vec2 sm;
        source(g.center(cell), tr.states[k].time, sr, sm);
        forcing += tq.w[k] * dot(sm, dv.integral[cell]);
      }
    }
    hs.push_back(g.dx());
    errs.push_back(err);
    res.push_back(std::abs(w.continuity) + std::abs(w.momentum + forcing));
  }
  const double order = slope(hs, errs);
  const double order_a = std::log2(errs[0] / errs[1]), order_b = std::log2(errs[1] / errs[2]);
  const double res_slope = slope(hs, res);
  check(o, order >= 1.0, "L1 order");
  check(o, res_slope >= 0.9, "weak residual slope");

  // Constant states stay bitwise steady.
  bool steady = true;
  {
    GridConfig gc;
    gc.nx = gc.ny = 32;
    gc.x_min = gc.y_min = -2.0;
    gc.x_max = gc.y_max = 2.0;
    gc.boundary = BoundaryKind::kFarField;
    GridConfig with_disc = gc;
    with_disc.obstacle.shape = Disc{{0.0, 0.0}, 0.5};
    const std::pair<GridConfig, FarField> cases[] = {{with_disc, {1.0, {}}}, {gc, {1.3, {0.5, 0.2}}}};
    for (const auto& [cfg, far] : cases) {
      const Grid g(cfg);
      for (FluxKind f : {FluxKind::kRusanov, FluxKind::kHll})
      for (Reconstruction rec : {Reconstruction::kFirstOrder, Reconstruction::kMuscl}) {
        SolverConfig sc;
        sc.reconstruction = rec;
        sc.t_end = 0.3;
        sc.snapshot_times = {0.0, 0.3};
        sc.flux = f;
        sc.epsilon = 0.05;
        const FluidState init = uniform_state(g, far);
        const Trajectory tr = solve(init, sc, g, law, visc, far);
        const FluidState& s = tr.states.back();
        steady = steady && tr.status == TrajectoryStatus::kComplete && s.rho == init.rho && s.mx == init.mx &&
                 s.my == init.my;
      }
    }
  }
  check(o, steady, "constant steady");
  const double rt = seconds_since(t0);
  check(o, rt < 600.0, "runtime");
  note(o, "l1_errors=" + fmt("%.3e", errs[0]) + "," + fmt("%.3e", errs[1]) + "," + fmt("%.3e", errs[2]) +
              " order=" + fmt("%.3f", order) + " (pairwise " + fmt("%.3f", order_a) + "," + fmt("%.3f", order_b) +
              ") first_order_scheme_order=" + fmt("%.3f", slope(hs, errs_first)) +
              " weak_residual_slope=" + fmt("%.3f", res_slope) + " runtime=" + fmt("%.1fs", rt));
  return o;
}

Outcome criterion9() {
  Outcome o;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const Vec2 m{u(rng), u(rng)}, x{u(rng), u(rng)}, x0{u(rng), u(rng)};
    const Vec2 y = x - x0;
    const double lhs = dot(m, y) * dot(m, y) + dot(angular_kernel(x, x0) * m, m);
    const double rhs = norm2(y) * norm2(m);
    worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + rhs));
  }
  check(o, worst <= 1e-12, "angular identity");

  double diff = 0.0;
  std::size_t rows = 0;
  auto compare = [&](const Ensemble& e) {
    const ObservableLibrary lib = make_library(*e.grid, default_time_weight(e.times()), 6, 4);
    Ensemble p = e;
    std::shuffle(p.members.begin(), p.members.end(), rng);
    for (const Ensemble* other : {&e, static_cast<const Ensemble*>(&p)})
      for (const auto& r : statistical_equivalence_report(e, *other, lib)) {
        diff = std::max(diff, r.abs_diff);
        ++rows;
      }
  };
  for (int i = 0; i < 10; ++i) compare(random_synthetic(rng, periodic_box(16, 1.0), {1.0, 1.4}, 3 + i, 5, 0.05));
  for (std::size_t i = 0; i < 6; ++i) {
    const auto& se = solver_ensembles()[i];
    if (se.ens.size() > 0) compare(se.ens);
  }
  check(o, diff == 0.0, "equivalence");
  note(o, "max_scaled_violation=" + fmt("%.2e", worst) + " equivalence_rows=" + std::to_string(rows) +
              " max_abs_diff=" + fmt("%.1e", diff));
  return o;
}

Outcome criterion10() {
  Outcome o;
  GridConfig gc;
  gc.nx = gc.ny = 64;
  gc.x_min = gc.y_min = -2.0;
  gc.x_max = gc.y_max = 2.0;
  gc.boundary = BoundaryKind::kFarField;
  const GasLaw law{1.0, 1.4};
  const FarField far{1.0, {0.3, 0.0}};
  Ensemble e;
  e.grid = std::make_shared<const Grid>(gc);
  e.law = law;
  e.far = far;
  const Grid& g = *e.grid;
  const auto times = uniform_times(3, 1.0);

  // Compact perturbations: synthetic, and a solver run whose support is measured.
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 3; ++k)
    e.members.push_back(synthetic_member(g, far, times, 0.1, [&](std::size_t c, double, double& r, Vec2& m) {
      if (norm(g.center(c)) < 0.3) {
        r = 0.5 + u(rng);
        m = {u(rng), u(rng)};
      } else {
        r = far.rho;
        m = far.momentum();
      }
    }));
  double outside = 0.0;
  for (const auto& row : far_field_decay(e, e.size(), {}, {0.35, 0.5, 0.75, 1.0}))
    outside = std::max({outside, row.value, row.bound_inside, row.bound_outside});

  {
    FluidState init = uniform_state(g, far);
    for (std::size_t c : g.fluid_cells())
      if (norm(g.center(c)) < 0.25) init.rho[c] = 1.5, init.mx[c] = 1.5 * far.u.x;
    SolverConfig sc;
    sc.t_end = 0.05;
    sc.snapshot_times = {0.0, 0.025, 0.05};
    sc.epsilon = 0.01;
    Ensemble s = e;
    s.members = {solve(init, sc, g, law, {1.0, 0.0}, far)};
    double support = 0.0;
    for (const auto& st : s.members[0].states)
      for (std::size_t c : g.fluid_cells())
        if (st.rho[c] != far.rho || st.m(c) != far.momentum()) support = std::max(support, norm(g.center(c)));
    const double L = support + g.dx();
    if (2.0 * L <= 2.0)
      for (const auto& row : far_field_decay(s, 1, {}, {L})) outside = std::max(outside, row.value);
    else
      check(o, false, "solver support too wide");
    note(o, "solver_support=" + fmt("%.3f", support));
  }
  check(o, outside == 0.0, "zero beyond support");

  // Annulus-area oracle: |m - m_inf| = 1 everywhere.
  Ensemble unit = e;
  unit.members = {synthetic_member(g, far, times, 0.1, [&](std::size_t, double, double& r, Vec2& m) {
    r = far.rho;
    m = far.momentum() + Vec2{0.0, 1.0};
  })};
  const double L = 0.5;
  const DecayRow row = far_field_decay(unit, 1, {}, {L})[0];
  std::size_t count = 0;
  for (std::size_t c : g.fluid_cells()) {
    const double r = norm(g.center(c));
    if (r >= L && r <= 2.0 * L) ++count;
  }
  const double oracle = std::round(3.0 * M_PI * L * L / g.cell_area());
  check(o, std::abs(static_cast<double>(count) - oracle) <= 16.0, "enumeration");
  check(o, std::abs(row.value - count * g.cell_area() / L) <= 1e-12 * row.value, "area/L");
  check(o, std::abs(row.value / (3.0 * M_PI * L) - 1.0) <= 4.0 * g.dx() / L, "3 pi L");
  note(o, "max_outside=" + fmt("%.1e", outside) + " annulus_cells=" + std::to_string(count) + " oracle=" +
              fmt("%.0f", oracle) + " value=" + fmt("%.6f", row.value) + " 3piL=" + fmt("%.6f", 3.0 * M_PI * L));
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"thermodynamic identities", criterion1},
      {"defect PSD", criterion2},
      {"trace-energy sandwich", criterion3},
      {"exact defect identity", criterion4},
      {"convex pairing", criterion5},
      {"viscous remainder bound", criterion6},
      {"degenerate limits", criterion7},
      {"solver verification", criterion8},
      {"angular identity and equivalence", criterion9},
      {"far-field decay", criterion10},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
