#include "vvl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vvl/error.hpp"

namespace vvl {

namespace {

inline void running_mean(double& avg, double x, double n) {
  if (std::isinf(avg)) return;
  if (std::isinf(x)) {
    avg = x;
    return;
  }
  avg += (x - avg) / n;
}

inline void running_mean(Vec2& avg, Vec2 x, double n) {
  running_mean(avg.x, x.x, n);
  running_mean(avg.y, x.y, n);
}

inline void running_mean(Sym2& avg, const Sym2& x, double n) {
  running_mean(avg.xx, x.xx, n);
  running_mean(avg.xy, x.xy, n);
  running_mean(avg.yy, x.yy, n);
}

void check_upto(const Ensemble& ens, std::size_t upto) {
  require(upto >= 1 && upto <= ens.size(), ErrorCode::kInvalidArgument, "N must lie in [1, member count]");
}

std::size_t max_schedule(std::span<const std::size_t> schedule, const Ensemble& ens) {
  std::size_t mx = 0;
  for (std::size_t n : schedule) {
    require(n >= 1 && n <= ens.size(), ErrorCode::kInvalidArgument, "schedule entry outside [1, member count]");
    mx = std::max(mx, n);
  }
  return mx;
}

}  // namespace

std::vector<double> Ensemble::times() const {
  require(!members.empty(), ErrorCode::kInvalidArgument, "empty ensemble");
  return members.front().times();
}

void validate(const Ensemble& ens) {
  require(ens.grid != nullptr, ErrorCode::kInvalidArgument, "ensemble has no grid");
  require(!ens.members.empty(), ErrorCode::kInvalidArgument, "empty ensemble");
  const auto t0 = ens.members.front().times();
  require(!t0.empty(), ErrorCode::kMismatch, "member without snapshots");
  for (const auto& m : ens.members) {
    require(m.states.size() == t0.size(), ErrorCode::kMismatch, "members have different snapshot counts");
    for (std::size_t k = 0; k < t0.size(); ++k) {
      require(std::abs(m.states[k].time - t0[k]) <= 1e-12 * std::max(1.0, std::abs(t0[k])), ErrorCode::kMismatch,
              "members have different snapshot times");
      require(m.states[k].size() == ens.grid->size(), ErrorCode::kMismatch, "member state does not match the grid");
    }
  }
}

void check_epsilon_schedule(const Ensemble& ens, bool allow_equal) {
  for (std::size_t n = 1; n < ens.size(); ++n) {
    const double a = ens.members[n - 1].epsilon, b = ens.members[n].epsilon;
    require(allow_equal ? b <= a : b < a, ErrorCode::kConfig, "epsilon schedule is not decreasing");
  }
}

Sym2 convective_tensor(double rho, Vec2 m) { return rho > 0.0 ? (1.0 / rho) * Sym2::outer(m) : Sym2{}; }

double kinetic_density(double rho, Vec2 m) { return rho > 0.0 ? norm2(m) / rho : 0.0; }

CesaroAccumulator::CesaroAccumulator(std::shared_ptr<const Grid> grid, GasLaw law, FarField far)
    : grid_(std::move(grid)), law_(law), far_(far) {
  require(grid_ != nullptr, ErrorCode::kInvalidArgument, "accumulator needs a grid");
}

void CesaroAccumulator::add(const Trajectory& member) {
  const std::size_t cells = grid_->size();
  if (field_.n == 0) {
    field_.snapshots.resize(member.states.size());
    for (std::size_t k = 0; k < member.states.size(); ++k) {
      auto& s = field_.snapshots[k];
      s.time = member.states[k].time;
      s.rho.assign(cells, 0.0);
      s.m.assign(cells, Vec2{});
      s.convective.assign(cells, Sym2{});
      s.pressure.assign(cells, 0.0);
      s.kinetic.assign(cells, 0.0);
      s.potential.assign(cells, 0.0);
      s.relative_energy.assign(cells, 0.0);
    }
  }
  require(member.states.size() == field_.snapshots.size(), ErrorCode::kMismatch,
          "member snapshot count differs from the ensemble");
  field_.n += 1;
  const double n = static_cast<double>(field_.n);
  for (std::size_t k = 0; k < member.states.size(); ++k) {
    const FluidState& st = member.states[k];
    require(st.size() == cells, ErrorCode::kMismatch, "member state does not match the grid");
    auto& s = field_.snapshots[k];
    for (std::size_t c = 0; c < cells; ++c) {
      if (grid_->kind(c) == CellKind::kSolid) continue;
      const double rho = st.rho[c];
      const Vec2 m = st.m(c);
      running_mean(s.rho[c], rho, n);
      running_mean(s.m[c], m, n);
      running_mean(s.convective[c], convective_tensor(rho, m), n);
      running_mean(s.pressure[c], pressure(law_, rho), n);
      running_mean(s.kinetic[c], kinetic_density(rho, m), n);
      running_mean(s.potential[c], pressure_potential(law_, rho), n);
      const double e = relative_energy(law_, rho, m, far_);
      if (std::isinf(e) && grid_->is_fluid(c)) ++field_.infeasible_cells;
      running_mean(s.relative_energy[c], e, n);
    }
  }
}

CesaroField cesaro_average(const Ensemble& ens, std::size_t upto) {
  validate(ens);
  check_upto(ens, upto);
  CesaroAccumulator acc(ens.grid, ens.law, ens.far);
  for (std::size_t n = 0; n < upto; ++n) acc.add(ens.members[n]);
  return acc.field();
}

std::vector<MeanField> barycenter(const CesaroField& field) {
  std::vector<MeanField> out;
  out.reserve(field.snapshots.size());
  for (const auto& s : field.snapshots) out.push_back({s.time, s.rho, s.m});
  return out;
}

std::vector<MeanField> barycenter(const Ensemble& ens, std::size_t upto) {
  return barycenter(cesaro_average(ens, upto));
}

double sup_relative_energy(const Trajectory& traj, const Grid& grid, const GasLaw& law, const FarField& far) {
  double sup = 0.0;
  for (const auto& s : traj.states) {
    double e = 0.0;
    for (std::size_t c : grid.fluid_cells()) e += relative_energy(law, s.rho[c], s.m(c), far);
    sup = std::max(sup, e * grid.cell_area());
  }
  return sup;
}

double member_budget(const Trajectory& traj, const Grid& grid, const GasLaw& law, const FarField& far) {
  return sup_relative_energy(traj, grid, law, far) + traj.dissipation_total();
}

double energy_budget(const Ensemble& ens, std::size_t upto) {
  validate(ens);
  check_upto(ens, upto);
  double avg = 0.0;
  for (std::size_t n = 0; n < upto; ++n)
    running_mean(avg, member_budget(ens.members[n], *ens.grid, ens.law, ens.far), static_cast<double>(n + 1));
  return avg;
}

double CompositeBump::operator()(std::span<const double> v) const {
  if (std::isinf(width)) return height;
  require(v.size() == center.size(), ErrorCode::kInvalidArgument, "composite argument has the wrong dimension");
  double q = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) q += (v[i] - center[i]) * (v[i] - center[i]);
  q /= width * width;
  if (q >= 1.0) return 0.0;
  const double s = 1.0 - q;
  return height * s * s * s;
}

double CompositeBump::bound() const { return std::abs(height); }

double evaluate_state(const CompositeBump& b, double rho, Vec2 m) {
  const double v[3] = {rho, m.x, m.y};
  return b(v);
}

namespace {

struct DiscreteObservable {
  std::vector<DiscreteScalarTest> scalars;
  std::vector<DiscreteVectorTest> vectors;
};

DiscreteObservable discretize_observable(const FunctionalObservable& obs, const Grid& grid) {
  DiscreteObservable d;
  for (const auto& s : obs.scalars) d.scalars.push_back(discretize(s, grid));
  for (const auto& v : obs.vectors) d.vectors.push_back(discretize(v, grid));
  return d;
}

std::vector<double> arguments(const Trajectory& traj, const DiscreteObservable& d, const TimeWeight& psi) {
  const auto times = traj.times();
  const auto tq = time_quadrature(times, psi);
  std::vector<double> out;
  for (const auto& s : d.scalars) {
    double v = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (tq.w[k] == 0.0) continue;
      double space = 0.0;
      for (std::size_t c : s.cells) space += traj.states[k].rho[c] * s.integral[c];
      v += tq.w[k] * space;
    }
    out.push_back(v);
  }
  for (const auto& s : d.vectors) {
    double v = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (tq.w[k] == 0.0) continue;
      double space = 0.0;
      for (std::size_t c : s.cells) space += dot(traj.states[k].m(c), s.integral[c]);
      v += tq.w[k] * space;
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

std::vector<double> observable_arguments(const Trajectory& traj, const Grid& grid, const FunctionalObservable& obs) {
  return arguments(traj, discretize_observable(obs, grid), obs.psi);
}

double expectation(const Ensemble& ens, std::size_t upto, const FunctionalObservable& obs) {
  validate(ens);
  check_upto(ens, upto);
  const auto d = discretize_observable(obs, *ens.grid);
  double avg = 0.0;
  for (std::size_t n = 0; n < upto; ++n)
    running_mean(avg, obs.b(arguments(ens.members[n], d, obs.psi)), static_cast<double>(n + 1));
  return avg;
}

ModulusReport modulus_of_continuity(const Ensemble& ens, std::size_t upto, const ScalarTestFunction& phi,
                                    const VectorTestFunction& phi_vec, double coercivity_constant) {
  validate(ens);
  check_upto(ens, upto);
  const auto times = ens.times();
  require(times.size() >= 2, ErrorCode::kInvalidArgument, "modulus of continuity needs at least 2 snapshots");
  const Grid& grid = *ens.grid;
  const auto ds = discretize(phi, grid);
  const auto dv = discretize(phi_vec, grid);
  const double q = 2.0 * ens.law.gamma / (ens.law.gamma + 1.0);
  const double span = times.back() - times.front();
  const double nu_max = std::max(ens.visc.mu, ens.visc.lambda);

  ModulusReport rep;
  for (std::size_t n = 0; n < upto; ++n) {
    const Trajectory& tr = ens.members[n];
    std::vector<double> a(times.size(), 0.0), b(times.size(), 0.0);
    double flux_sup = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      const FluidState& s = tr.states[k];
      for (std::size_t c : ds.cells) a[k] += s.rho[c] * ds.integral[c];
      double flux = 0.0;
      for (std::size_t c : dv.cells) {
        b[k] += dot(s.m(c), dv.integral[c]);
        flux += kinetic_density(s.rho[c], s.m(c)) + std::sqrt(2.0) * pressure(ens.law, std::max(s.rho[c], 0.0));
      }
      flux_sup = std::max(flux_sup, flux * grid.cell_area());
    }
    double lip = 0.0, hol = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k)
      for (std::size_t l = k + 1; l < times.size(); ++l) {
        const double dt = times[l] - times[k];
        lip = std::max(lip, std::abs(a[l] - a[k]) / dt);
        hol = std::max(hol, std::abs(b[l] - b[k]) / std::sqrt(dt));
      }
    const double cb = coercivity_constant * sup_relative_energy(tr, grid, ens.law, ens.far);
    const double area_s = ds.support_area, area_v = dv.support_area;
    const double lip_bound = ds.sup_gradient * (norm(ens.far.momentum()) * area_s + std::sqrt(area_s * cb) +
                                                std::pow(area_s, 1.0 - 1.0 / q) * std::pow(cb, 1.0 / q));
    const double hol_bound =
        dv.sup_gradient * (std::sqrt(span) * flux_sup +
                           std::sqrt(area_v) * std::sqrt(2.0 * tr.epsilon * nu_max * tr.dissipation_total()));
    const double w = static_cast<double>(n + 1);
    running_mean(rep.lipschitz_stat, lip, w);
    running_mean(rep.holder_half_stat, hol, w);
    running_mean(rep.lipschitz_bound, lip_bound, w);
    running_mean(rep.holder_half_bound, hol_bound, w);
  }
  return rep;
}

CompositeTable composite_average(const Ensemble& ens, std::size_t upto, const CompositeBump& b,
                                 const CompactRegion& region) {
  validate(ens);
  check_upto(ens, upto);
  const std::size_t nt = ens.members.front().states.size();
  CompositeTable table(nt, std::vector<double>(region.cells.size(), 0.0));
  for (std::size_t n = 0; n < upto; ++n) {
    const double w = static_cast<double>(n + 1);
    for (std::size_t k = 0; k < nt; ++k) {
      const FluidState& s = ens.members[n].states[k];
      for (std::size_t p = 0; p < region.cells.size(); ++p) {
        const std::size_t c = region.cells[p];
        running_mean(table[k][p], evaluate_state(b, s.rho[c], s.m(c)), w);
      }
    }
  }
  return table;
}

double table_l1_distance(const CompositeTable& a, const CompositeTable& b, std::span<const double> times,
                         const SpaceTimeSet& set, double cell_area) {
  require(a.size() == b.size() && a.size() == times.size(), ErrorCode::kMismatch, "table time sizes differ");
  const auto w = trapezoid_weights(times, set.t0, set.t1);
  double total = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (w[k] == 0.0) continue;
    require(a[k].size() == b[k].size(), ErrorCode::kMismatch, "table region sizes differ");
    double space = 0.0;
    for (std::size_t p = 0; p < a[k].size(); ++p) space += std::abs(a[k][p] - b[k][p]);
    total += w[k] * space * cell_area;
  }
  return total;
}

std::vector<SConvergenceRow> s_convergence_metric(const Ensemble& ens, std::span<const std::size_t> schedule,
                                                  std::span<const CompositeBump> composites,
                                                  std::span<const CompositeTable> reference, const SpaceTimeSet& set) {
  validate(ens);
  require(composites.size() == reference.size(), ErrorCode::kMismatch, "one reference table per composite required");
  for (std::size_t c : set.region.cells)
    require(ens.grid->is_fluid(c), ErrorCode::kSupport, "region K must consist of fluid cells");
  const std::size_t n_max = max_schedule(schedule, ens);
  const auto times = ens.times();
  const std::size_t nt = times.size();
  std::vector<CompositeTable> avg(composites.size(),
                                  CompositeTable(nt, std::vector<double>(set.region.cells.size(), 0.0)));
  std::vector<SConvergenceRow> rows;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const Trajectory& tr = ens.members[n - 1];
    for (std::size_t j = 0; j < composites.size(); ++j)
      for (std::size_t k = 0; k < nt; ++k)
        for (std::size_t p = 0; p < set.region.cells.size(); ++p) {
          const std::size_t c = set.region.cells[p];
          running_mean(avg[j][k][p], evaluate_state(composites[j], tr.states[k].rho[c], tr.states[k].m(c)),
                       static_cast<double>(n));
        }
    if (std::find(schedule.begin(), schedule.end(), n) == schedule.end()) continue;
    for (std::size_t j = 0; j < composites.size(); ++j)
      rows.push_back({n, j, table_l1_distance(avg[j], reference[j], times, set, ens.grid->cell_area())});
  }
  return rows;
}

double member_deviation(const Trajectory& traj, std::span<const MeanField> reference, const GasLaw& law,
                        const SpaceTimeSet& set, double cell_area) {
  require(reference.size() == traj.states.size(), ErrorCode::kMismatch, "reference has a different time count");
  const auto times = traj.times();
  const auto w = trapezoid_weights(times, set.t0, set.t1);
  const double q = 2.0 * law.gamma / (law.gamma + 1.0);
  double rho_int = 0.0, m_int = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (w[k] == 0.0) continue;
    double rs = 0.0, ms = 0.0;
    for (std::size_t c : set.region.cells) {
      rs += std::pow(std::abs(traj.states[k].rho[c] - reference[k].rho[c]), law.gamma);
      ms += std::pow(norm(traj.states[k].m(c) - reference[k].m[c]), q);
    }
    rho_int += w[k] * rs * cell_area;
    m_int += w[k] * ms * cell_area;
  }
  return std::pow(rho_int, 1.0 / law.gamma) + std::pow(m_int, 1.0 / q);
}

std::vector<FractionRow> statistical_convergence_fraction(const Ensemble& ens, std::span<const MeanField> reference,
                                                          double threshold, const SpaceTimeSet& set,
                                                          std::span<const std::size_t> schedule) {
  validate(ens);
  require(threshold >= 0.0, ErrorCode::kInvalidArgument, "threshold must be >= 0");
  for (std::size_t c : set.region.cells)
    require(ens.grid->is_fluid(c), ErrorCode::kSupport, "region K must consist of fluid cells");
  const std::size_t n_max = max_schedule(schedule, ens);
  std::vector<int> far(n_max, 0);
  for (std::size_t n = 0; n < n_max; ++n)
    far[n] = member_deviation(ens.members[n], reference, ens.law, set, ens.grid->cell_area()) > threshold;
  std::vector<FractionRow> rows;
  for (std::size_t n : schedule) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) count += far[i];
    rows.push_back({n, static_cast<double>(count) / static_cast<double>(n)});
  }
  return rows;
}

SpaceTimeSet full_window(const Ensemble& ens, CompactRegion region) {
  const auto t = ens.times();
  return {t.front(), t.back(), std::move(region)};
}

}  // namespace vvl
