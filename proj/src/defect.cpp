#include "vvl/defect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vvl/error.hpp"
#include "vvl/quadrature.hpp"
#include "vvl/snapshot_io.hpp"

namespace vvl {

namespace {

constexpr double kDim = 2.0;

// Time weights averaging over the snapshot window; a single snapshot gets weight 1.
std::vector<double> window_average_weights(std::span<const double> times) {
  if (times.size() == 1) return {1.0};
  auto w = trapezoid_weights(times, times.front(), times.back());
  const double len = times.back() - times.front();
  for (double& x : w) x /= len;
  return w;
}

}  // namespace

DefectField reynolds_defect(const CesaroField& cesaro, const Grid& grid, const GasLaw& law) {
  DefectField out;
  out.n = cesaro.n;
  out.snapshots.reserve(cesaro.snapshots.size());
  for (const auto& s : cesaro.snapshots) {
    require(s.rho.size() == grid.size(), ErrorCode::kMismatch, "Cesaro field does not match the grid");
    DefectSnapshot d;
    d.time = s.time;
    d.R.assign(grid.size(), Sym2{});
    for (std::size_t c : grid.fluid_cells()) {
      const Sym2 mean_flux = s.convective[c] + s.pressure[c] * Sym2::identity();
      const Sym2 flux_of_mean = convective_tensor(s.rho[c], s.m[c]) + pressure(law, s.rho[c]) * Sym2::identity();
      d.R[c] = mean_flux - flux_of_mean;
    }
    out.snapshots.push_back(std::move(d));
  }
  return out;
}

void write_defect(const std::string& path, const DefectSnapshot& defect, const MeanField& mean, const Grid& grid,
                  double epsilon) {
  PlaneFile f;
  f.nx = static_cast<std::uint32_t>(grid.nx());
  f.ny = static_cast<std::uint32_t>(grid.ny());
  f.time = defect.time;
  f.epsilon = epsilon;
  const std::size_t n = grid.size();
  std::vector<double> mx(n), my(n), r11(n), r12(n), r22(n);
  for (std::size_t c = 0; c < n; ++c) {
    mx[c] = mean.m[c].x;
    my[c] = mean.m[c].y;
    r11[c] = defect.R[c].xx;
    r12[c] = defect.R[c].xy;
    r22[c] = defect.R[c].yy;
  }
  f.planes = {mean.rho, std::move(mx), std::move(my), std::move(r11), std::move(r12), std::move(r22)};
  write_planes(path, f);
}

PsdReport psd_check(const DefectField& defect, const Grid& grid, double tol) {
  PsdReport rep;
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  rep.min_scaled_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& s : defect.snapshots)
    for (std::size_t c : grid.fluid_cells()) {
      const Sym2& r = s.R[c];
      const double lo = eigenvalues(r)[0];
      const double scale = 1.0 + std::abs(r.trace());
      rep.min_eigenvalue = std::min(rep.min_eigenvalue, lo);
      rep.min_scaled_eigenvalue = std::min(rep.min_scaled_eigenvalue, lo / scale);
      if (!(lo >= -tol * scale)) ++rep.failing_cells;
    }
  if (!std::isfinite(rep.min_eigenvalue)) rep.min_eigenvalue = rep.min_scaled_eigenvalue = 0.0;
  rep.pass = rep.failing_cells == 0;
  return rep;
}

SandwichConstants sandwich_constants(const GasLaw& law) {
  const double gd = (law.gamma - 1.0) * kDim;
  return {std::max(0.5, 1.0 / gd), std::max(2.0, gd)};
}

SandwichReport trace_energy_sandwich(const CesaroField& cesaro, const Grid& grid, const GasLaw& law) {
  SandwichReport rep;
  rep.constants = sandwich_constants(law);
  rep.min_slack = rep.min_kinetic_gap = rep.min_potential_gap = std::numeric_limits<double>::infinity();
  const double gd = (law.gamma - 1.0) * kDim;
  for (const auto& s : cesaro.snapshots)
    for (std::size_t c : grid.fluid_cells()) {
      const double gk = s.kinetic[c] - kinetic_density(s.rho[c], s.m[c]);
      const double gp = s.potential[c] - pressure_potential(law, s.rho[c]);
      const double energy_gap = 0.5 * gk + gp;
      const double trace_gap = gk + gd * gp;
      const double slack = std::min(rep.constants.c1 * trace_gap - energy_gap, rep.constants.c2 * energy_gap - trace_gap);
      rep.min_slack = std::min(rep.min_slack, slack);
      rep.min_kinetic_gap = std::min(rep.min_kinetic_gap, gk);
      rep.min_potential_gap = std::min(rep.min_potential_gap, gp);
      ++rep.cells;
    }
  if (rep.cells == 0) rep.min_slack = rep.min_kinetic_gap = rep.min_potential_gap = 0.0;
  return rep;
}

PairingReport convex_pairing(const DefectField& defect, const Grid& grid, const ConvexProfile& profile, Vec2 x0,
                             double L, const TimeWeight& psi) {
  require(profile.radius >= 0.0 && profile.plateau >= 0.0, ErrorCode::kInvalidArgument, "invalid convex profile");
  require(L >= profile.radius && L > 0.0, ErrorCode::kInvalidArgument, "L must be >= R0");
  if (!grid.obstacle().empty())
    require(grid.obstacle().enclosing_radius(x0) <= profile.radius * (1.0 + 1e-12), ErrorCode::kGeometry,
            "the ball about x0 does not contain the obstacle");
  std::vector<double> times;
  for (const auto& s : defect.snapshots) times.push_back(s.time);
  const auto tq = time_quadrature(times, psi);

  PairingReport rep;
  rep.truncated = !annulus_inside_box(grid, x0, L);
  const double area = grid.cell_area();
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (tq.w[k] == 0.0) continue;
    double hess = 0.0, cut = 0.0, lower = 0.0;
    for (std::size_t c : grid.fluid_cells()) {
      const Sym2& R = defect.snapshots[k].R[c];
      const Vec2 y = grid.center(c) - x0;
      const double r = norm(y);
      const double z = r * r;
      const double chi = Cutoff::value(r / L);
      if (chi == 0.0 && Cutoff::d1(r / L) == 0.0) continue;
      const double f1 = profile.d1(z), f2 = profile.d2(z);
      const Sym2 yy = Sym2::outer(y);
      hess += chi * (4.0 * f2 * contract(yy, R) + 2.0 * f1 * R.trace());
      lower += 2.0 * chi * f1 * R.trace();
      if (r > 0.0) cut += (2.0 / L) * Cutoff::d1(r / L) * f1 * contract(yy, R) / r;
    }
    rep.hessian_term += tq.w[k] * hess * area;
    rep.cutoff_term += tq.w[k] * cut * area;
    rep.trace_lower_bound += tq.w[k] * lower * area;
  }
  rep.pairing = rep.hessian_term + rep.cutoff_term;
  return rep;
}

std::vector<DecayRow> far_field_decay(const Ensemble& ens, std::size_t upto, Vec2 x0,
                                      const std::vector<double>& L_schedule) {
  validate(ens);
  require(upto >= 1 && upto <= ens.size(), ErrorCode::kInvalidArgument, "N must lie in [1, member count]");
  for (std::size_t i = 0; i < L_schedule.size(); ++i) {
    require(L_schedule[i] > 0.0, ErrorCode::kInvalidArgument, "L must be positive");
    if (i > 0) require(L_schedule[i] > L_schedule[i - 1], ErrorCode::kInvalidArgument, "L schedule must increase");
  }
  const Grid& grid = *ens.grid;
  const auto times = ens.times();
  const auto w = window_average_weights(times);
  const Vec2 m_inf = ens.far.momentum();
  const double e1 = (ens.law.gamma + 1.0) / (2.0 * ens.law.gamma);

  std::vector<DecayRow> rows;
  for (double L : L_schedule) {
    const CompactRegion region = annulus_cells(grid, x0, L);
    DecayRow row;
    row.L = L;
    row.area = region.area;
    row.truncated = !annulus_inside_box(grid, x0, L);
    double in = 0.0, out = 0.0, b_in = 0.0, b_out = 0.0;
    for (std::size_t n = 0; n < upto; ++n) {
      double mi = 0.0, mo = 0.0, bi = 0.0, bo = 0.0;
      for (std::size_t k = 0; k < times.size(); ++k) {
        if (w[k] == 0.0) continue;
        const FluidState& s = ens.members[n].states[k];
        double si = 0.0, so = 0.0, e = 0.0;
        for (std::size_t c : region.cells) {
          const double dev = norm(s.m(c) - m_inf);
          if (s.rho[c] >= 0.5 * ens.far.rho && s.rho[c] <= 2.0 * ens.far.rho) si += dev; else so += dev;
          e += relative_energy(ens.law, s.rho[c], s.m(c), ens.far);
        }
        e *= grid.cell_area();
        mi += w[k] * si * grid.cell_area();
        mo += w[k] * so * grid.cell_area();
        bi += w[k] * std::sqrt(e);
        bo += w[k] * std::pow(e, e1);
      }
      const double nn = static_cast<double>(n + 1);
      in += (mi - in) / nn;
      out += (mo - out) / nn;
      b_in += (bi - b_in) / nn;
      b_out += (bo - b_out) / nn;
    }
    row.split_inside = in / L;
    row.split_outside = out / L;
    row.value = (in + out) / L;
    row.bound_inside = std::pow(L, (kDim - 2.0) / 2.0) * b_in;
    row.bound_outside = std::pow(L, kDim * (ens.law.gamma - 1.0) / (2.0 * ens.law.gamma) - 1.0) * b_out;
    rows.push_back(row);
  }
  return rows;
}

DefectResidualReport defect_momentum_residual(const Ensemble& ens, std::size_t upto, const DefectField& defect,
                                              const VectorTestFunction& phi, const TimeWeight& psi,
                                              double density_floor_factor) {
  validate(ens);
  require(upto >= 1 && upto <= ens.size(), ErrorCode::kInvalidArgument, "N must lie in [1, member count]");
  const Grid& grid = *ens.grid;
  const auto times = ens.times();
  require(defect.snapshots.size() == times.size(), ErrorCode::kMismatch, "defect and ensemble times differ");
  const auto dv = discretize(phi, grid);
  const auto tq = time_quadrature(times, psi);
  const double floor = density_floor_factor * ens.far.rho;

  // Barycenter and defect from the same running means as the members.
  const CesaroField ces = cesaro_average(ens, upto);
  DefectResidualReport rep;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (tq.w[k] == 0.0 && tq.w_prime[k] == 0.0) continue;
    const auto& s = ces.snapshots[k];
    double bt = 0.0, bx = 0.0, dx = 0.0;
    for (std::size_t c : dv.cells) {
      bt += dot(s.m[c], dv.integral[c]);
      const Sym2 flux = convective_tensor(s.rho[c], s.m[c]) + pressure(ens.law, s.rho[c]) * Sym2::identity();
      bx += contract(flux, dv.grad_integral[c]);
      dx += contract(defect.snapshots[k].R[c], dv.grad_integral[c]);
    }
    rep.barycentric_form += tq.w_prime[k] * bt + tq.w[k] * bx;
    rep.defect_pairing += tq.w[k] * dx;
  }

  double ns_mean = 0.0;
  for (std::size_t n = 0; n < upto; ++n) {
    const Trajectory& tr = ens.members[n];
    const bool viscous = tr.epsilon > 0.0 && (ens.visc.mu > 0.0 || ens.visc.lambda > 0.0);
    double a = 0.0, v = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (tq.w[k] == 0.0 && tq.w_prime[k] == 0.0) continue;
      const FluidState& s = tr.states[k];
      double at = 0.0, ax = 0.0, vx = 0.0;
      std::vector<Mat2> g;
      if (viscous && tq.w[k] != 0.0) g = velocity_gradients(s, grid, floor);
      for (std::size_t c : dv.cells) {
        at += dot(s.m(c), dv.integral[c]);
        const Sym2 flux = convective_tensor(s.rho[c], s.m(c)) + pressure(ens.law, s.rho[c]) * Sym2::identity();
        ax += contract(flux, dv.grad_integral[c]);
        if (!g.empty()) vx += contract(viscous_stress(ens.visc, g[c]), dv.grad_integral[c]);
      }
      a += tq.w_prime[k] * at + tq.w[k] * ax;
      v += tq.w[k] * tr.epsilon * vx;
    }
    const double nn = static_cast<double>(n + 1);
    rep.member_form_mean += (a - rep.member_form_mean) / nn;
    rep.viscous_remainder += (v - rep.viscous_remainder) / nn;
    ns_mean += ((a - v) - ns_mean) / nn;
    rep.mean_epsilon += (tr.epsilon - rep.mean_epsilon) / nn;
  }
  rep.residual = rep.barycentric_form + rep.defect_pairing - rep.viscous_remainder;
  rep.identity_gap = rep.barycentric_form + rep.defect_pairing - ns_mean - rep.viscous_remainder;
  rep.budget = energy_budget(ens, upto);
  const double c_phi = dv.sup_gradient * std::sqrt(2.0 * std::max(ens.visc.mu, ens.visc.lambda) *
                                                   (psi.end - psi.begin) * dv.support_area);
  rep.remainder_bound = c_phi * std::sqrt(rep.budget) * std::sqrt(rep.mean_epsilon);
  return rep;
}

}  // namespace vvl
