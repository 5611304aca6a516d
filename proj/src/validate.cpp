#include "vvl/validate.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "vvl/config.hpp"
#include "vvl/defect.hpp"
#include "vvl/stats.hpp"
#include "vvl/weak_form.hpp"

namespace vvl {

namespace {

GridConfig periodic_grid() {
  GridConfig g;
  g.nx = 8;
  g.ny = 8;
  g.boundary = BoundaryKind::kPeriodic;
  return g;
}

// Random positive states on every cell, snapshot times 0, 0.25, ..., 1.
Ensemble random_ensemble(CounterRng& rng, const GasLaw& law, std::size_t members) {
  Ensemble ens;
  ens.grid = std::make_shared<const Grid>(periodic_grid());
  ens.law = law;
  ens.far = {1.0, {0.2, 0.0}};
  ens.visc = {1.0, 0.5};
  for (std::size_t n = 0; n < members; ++n) {
    Trajectory tr;
    tr.epsilon = 0.1 / static_cast<double>(n + 1);
    double diss = 0.0;
    for (int k = 0; k < 5; ++k) {
      FluidState s;
      s.time = 0.25 * k;
      for (std::size_t c = 0; c < ens.grid->size(); ++c) {
        s.rho.push_back(0.2 + 2.0 * rng.uniform());
        s.mx.push_back(2.0 * rng.uniform() - 1.0);
        s.my.push_back(2.0 * rng.uniform() - 1.0);
      }
      tr.states.push_back(std::move(s));
      diss += rng.uniform();
      tr.dissipation.push_back(diss);
    }
    ens.members.push_back(std::move(tr));
  }
  return ens;
}

ValidationCheck upper(const std::string& name, double value, double tol) {
  return {name, value, tol, std::isfinite(value) && value <= tol};
}

ValidationCheck lower(const std::string& name, double value, double tol) {
  return {name, value, tol, std::isfinite(value) && value >= tol};
}

}  // namespace

std::vector<ValidationCheck> run_validation(bool strict) {
  std::vector<ValidationCheck> out;
  CounterRng rng(strict ? 7 : 3);
  const int samples = strict ? 100000 : 10000;
  const int ensembles = strict ? 200 : 40;

  {
    double bregman = 0.0, pressure_gap = 0.0, base = 0.0;
    for (double gamma : {1.4, 2.0, 3.0}) {
      const GasLaw law{0.5 + rng.uniform(), gamma};
      const FarField far{0.5 + rng.uniform(), {rng.uniform() - 0.5, rng.uniform() - 0.5}};
      base = std::max(base, std::abs(relative_energy(law, far.rho, far.momentum(), far)));
      for (int i = 0; i < samples; ++i) {
        const double rho = 1e-3 + 5.0 * rng.uniform();
        const Vec2 m{6.0 * rng.uniform() - 3.0, 6.0 * rng.uniform() - 3.0};
        const double direct = relative_energy(law, rho, m, far);
        const double breg = relative_energy_bregman(law, rho, m, far);
        bregman = std::max(bregman, std::abs(direct - breg) / std::max(std::abs(direct), 1e-300));
        const double p = pressure(law, rho);
        pressure_gap = std::max(pressure_gap, std::abs(p - (gamma - 1.0) * pressure_potential(law, rho)) / p);
      }
    }
    out.push_back(upper("relative_energy_bregman_vs_direct", bregman, 1e-12));
    out.push_back(upper("pressure_vs_potential", pressure_gap, 1e-13));
    out.push_back(upper("relative_energy_at_far_field", base, 0.0));
  }

  {
    double min_psd = INFINITY, min_slack = INFINITY;
    for (int e = 0; e < ensembles; ++e) {
      const GasLaw law{1.0, e % 3 == 0 ? 1.4 : (e % 3 == 1 ? 2.0 : 3.0)};
      const Ensemble ens = random_ensemble(rng, law, 1 + e % 8);
      const CesaroField f = cesaro_average(ens, ens.size());
      min_psd = std::min(min_psd, psd_check(reynolds_defect(f, *ens.grid, law), *ens.grid, 1e-10).min_scaled_eigenvalue);
      min_slack = std::min(min_slack, trace_energy_sandwich(f, *ens.grid, law).min_slack);
    }
    out.push_back(lower("defect_psd_min_scaled_eigenvalue", min_psd, -1e-10));
    out.push_back(lower("trace_energy_sandwich_slack", min_slack, -1e-12));
  }

  {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
      const Vec2 m{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
      const Vec2 x{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
      const Vec2 x0{rng.uniform(), rng.uniform()};
      const double scale = 1.0 + norm2(x - x0) * norm2(m);
      worst = std::max(worst, std::abs(angular_identity_violation(m, x, x0)) / scale);
    }
    out.push_back(upper("angular_identity", worst, 1e-12));
  }

  {
    const GasLaw law{1.0, 1.4};
    const Ensemble ens = random_ensemble(rng, law, 4);
    const VectorTestFunction phi(BumpVector{{{0.1, -0.1}, {0.6, 0.6}}, {0.6, 0.8}});
    const TimeWeight psi{0.1, 0.9, 0.2};
    const DefectField defect = reynolds_defect(cesaro_average(ens, 4), *ens.grid, law);
    out.push_back(upper("defect_identity_gap", std::abs(defect_momentum_residual(ens, 4, defect, phi, psi).identity_gap),
                        1e-12));

    Ensemble perm = ens;
    std::reverse(perm.members.begin(), perm.members.end());
    const ObservableLibrary lib = make_library(*ens.grid, psi, 4, 4);
    double diff = 0.0;
    for (const auto& r : statistical_equivalence_report(ens, perm, lib)) diff = std::max(diff, r.abs_diff);
    out.push_back(upper("equivalence_permuted_ensemble", diff, 0.0));

    Ensemble dirac = ens;
    for (auto& m : dirac.members) m = ens.members[0];
    const DefectField dd = reynolds_defect(cesaro_average(dirac, 4), *ens.grid, law);
    double trace = 0.0;
    for (const auto& s : dd.snapshots)
      for (const auto& R : s.R) trace = std::max(trace, std::abs(R.trace()));
    out.push_back(upper("dirac_ensemble_defect", trace, 1e-12));
  }

  {
    GridConfig gc;
    gc.nx = 16;
    gc.ny = 16;
    gc.obstacle.shape = Disc{{0.0, 0.0}, 0.3};
    const Grid grid(gc);
    const FarField far{1.0, {0.5, 0.0}};
    const GasLaw law{1.0, 1.4};
    const ViscosityPair visc{1.0, 0.0};
    GridConfig open = gc;
    open.obstacle = {};
    const Grid free_grid(open);
    const FluidState f0 = uniform_state(free_grid, far);
    const double dt = max_stable_dt(f0, free_grid, law, visc, 0.01, 0.4, 1e-10);
    const FluidState f1 = step(f0, free_grid, law, visc, 0.01, dt);
    double drift = 0.0;
    for (std::size_t c = 0; c < f0.size(); ++c)
      drift = std::max({drift, std::abs(f1.rho[c] - f0.rho[c]), std::abs(f1.mx[c] - f0.mx[c]),
                        std::abs(f1.my[c] - f0.my[c])});
    out.push_back(upper("far_field_state_steady", drift, 0.0));
    out.push_back(lower("obstacle_grid_has_solid_cells", static_cast<double>(grid.count(CellKind::kSolid)), 1.0));
  }

  {
    ExperimentConfig a = parse_config("{}");
    ExperimentConfig b = parse_config(normalized_config(a));
    out.push_back(upper("config_hash_roundtrip", config_hash(a) == config_hash(b) ? 0.0 : 1.0, 0.0));
    b.law.gamma = 1.6;
    out.push_back(lower("config_hash_sensitive", config_hash(a) != config_hash(b) ? 1.0 : 0.0, 1.0));
  }
  return out;
}

}  // namespace vvl
