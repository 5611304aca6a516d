#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "vvl/stats.hpp"

namespace vt {

using namespace vvl;

inline GridConfig box(int nx, int ny, double half_x = 1.0, double half_y = 1.0,
                      BoundaryKind b = BoundaryKind::kPeriodic) {
  GridConfig g;
  g.nx = nx;
  g.ny = ny;
  g.x_min = -half_x;
  g.x_max = half_x;
  g.y_min = -half_y;
  g.y_max = half_y;
  g.boundary = b;
  return g;
}

inline std::vector<double> uniform_times(int k, double t_end = 1.0) {
  std::vector<double> t;
  for (int i = 0; i < k; ++i) t.push_back(t_end * i / (k - 1));
  return t;
}

using FieldFn = std::function<void(Vec2 x, double t, double& rho, Vec2& m)>;

// A member whose fields are sampled from f at cell centers; non-fluid cells follow the grid conventions.
inline Trajectory sampled_member(const Grid& g, const FarField& far, const std::vector<double>& times, double eps,
                                 const FieldFn& f) {
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
      f(g.center(c), t, r, m);
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

inline Trajectory constant_member(const Grid& g, const FarField& far, const std::vector<double>& times, double rho,
                                  Vec2 m, double eps = 0.1) {
  return sampled_member(g, far, times, eps, [&](Vec2, double, double& r, Vec2& mm) {
    r = rho;
    mm = m;
  });
}

inline Ensemble make_ensemble(const GridConfig& gc, GasLaw law, FarField far, ViscosityPair visc = {1.0, 0.0}) {
  Ensemble e;
  e.grid = std::make_shared<const Grid>(gc);
  e.law = law;
  e.far = far;
  e.visc = visc;
  return e;
}

// Independent random fields per member and time with rho in [rho_lo, rho_lo + spread].
inline Ensemble random_ensemble(std::mt19937_64& rng, const GridConfig& gc, GasLaw law, std::size_t members,
                                int snapshots = 4, double rho_lo = 0.1, double spread = 2.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Ensemble e = make_ensemble(gc, law, {1.0, {0.1, 0.0}}, {1.0, 0.3});
  const auto times = uniform_times(snapshots);
  for (std::size_t n = 0; n < members; ++n) {
    Trajectory tr = sampled_member(*e.grid, e.far, times, 0.2 / (n + 1), [&](Vec2, double, double& r, Vec2& m) {
      r = rho_lo + spread * u(rng);
      m = {4.0 * u(rng) - 2.0, 4.0 * u(rng) - 2.0};
    });
    double d = 0.0;
    for (auto& x : tr.dissipation) x = (d += u(rng));
    e.members.push_back(std::move(tr));
  }
  return e;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("vvl_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace vt
