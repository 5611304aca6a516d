#include "vvl/weak_form.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "vvl/error.hpp"
#include "vvl/quadrature.hpp"
#include "vvl/snapshot_io.hpp"

namespace vvl {

namespace {

std::vector<double> field_times(std::span<const MeanField> fields) {
  std::vector<double> t;
  for (const auto& f : fields) t.push_back(f.time);
  return t;
}

double momentum_form(std::span<const MeanField> fields, const GasLaw& law, const DiscreteVectorTest& dv,
                     const TimeQuadrature& tq) {
  double r = 0.0;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (tq.w[k] == 0.0 && tq.w_prime[k] == 0.0) continue;
    double t_part = 0.0, x_part = 0.0;
    for (std::size_t c : dv.cells) {
      const double rho = fields[k].rho[c];
      const Vec2 m = fields[k].m[c];
      t_part += dot(m, dv.integral[c]);
      x_part += contract(convective_tensor(rho, m) + pressure(law, rho) * Sym2::identity(), dv.grad_integral[c]);
    }
    r += tq.w_prime[k] * t_part + tq.w[k] * x_part;
  }
  return r;
}

void check_fields(std::span<const MeanField> fields, const Grid& grid) {
  require(!fields.empty(), ErrorCode::kInvalidArgument, "no fields");
  for (const auto& f : fields)
    require(f.rho.size() == grid.size() && f.m.size() == grid.size(), ErrorCode::kMismatch,
            "fields do not match the grid");
}

bool same_grid(const Grid& a, const Grid& b) {
  return a.nx() == b.nx() && a.ny() == b.ny() && a.x_min() == b.x_min() && a.x_max() == b.x_max() &&
         a.y_min() == b.y_min() && a.y_max() == b.y_max() && a.mask() == b.mask();
}

// Order-independent mean: sort, then sum.
double sorted_mean(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

EulerResidual euler_residual(std::span<const MeanField> fields, const Grid& grid, const GasLaw& law,
                             const ScalarTestFunction& phi, const VectorTestFunction& phi_vec, const TimeWeight& psi) {
  check_fields(fields, grid);
  const auto ds = discretize(phi, grid);
  const auto dv = discretize(phi_vec, grid);
  const auto times = field_times(fields);
  const auto tq = time_quadrature(times, psi);
  EulerResidual res;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (tq.w[k] == 0.0 && tq.w_prime[k] == 0.0) continue;
    double t_part = 0.0, x_part = 0.0;
    for (std::size_t c : ds.cells) {
      t_part += fields[k].rho[c] * ds.integral[c];
      x_part += dot(fields[k].m[c], ds.grad_integral[c]);
    }
    res.continuity += tq.w_prime[k] * t_part + tq.w[k] * x_part;
  }
  res.momentum = momentum_form(fields, law, dv, tq);
  return res;
}

double euler_momentum_residual(std::span<const MeanField> fields, const Grid& grid, const GasLaw& law,
                               const VectorTestFunction& phi_vec, const TimeWeight& psi) {
  check_fields(fields, grid);
  const auto dv = discretize(phi_vec, grid);
  const auto tq = time_quadrature(field_times(fields), psi);
  return momentum_form(fields, law, dv, tq);
}

std::vector<MeanField> as_mean_fields(const Trajectory& traj) {
  std::vector<MeanField> out;
  for (const auto& s : traj.states) {
    MeanField f{s.time, s.rho, {}};
    f.m.resize(s.size());
    for (std::size_t c = 0; c < s.size(); ++c) f.m[c] = s.m(c);
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<Vec2> default_pivots(const Grid& grid) {
  const double qx = 0.25 * (grid.x_max() - grid.x_min()), qy = 0.25 * (grid.y_max() - grid.y_min());
  const double x0 = grid.x_min(), y0 = grid.y_min();
  return {grid.obstacle().center(), {x0 + qx, y0 + qy}, {x0 + 3 * qx, y0 + qy}, {x0 + qx, y0 + 3 * qy},
          {x0 + 3 * qx, y0 + 3 * qy}};
}

ObservableLibrary make_library(const Grid& grid, const TimeWeight& psi, int scalar_count, int vector_count) {
  require(scalar_count >= 0 && vector_count >= 0, ErrorCode::kConfig, "observable counts must be >= 0");
  ObservableLibrary lib;
  lib.psi = psi;
  lib.pivots = default_pivots(grid);
  // Inner box excluding the ghost ring.
  const double x0 = grid.x_min() + grid.dx(), x1 = grid.x_max() - grid.dx();
  const double y0 = grid.y_min() + grid.dy(), y1 = grid.y_max() - grid.dy();
  std::vector<TensorBump> candidates;
  const int wanted = std::max(scalar_count, vector_count);
  for (int side = 2; side <= 16 && static_cast<int>(candidates.size()) < wanted; ++side) {
    candidates.clear();
    const double sx = (x1 - x0) / side, sy = (y1 - y0) / side;
    for (int j = 0; j < side; ++j)
      for (int i = 0; i < side; ++i) {
        const TensorBump b{{x0 + (i + 0.5) * sx, y0 + (j + 0.5) * sy}, {0.75 * sx, 0.75 * sy}};
        try {
          discretize(ScalarTestFunction(b), grid);
          candidates.push_back(b);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kSupport) throw;
        }
      }
  }
  const Vec2 dirs[3] = {{1.0, 0.0}, {0.0, 1.0}, {std::sqrt(0.5), std::sqrt(0.5)}};
  for (int k = 0; k < scalar_count && k < static_cast<int>(candidates.size()); ++k)
    lib.scalars.emplace_back(candidates[k]);
  for (int k = 0; k < vector_count && k < static_cast<int>(candidates.size()); ++k)
    lib.vectors.emplace_back(BumpVector{candidates[k], dirs[k % 3]});
  return lib;
}

const char* class_name(EquivalenceClass c) {
  switch (c) {
    case EquivalenceClass::kDensity: return "SE1-density";
    case EquivalenceClass::kMomentum: return "SE1-momentum";
    case EquivalenceClass::kKinetic: return "SE2-kinetic";
    case EquivalenceClass::kInternal: return "SE2-internal";
    case EquivalenceClass::kAngular: return "SE2-angular";
  }
  return "?";
}

namespace {

struct MemberValues {
  // [observable][member]
  std::vector<std::vector<double>> density, kinetic, internal, momentum;
  std::vector<std::vector<std::vector<double>>> angular;  // [pivot][observable][member]
};

MemberValues member_values(const Ensemble& ens, const ObservableLibrary& lib,
                           const std::vector<DiscreteScalarTest>& ds, const std::vector<DiscreteVectorTest>& dv) {
  const Grid& grid = *ens.grid;
  const auto times = ens.times();
  const auto tq = time_quadrature(times, lib.psi);
  const std::size_t n = ens.size();
  MemberValues v;
  v.density.assign(ds.size(), std::vector<double>(n, 0.0));
  v.kinetic = v.internal = v.density;
  v.momentum.assign(dv.size(), std::vector<double>(n, 0.0));
  v.angular.assign(lib.pivots.size(), v.density);
  for (std::size_t mem = 0; mem < n; ++mem)
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (tq.w[k] == 0.0) continue;
      const FluidState& s = ens.members[mem].states[k];
      const double w = tq.w[k];
      for (std::size_t i = 0; i < ds.size(); ++i) {
        double d = 0.0, kin = 0.0, in = 0.0;
        std::vector<double> ang(lib.pivots.size(), 0.0);
        for (std::size_t c : ds[i].cells) {
          const double phi = ds[i].integral[c];
          const double rho = s.rho[c];
          const Vec2 m = s.m(c);
          d += rho * phi;
          kin += kinetic_density(rho, m) * phi;
          in += pressure_potential(ens.law, rho) * phi;
          if (rho > 0.0)
            for (std::size_t p = 0; p < lib.pivots.size(); ++p)
              ang[p] += dot(angular_kernel(grid.center(c), lib.pivots[p]) * m, m) / rho * phi;
        }
        v.density[i][mem] += w * d;
        v.kinetic[i][mem] += w * kin;
        v.internal[i][mem] += w * in;
        for (std::size_t p = 0; p < lib.pivots.size(); ++p) v.angular[p][i][mem] += w * ang[p];
      }
      for (std::size_t j = 0; j < dv.size(); ++j) {
        double mo = 0.0;
        for (std::size_t c : dv[j].cells) mo += dot(s.m(c), dv[j].integral[c]);
        v.momentum[j][mem] += w * mo;
      }
    }
  return v;
}

EquivalenceRow make_row(EquivalenceClass cls, int obs, int pivot, const std::vector<double>& a,
                        const std::vector<double>& b) {
  EquivalenceRow r;
  r.cls = cls;
  r.observable = obs;
  r.pivot = pivot;
  r.value_a = sorted_mean(a);
  r.value_b = sorted_mean(b);
  r.signed_diff = r.value_a - r.value_b;
  r.abs_diff = std::abs(r.signed_diff);
  const double scale = std::max(std::abs(r.value_a), std::abs(r.value_b));
  r.rel_diff = scale > 0.0 ? r.abs_diff / scale : 0.0;
  return r;
}

}  // namespace

std::vector<EquivalenceRow> statistical_equivalence_report(const Ensemble& a, const Ensemble& b,
                                                           const ObservableLibrary& lib) {
  validate(a);
  validate(b);
  require(same_grid(*a.grid, *b.grid), ErrorCode::kMismatch, "ensembles live on different grids");
  const auto ta = a.times(), tb = b.times();
  require(ta.size() == tb.size(), ErrorCode::kMismatch, "ensembles have different snapshot counts");
  for (std::size_t k = 0; k < ta.size(); ++k)
    require(std::abs(ta[k] - tb[k]) <= 1e-12 * std::max(1.0, std::abs(ta[k])), ErrorCode::kMismatch,
            "ensembles have different snapshot times");
  std::vector<DiscreteScalarTest> ds;
  std::vector<DiscreteVectorTest> dv;
  for (const auto& s : lib.scalars) ds.push_back(discretize(s, *a.grid));
  for (const auto& v : lib.vectors) dv.push_back(discretize(v, *a.grid));
  const MemberValues va = member_values(a, lib, ds, dv), vb = member_values(b, lib, ds, dv);

  std::vector<EquivalenceRow> rows;
  for (std::size_t i = 0; i < ds.size(); ++i)
    rows.push_back(make_row(EquivalenceClass::kDensity, static_cast<int>(i), -1, va.density[i], vb.density[i]));
  for (std::size_t j = 0; j < dv.size(); ++j)
    rows.push_back(make_row(EquivalenceClass::kMomentum, static_cast<int>(j), -1, va.momentum[j], vb.momentum[j]));
  for (std::size_t i = 0; i < ds.size(); ++i)
    rows.push_back(make_row(EquivalenceClass::kKinetic, static_cast<int>(i), -1, va.kinetic[i], vb.kinetic[i]));
  for (std::size_t i = 0; i < ds.size(); ++i)
    rows.push_back(make_row(EquivalenceClass::kInternal, static_cast<int>(i), -1, va.internal[i], vb.internal[i]));
  for (std::size_t p = 0; p < lib.pivots.size(); ++p)
    for (std::size_t i = 0; i < ds.size(); ++i)
      rows.push_back(make_row(EquivalenceClass::kAngular, static_cast<int>(i), static_cast<int>(p), va.angular[p][i],
                              vb.angular[p][i]));
  return rows;
}

void write_equivalence_csv(const std::string& path, const std::vector<EquivalenceRow>& rows) {
  std::ofstream os(path, std::ios::trunc);
  require(static_cast<bool>(os), ErrorCode::kIo, "cannot open for writing: " + path);
  os << "class,observable,pivot,value_A,value_B,abs_diff,rel_diff\n";
  for (const auto& r : rows) {
    os << class_name(r.cls) << ',' << r.observable << ',';
    if (r.pivot >= 0) os << r.pivot; else os << '-';
    os << ',' << format_double(r.value_a) << ',' << format_double(r.value_b) << ',' << format_double(r.abs_diff) << ','
       << format_double(r.rel_diff) << '\n';
  }
  require(static_cast<bool>(os), ErrorCode::kIo, "write failed: " + path);
}

double angular_identity_violation(Vec2 m, Vec2 x, Vec2 x0) {
  const Vec2 y = x - x0;
  const double lhs = dot(m, y) * dot(m, y);
  const double rhs = norm2(y) * norm2(m) - dot(angular_kernel(x, x0) * m, m);
  return lhs - rhs;
}

AngularIdentityReport kinetic_angular_identity_check(const Ensemble& ens, Vec2 x0, const ScalarTestFunction& phi) {
  validate(ens);
  const Grid& grid = *ens.grid;
  AngularIdentityReport rep;
  for (const auto& tr : ens.members)
    for (const auto& s : tr.states)
      for (std::size_t c : grid.fluid_cells()) {
        const Vec2 x = grid.center(c);
        if (phi.value(x) == 0.0) continue;
        const double v = std::abs(angular_identity_violation(s.m(c), x, x0));
        rep.max_violation = std::max(rep.max_violation, v);
        rep.max_scaled_violation = std::max(rep.max_scaled_violation, v / (1.0 + norm2(x - x0) * norm2(s.m(c))));
        ++rep.samples;
      }
  return rep;
}

FdError finite_difference_error(const ScalarTestFunction& phi, Vec2 x, double h) {
  const Vec2 ex{h, 0.0}, ey{0.0, h};
  const Vec2 g{(phi.value(x + ex) - phi.value(x - ex)) / (2 * h), (phi.value(x + ey) - phi.value(x - ey)) / (2 * h)};
  const Vec2 gx = (1.0 / (2 * h)) * (phi.gradient(x + ex) - phi.gradient(x - ex));
  const Vec2 gy = (1.0 / (2 * h)) * (phi.gradient(x + ey) - phi.gradient(x - ey));
  const Sym2 H = phi.hessian(x);
  FdError e;
  e.gradient = norm(g - phi.gradient(x));
  e.hessian = std::max({std::abs(gx.x - H.xx), std::abs(gx.y - H.xy), std::abs(gy.x - H.xy), std::abs(gy.y - H.yy)});
  return e;
}

FdError finite_difference_error(const VectorTestFunction& phi, Vec2 x, double h) {
  const Vec2 ex{h, 0.0}, ey{0.0, h};
  const Vec2 dxv = (1.0 / (2 * h)) * (phi.value(x + ex) - phi.value(x - ex));
  const Vec2 dyv = (1.0 / (2 * h)) * (phi.value(x + ey) - phi.value(x - ey));
  const Mat2 J = phi.jacobian(x);
  const Mat2 Jfd{dxv.x, dyv.x, dxv.y, dyv.y};
  const Mat2 Jx = (1.0 / (2 * h)) * (phi.jacobian(x + ex) - phi.jacobian(x - ex));
  const Mat2 Jy = (1.0 / (2 * h)) * (phi.jacobian(x + ey) - phi.jacobian(x - ey));
  const VectorHessian H = phi.hessian(x);
  FdError e;
  e.gradient = frobenius(Jfd - J);
  // Jx(i, j) = d_x d_j phi_i, compare with H[i](j, x).
  const double errs[] = {
      std::abs(Jx.xx - H[0].xx), std::abs(Jx.xy - H[0].xy), std::abs(Jx.yx - H[1].xx), std::abs(Jx.yy - H[1].xy),
      std::abs(Jy.xx - H[0].xy), std::abs(Jy.xy - H[0].yy), std::abs(Jy.yx - H[1].xy), std::abs(Jy.yy - H[1].yy)};
  e.hessian = *std::max_element(std::begin(errs), std::end(errs));
  return e;
}

}  // namespace vvl
