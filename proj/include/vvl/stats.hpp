#pragma once

#include <memory>
#include <span>
#include <vector>

#include "vvl/grid.hpp"
#include "vvl/quadrature.hpp"
#include "vvl/solver.hpp"
#include "vvl/thermo.hpp"

namespace vvl {

/// Members share one grid and one snapshot-time list. Members are used in index order.
struct Ensemble {
  std::shared_ptr<const Grid> grid;
  GasLaw law;
  FarField far;
  ViscosityPair visc;
  std::vector<Trajectory> members;

  std::size_t size() const { return members.size(); }
  std::vector<double> times() const;
};

/// Throws Error(kMismatch) if members disagree on grid size or snapshot times.
void validate(const Ensemble& ens);
/// Throws Error(kConfig) unless epsilons are strictly decreasing (non-increasing if allow_equal).
void check_epsilon_schedule(const Ensemble& ens, bool allow_equal);

/// 1_{rho > 0} m (x) m / rho.
Sym2 convective_tensor(double rho, Vec2 m);
/// 1_{rho > 0} |m|^2 / rho.
double kinetic_density(double rho, Vec2 m);

/// Running means over the first n members at one snapshot time. Every vector
/// covers all grid cells; solid cells stay zero.
struct CesaroSnapshot {
  double time = 0.0;
  std::vector<double> rho;
  std::vector<Vec2> m;
  std::vector<Sym2> convective;  // mean of 1_{rho>0} m (x) m / rho
  std::vector<double> pressure;  // mean of p(rho)
  std::vector<double> kinetic;   // mean of 1_{rho>0} |m|^2 / rho
  std::vector<double> potential; // mean of P(rho)
  std::vector<double> relative_energy;
};

struct CesaroField {
  std::size_t n = 0;
  std::vector<CesaroSnapshot> snapshots;
  /// Number of (member, time, fluid cell) samples with infinite relative energy.
  std::size_t infeasible_cells = 0;
};

/// Incremental Cesaro average: add() applies avg += (x - avg)/n per field.
class CesaroAccumulator {
 public:
  CesaroAccumulator(std::shared_ptr<const Grid> grid, GasLaw law, FarField far);
  void add(const Trajectory& member);
  const CesaroField& field() const { return field_; }

 private:
  std::shared_ptr<const Grid> grid_;
  GasLaw law_;
  FarField far_;
  CesaroField field_;
};

CesaroField cesaro_average(const Ensemble& ens, std::size_t upto);

/// Mean density and momentum at one time.
struct MeanField {
  double time = 0.0;
  std::vector<double> rho;
  std::vector<Vec2> m;
};

std::vector<MeanField> barycenter(const Ensemble& ens, std::size_t upto);
std::vector<MeanField> barycenter(const CesaroField& field);

/// sup_t int E_rel over fluid cells (snapshots only).
double sup_relative_energy(const Trajectory& traj, const Grid& grid, const GasLaw& law, const FarField& far);
/// sup_t int E_rel + dissipation integral.
double member_budget(const Trajectory& traj, const Grid& grid, const GasLaw& law, const FarField& far);
double energy_budget(const Ensemble& ens, std::size_t upto);

/// Compactly supported bump b(v) = height * (1 - |v - center|^2 / width^2)^3 on the ball,
/// 0 outside. width = +inf gives the constant `height`.
struct CompositeBump {
  std::vector<double> center;
  double width = 1.0;
  double height = 1.0;

  double operator()(std::span<const double> v) const;
  double bound() const;
};

/// Composite applied to the state (rho, m_x, m_y) pointwise.
double evaluate_state(const CompositeBump& b, double rho, Vec2 m);

/// Observable b(int psi int rho phi_1, ..., int psi int m . phi_1, ...).
struct FunctionalObservable {
  std::vector<ScalarTestFunction> scalars;
  std::vector<VectorTestFunction> vectors;
  TimeWeight psi;
  CompositeBump b;
};

/// The functional values fed to b for one member.
std::vector<double> observable_arguments(const Trajectory& traj, const Grid& grid, const FunctionalObservable& obs);
double expectation(const Ensemble& ens, std::size_t upto, const FunctionalObservable& obs);

struct ModulusReport {
  double lipschitz_stat = 0.0;    // mean over members of sup |int (rho2 - rho1) phi| / |t2 - t1|
  double holder_half_stat = 0.0;  // mean over members of sup |int (m2 - m1) . phi| / |t2 - t1|^(1/2)
  double lipschitz_bound = 0.0;
  double holder_half_bound = 0.0;
};

/// Bounds use the coercivity constant and each member's own budget:
///   density:  |grad phi|_inf (|m_inf||K| + |K|^(1/2) (c B)^(1/2) + |K|^(1-1/q) (c B)^(1/q))
///   momentum: |grad phi|_inf (sqrt(T) sup_t int_K (|m|^2/rho + sqrt(2) p) + sqrt(|K|) sqrt(2 eps max(mu, lambda) D))
ModulusReport modulus_of_continuity(const Ensemble& ens, std::size_t upto, const ScalarTestFunction& phi,
                                    const VectorTestFunction& phi_vec, double coercivity_constant);

/// Time window [t0, t1] and spatial region K of a space-time product set.
struct SpaceTimeSet {
  double t0 = 0.0;
  double t1 = 0.0;
  CompactRegion region;
};

/// Mean over the first n members of b(rho_n, m_n) on the region, per snapshot time:
/// table[t][cell position in region].
using CompositeTable = std::vector<std::vector<double>>;
CompositeTable composite_average(const Ensemble& ens, std::size_t upto, const CompositeBump& b,
                                 const CompactRegion& region);

/// L1((t0, t1) x K) distance of two tables (trapezoidal in time).
double table_l1_distance(const CompositeTable& a, const CompositeTable& b, std::span<const double> times,
                         const SpaceTimeSet& set, double cell_area);

struct SConvergenceRow {
  std::size_t n = 0;
  std::size_t composite = 0;
  double distance = 0.0;
};

/// One row per (composite, n) with n from the schedule.
std::vector<SConvergenceRow> s_convergence_metric(const Ensemble& ens, std::span<const std::size_t> schedule,
                                                  std::span<const CompositeBump> composites,
                                                  std::span<const CompositeTable> reference, const SpaceTimeSet& set);

/// |rho_n - rho_ref|_{L^gamma} + |m_n - m_ref|_{L^(2 gamma/(gamma+1))} over the product set.
double member_deviation(const Trajectory& traj, std::span<const MeanField> reference, const GasLaw& law,
                        const SpaceTimeSet& set, double cell_area);

struct FractionRow {
  std::size_t n = 0;
  double fraction = 0.0;
};

std::vector<FractionRow> statistical_convergence_fraction(const Ensemble& ens, std::span<const MeanField> reference,
                                                          double threshold, const SpaceTimeSet& set,
                                                          std::span<const std::size_t> schedule);

/// Whole snapshot window with the given region.
SpaceTimeSet full_window(const Ensemble& ens, CompactRegion region);

}  // namespace vvl
