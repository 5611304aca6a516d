#pragma once

#include <string>
#include <vector>

#include "vvl/stats.hpp"
#include "vvl/test_function.hpp"

namespace vvl {

struct EulerResidual {
  double continuity = 0.0;
  double momentum = 0.0;
};

/// Weak Euler forms with R = 0:
///   continuity: int psi' int rho phi + int psi int m . grad phi
///   momentum:   int psi' int m . phi_vec + int psi int (C + p I) : grad phi_vec
EulerResidual euler_residual(std::span<const MeanField> fields, const Grid& grid, const GasLaw& law,
                             const ScalarTestFunction& phi, const VectorTestFunction& phi_vec, const TimeWeight& psi);
double euler_momentum_residual(std::span<const MeanField> fields, const Grid& grid, const GasLaw& law,
                               const VectorTestFunction& phi_vec, const TimeWeight& psi);

std::vector<MeanField> as_mean_fields(const Trajectory& traj);

struct ObservableLibrary {
  std::vector<ScalarTestFunction> scalars;
  std::vector<VectorTestFunction> vectors;
  TimeWeight psi;
  std::vector<Vec2> pivots;
};

/// Obstacle center (origin without obstacle) plus the centers of the four box quadrants.
std::vector<Vec2> default_pivots(const Grid& grid);

/// Library of tensor bumps on a regular lattice of fluid positions. Bumps whose
/// support reaches a solid or ghost cell are skipped.
ObservableLibrary make_library(const Grid& grid, const TimeWeight& psi, int scalar_count, int vector_count);

enum class EquivalenceClass { kDensity, kMomentum, kKinetic, kInternal, kAngular };
const char* class_name(EquivalenceClass c);

struct EquivalenceRow {
  EquivalenceClass cls = EquivalenceClass::kDensity;
  int observable = 0;
  int pivot = -1;  // -1 when not applicable
  double value_a = 0.0;
  double value_b = 0.0;
  double signed_diff = 0.0;  // value_a - value_b
  double abs_diff = 0.0;
  double rel_diff = 0.0;     // abs_diff / max(|a|, |b|), 0 when both vanish
};

/// Expectations are sums of member values in sorted order divided by N, so they
/// do not depend on member ordering.
std::vector<EquivalenceRow> statistical_equivalence_report(const Ensemble& a, const Ensemble& b,
                                                           const ObservableLibrary& lib);
void write_equivalence_csv(const std::string& path, const std::vector<EquivalenceRow>& rows);

/// |m . y|^2 - (|y|^2 |m|^2 - (J_{x0}(x) m) . m) with y = x - x0.
double angular_identity_violation(Vec2 m, Vec2 x, Vec2 x0);

struct AngularIdentityReport {
  double max_violation = 0.0;
  double max_scaled_violation = 0.0;  // violation / (1 + |y|^2 |m|^2)
  std::size_t samples = 0;
};

/// Checks the identity on every member, snapshot and cell where phi is nonzero.
AngularIdentityReport kinetic_angular_identity_check(const Ensemble& ens, Vec2 x0, const ScalarTestFunction& phi);

/// Max error of central differences at step h against the analytic derivatives.
struct FdError {
  double gradient = 0.0;
  double hessian = 0.0;
};
FdError finite_difference_error(const ScalarTestFunction& phi, Vec2 x, double h);
FdError finite_difference_error(const VectorTestFunction& phi, Vec2 x, double h);

}  // namespace vvl
