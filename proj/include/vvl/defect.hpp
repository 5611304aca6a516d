#pragma once

#include <string>
#include <vector>

#include "vvl/stats.hpp"
#include "vvl/test_function.hpp"

namespace vvl {

struct DefectSnapshot {
  double time = 0.0;
  std::vector<Sym2> R;  // all grid cells; zero off the fluid region
};

/// R = mean(C + p I) - (C(mean rho, mean m) + p(mean rho) I), C = 1_{rho>0} m (x) m / rho.
struct DefectField {
  std::size_t n = 0;
  std::vector<DefectSnapshot> snapshots;
};

DefectField reynolds_defect(const CesaroField& cesaro, const Grid& grid, const GasLaw& law);

/// Stores the mean fields alongside R: planes rho, m_x, m_y, R11, R12, R22.
void write_defect(const std::string& path, const DefectSnapshot& defect, const MeanField& mean, const Grid& grid,
                  double epsilon);

struct PsdReport {
  double min_eigenvalue = 0.0;
  /// min over cells of lambda_min / (1 + trace).
  double min_scaled_eigenvalue = 0.0;
  std::size_t failing_cells = 0;
  bool pass = true;
};

/// Pass iff every fluid cell has lambda_min >= -tol (1 + trace).
PsdReport psd_check(const DefectField& defect, const Grid& grid, double tol);

/// C1 = max{1/2, 1/((gamma-1) d)}, C2 = max{2, (gamma-1) d}, d = 2.
struct SandwichConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};
SandwichConstants sandwich_constants(const GasLaw& law);

struct SandwichReport {
  SandwichConstants constants;
  double min_slack = 0.0;        // min over cells of both inequalities' slack
  double min_kinetic_gap = 0.0;  // min of gap(|m|^2/rho)
  double min_potential_gap = 0.0;
  std::size_t cells = 0;
};

/// With gK = gap(|m|^2/rho) and gP = gap(P): gap(K/2 + P) = gK/2 + gP and
/// gap(K + d p) = gK + d (gamma-1) gP; checks gap(K/2+P) <= C1 gap(K+dp) and gap(K+dp) <= C2 gap(K/2+P).
SandwichReport trace_energy_sandwich(const CesaroField& cesaro, const Grid& grid, const GasLaw& law);

struct PairingReport {
  double pairing = 0.0;
  double hessian_term = 0.0;
  double cutoff_term = 0.0;
  double trace_lower_bound = 0.0;  // 2 int psi int chi F'(|x - x0|^2) trace R
  bool truncated = false;          // the annulus L <= r <= 2L leaves the box
};

/// Pairing of R with grad phi_L, phi_L = chi(|x - x0|/L) grad F(|x - x0|^2), split as
/// chi grad^2 F (Hessian term) plus (2/L) chi' F' r e (x) e (cut-off term), e = (x - x0)/r.
/// Cell-center evaluation times cell area; time weights from `psi`.
/// Throws Error(kGeometry) if the ball of radius R0 about x0 misses part of the obstacle.
PairingReport convex_pairing(const DefectField& defect, const Grid& grid, const ConvexProfile& profile, Vec2 x0,
                             double L, const TimeWeight& psi);

struct DecayRow {
  double L = 0.0;
  double value = 0.0;        // (1/L) mean_n avg_t int_annulus |m - m_inf|
  double split_inside = 0.0; // part with rho_inf/2 <= rho <= 2 rho_inf
  double split_outside = 0.0;
  double bound_inside = 0.0;  // L^((d-2)/2) mean_n avg_t (int_annulus E_rel)^(1/2)
  double bound_outside = 0.0; // L^(d(gamma-1)/(2gamma) - 1) mean_n avg_t (int_annulus E_rel)^((gamma+1)/(2gamma))
  double area = 0.0;
  bool truncated = false;
};

/// Time averages are trapezoidal over the snapshot window (a single snapshot is used as is).
std::vector<DecayRow> far_field_decay(const Ensemble& ens, std::size_t upto, Vec2 x0,
                                      const std::vector<double>& L_schedule);

struct DefectResidualReport {
  double barycentric_form = 0.0;   // B: weak Euler momentum form of the barycenter
  double defect_pairing = 0.0;     // D: int psi int R : grad phi
  double member_form_mean = 0.0;   // mean of the members' weak Euler momentum forms
  double viscous_remainder = 0.0;  // mean of eps_n int psi int S(grad u_n) : grad phi
  double residual = 0.0;           // B + D - viscous remainder
  double identity_gap = 0.0;       // B + D - mean(member NS forms) - viscous remainder
  double remainder_bound = 0.0;    // C_phi sqrt(budget) sqrt(mean eps)
  double budget = 0.0;
  double mean_epsilon = 0.0;
};

/// C_phi = |grad phi|_inf |psi|_inf sqrt(2 max(mu, lambda) |supp psi| |supp phi|).
DefectResidualReport defect_momentum_residual(const Ensemble& ens, std::size_t upto, const DefectField& defect,
                                              const VectorTestFunction& phi, const TimeWeight& psi,
                                              double density_floor_factor = 1e-10);

}  // namespace vvl
