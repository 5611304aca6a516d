#pragma once

#include <limits>

#include "vvl/grid.hpp"
#include "vvl/tensor.hpp"

namespace vvl {

/// Isentropic law p = a rho^gamma with a > 0, gamma > 1.
struct GasLaw {
  double a = 1.0;
  double gamma = 1.4;
};

/// Shear and bulk viscosity (mu, lambda), both >= 0.
struct ViscosityPair {
  double mu = 1.0;
  double lambda = 0.0;
};

void validate(const GasLaw& law);
void validate(const ViscosityPair& visc);
void validate(const FarField& far);

/// Energy value used for infeasible states (rho = 0 with m != 0, or rho < 0).
inline constexpr double kInfeasibleEnergy = std::numeric_limits<double>::infinity();

double pressure(const GasLaw& law, double rho);
/// P(rho) = a/(gamma-1) rho^gamma.
double pressure_potential(const GasLaw& law, double rho);
/// P'(rho) = a gamma/(gamma-1) rho^(gamma-1).
double pressure_potential_derivative(const GasLaw& law, double rho);
double sound_speed(const GasLaw& law, double rho);

/// 1/2 |m|^2/rho + P(rho); 0 at vacuum with m = 0; kInfeasibleEnergy otherwise.
double total_energy(const GasLaw& law, double rho, Vec2 m);

/// Relative energy about the far-field state, evaluated by the direct formula.
double relative_energy(const GasLaw& law, double rho, Vec2 m, const FarField& far);

/// Relative energy evaluated as a Bregman distance of total_energy:
/// E(s) - dE(s_inf).(s - s_inf) - E(s_inf).
double relative_energy_bregman(const GasLaw& law, double rho, Vec2 m, const FarField& far);

/// Newtonian stress in d = 2: mu (G + G^t - div I) + lambda div I.
Sym2 viscous_stress(const ViscosityPair& visc, const Mat2& grad_u);

/// Coercivity bound relating relative energy to distances from the far field.
///
/// The certified inequality is
///   phi_q(|m - m_inf|) + phi_gamma(|rho - rho_inf|) <= c E(rho, m | rho_inf, u_inf)
/// with q = 2 gamma/(gamma + 1) and phi_s(t) = t^2 for t <= 1, t^s for t > 1.
/// Near the base state the relative energy is quadratic, so the pure powers of
/// the total-energy form cannot hold there; phi_s switches to the quadratic branch.
struct Coercivity {
  double constant = 0.0;
  double exponent_momentum = 0.0;
  double exponent_density = 0.0;
  double sup_ratio = 0.0;   // sup of distance/E_rel over the calibration sample
  double margin = 1.05;
  int samples_per_axis = 0;
  double sample_range = 0.0;
};

/// phi_q(|m - m_inf|) + phi_gamma(|rho - rho_inf|).
double coercivity_distance(const GasLaw& law, double rho, Vec2 m, const FarField& far);

/// Brute-force sup of distance/E_rel over rho in (0, range], |m| in [0, range],
/// direction over [0, 2 pi), n samples per axis (cell-centered), times margin.
Coercivity calibrate_coercivity(const GasLaw& law, const FarField& far, int samples_per_axis = 200,
                                double sample_range = 10.0, double margin = 1.05);

/// c E_rel - distance; nonnegative when the inequality holds. +inf for infeasible states.
double coercivity_gap(const GasLaw& law, double rho, Vec2 m, const FarField& far, double constant);

}  // namespace vvl
