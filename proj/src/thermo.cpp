#include "vvl/thermo.hpp"

#include <cmath>

#include "vvl/error.hpp"

namespace vvl {

void validate(const GasLaw& law) {
  require(law.a > 0.0 && std::isfinite(law.a), ErrorCode::kConfig, "gas law: a must be > 0");
  require(law.gamma > 1.0 && std::isfinite(law.gamma), ErrorCode::kConfig, "gas law: gamma must be > 1");
}

void validate(const ViscosityPair& visc) {
  require(visc.mu >= 0.0 && visc.lambda >= 0.0, ErrorCode::kConfig, "viscosities must be >= 0");
}

void validate(const FarField& far) {
  require(far.rho > 0.0 && std::isfinite(far.rho), ErrorCode::kConfig, "far-field density must be > 0");
  require(std::isfinite(far.u.x) && std::isfinite(far.u.y), ErrorCode::kConfig, "far-field velocity not finite");
}

double pressure(const GasLaw& law, double rho) {
  require(rho >= 0.0, ErrorCode::kInvalidArgument, "negative density");
  return law.a * std::pow(rho, law.gamma);
}

double pressure_potential(const GasLaw& law, double rho) {
  require(rho >= 0.0, ErrorCode::kInvalidArgument, "negative density");
  return law.a / (law.gamma - 1.0) * std::pow(rho, law.gamma);
}

double pressure_potential_derivative(const GasLaw& law, double rho) {
  require(rho >= 0.0, ErrorCode::kInvalidArgument, "negative density");
  return law.a * law.gamma / (law.gamma - 1.0) * std::pow(rho, law.gamma - 1.0);
}

double sound_speed(const GasLaw& law, double rho) {
  return rho > 0.0 ? std::sqrt(law.a * law.gamma * std::pow(rho, law.gamma - 1.0)) : 0.0;
}

double total_energy(const GasLaw& law, double rho, Vec2 m) {
  if (rho > 0.0) return 0.5 * norm2(m) / rho + pressure_potential(law, rho);
  if (rho == 0.0 && m.x == 0.0 && m.y == 0.0) return 0.0;
  return kInfeasibleEnergy;
}

double relative_energy(const GasLaw& law, double rho, Vec2 m, const FarField& far) {
  if (rho < 0.0) return kInfeasibleEnergy;
  if (rho == 0.0 && (m.x != 0.0 || m.y != 0.0)) return kInfeasibleEnergy;
  // 1/2 |m - rho u_inf|^2 / rho vanishes exactly at the base state.
  const double kinetic = rho > 0.0 ? 0.5 * norm2(m - rho * far.u) / rho : 0.0;
  const double value = kinetic + pressure_potential(law, rho) - pressure_potential(law, far.rho) -
                       pressure_potential_derivative(law, far.rho) * (rho - far.rho);
  return std::max(value, 0.0);
}

double relative_energy_bregman(const GasLaw& law, double rho, Vec2 m, const FarField& far) {
  const double e = total_energy(law, rho, m);
  if (!std::isfinite(e)) return kInfeasibleEnergy;
  // dE at (rho_inf, m_inf): (-|u|^2/2 + P'(rho_inf), u_inf).
  const Vec2 m_inf = far.momentum();
  const double d_rho = -0.5 * norm2(far.u) + pressure_potential_derivative(law, far.rho);
  const double lin = d_rho * (rho - far.rho) + dot(far.u, m - m_inf);
  return e - lin - total_energy(law, far.rho, m_inf);
}

Sym2 viscous_stress(const ViscosityPair& visc, const Mat2& g) {
  const double div = g.trace();
  const double shear_xy = visc.mu * (g.xy + g.yx);
  return {visc.mu * (2.0 * g.xx - div) + visc.lambda * div, shear_xy, visc.mu * (2.0 * g.yy - div) + visc.lambda * div};
}

namespace {

double mixed_power(double t, double s) { return t <= 1.0 ? t * t : std::pow(t, s); }

}  // namespace

double coercivity_distance(const GasLaw& law, double rho, Vec2 m, const FarField& far) {
  const double q = 2.0 * law.gamma / (law.gamma + 1.0);
  return mixed_power(norm(m - far.momentum()), q) + mixed_power(std::abs(rho - far.rho), law.gamma);
}

Coercivity calibrate_coercivity(const GasLaw& law, const FarField& far, int n, double range, double margin) {
  validate(law);
  validate(far);
  require(n >= 2 && range > 0.0, ErrorCode::kInvalidArgument, "calibration sample too small");
  double sup = 0.0;
  const double h = range / n;
  const double dtheta = 2.0 * M_PI / n;
  for (int a = 0; a < n; ++a) {
    const double rho = (a + 0.5) * h;
    for (int b = 0; b < n; ++b) {
      const double mag = (b + 0.5) * h;
      for (int c = 0; c < n; ++c) {
        const double th = c * dtheta;
        const Vec2 m{mag * std::cos(th), mag * std::sin(th)};
        const double e = relative_energy(law, rho, m, far);
        const double dist = coercivity_distance(law, rho, m, far);
        if (e > 0.0) sup = std::max(sup, dist / e);
      }
    }
  }
  Coercivity c;
  c.sup_ratio = sup;
  c.margin = margin;
  c.constant = sup * margin;
  c.exponent_momentum = 2.0 * law.gamma / (law.gamma + 1.0);
  c.exponent_density = law.gamma;
  c.samples_per_axis = n;
  c.sample_range = range;
  return c;
}

double coercivity_gap(const GasLaw& law, double rho, Vec2 m, const FarField& far, double constant) {
  const double e = relative_energy(law, rho, m, far);
  if (!std::isfinite(e)) return kInfeasibleEnergy;
  return constant * e - coercivity_distance(law, rho, m, far);
}

}  // namespace vvl
