#pragma once

namespace vvl {

/// Quintic smoothstep 6t^5 - 15t^4 + 10t^3 clamped to [0, 1] (C2 at both ends).
double smoothstep(double t);
double smoothstep_d1(double t);
double smoothstep_d2(double t);
double smoothstep_d3(double t);
/// Integral of smoothstep from 0 to t (t >= 0); equals 1/2 + (t - 1) beyond t = 1.
double smoothstep_integral(double t);

/// Cut-off chi with chi = 1 on [0, 1], chi = 0 on [2, inf), chi = 1 - smoothstep(Z - 1) between.
struct Cutoff {
  static double value(double z);
  static double d1(double z);
  static double d2(double z);
};

/// Smooth convex F with F = 0 on [0, R0^2], 0 < F' <= Fbar on (R0^2, R0^2 + 1)
/// and F' = Fbar beyond. Concretely F'(z) = Fbar * smoothstep(z - R0^2).
struct ConvexProfile {
  double radius = 1.0;   // R0
  double plateau = 1.0;  // Fbar

  double value(double z) const;
  double d1(double z) const;
  double d2(double z) const;
  double d3(double z) const;
};

}  // namespace vvl
