#include "vvl/profile.hpp"

#include <algorithm>

namespace vvl {

double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double smoothstep_d1(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double u = t * (1.0 - t);
  return 30.0 * u * u;
}

double smoothstep_d2(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
}

double smoothstep_d3(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 60.0 * (1.0 - 6.0 * t + 6.0 * t * t);
}

double smoothstep_integral(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 0.5 + (t - 1.0);
  const double t4 = t * t * t * t;
  return t4 * (2.5 + t * (-3.0 + t));
}

double Cutoff::value(double z) { return 1.0 - smoothstep(z - 1.0); }
double Cutoff::d1(double z) { return -smoothstep_d1(z - 1.0); }
double Cutoff::d2(double z) { return -smoothstep_d2(z - 1.0); }

double ConvexProfile::value(double z) const { return plateau * smoothstep_integral(z - radius * radius); }
double ConvexProfile::d1(double z) const { return plateau * smoothstep(z - radius * radius); }
double ConvexProfile::d2(double z) const { return plateau * smoothstep_d1(z - radius * radius); }
double ConvexProfile::d3(double z) const { return plateau * smoothstep_d2(z - radius * radius); }

}  // namespace vvl
