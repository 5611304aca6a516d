#pragma once

#include <span>
#include <vector>

#include "vvl/grid.hpp"
#include "vvl/test_function.hpp"

namespace vvl {

/// A scalar test function reduced to per-cell integrals on a grid.
///
/// `integral[c]` is the cell integral of phi, `grad_integral[c]` the exact cell
/// integral of grad phi, obtained from face values of phi (divergence theorem),
/// so that sums of grad_integral over rows and columns telescope to zero.
struct DiscreteScalarTest {
  std::vector<double> integral;
  std::vector<Vec2> grad_integral;
  std::vector<std::size_t> cells;  // fluid cells with nonzero weight
  double sup_value = 0.0;
  double sup_gradient = 0.0;
  double support_area = 0.0;
};

struct DiscreteVectorTest {
  std::vector<Vec2> integral;
  std::vector<Mat2> grad_integral;  // (i, j) = cell integral of d_j phi_i
  std::vector<std::size_t> cells;
  double sup_value = 0.0;
  double sup_gradient = 0.0;  // max Frobenius norm of the Jacobian
  double support_area = 0.0;
};

/// Throws Error(kSupport) if the support reaches a solid or ghost cell or leaves the box.
DiscreteScalarTest discretize(const ScalarTestFunction& phi, const Grid& grid);
DiscreteVectorTest discretize(const VectorTestFunction& phi, const Grid& grid);

/// Weights turning snapshot samples g_k into integrals of the piecewise-linear
/// interpolant against psi and psi': sum_k w[k] g_k = int psi g, sum_k w_prime[k] g_k = int psi' g.
/// Exact for the C2 piecewise-polynomial weights used here (Gauss-Legendre on sub-intervals).
struct TimeQuadrature {
  std::vector<double> w;
  std::vector<double> w_prime;
};

/// Requires psi to be supported inside [times.front(), times.back()] (Error kSupport).
TimeQuadrature time_quadrature(std::span<const double> times, const TimeWeight& psi);

/// Trapezoidal weights over the snapshots lying in [t0, t1]; zeros elsewhere.
/// A single snapshot in the window gets weight 0.
std::vector<double> trapezoid_weights(std::span<const double> times, double t0, double t1);

}  // namespace vvl
