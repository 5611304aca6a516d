#include "vvl/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "vvl/error.hpp"

namespace vvl {

namespace {

constexpr double kGl3Node = 0.7745966692414834;  // sqrt(3/5)
constexpr double kGl3Nodes[3] = {-kGl3Node, 0.0, kGl3Node};
constexpr double kGl3Weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

constexpr double kGl4Nodes[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
constexpr double kGl4Weights[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};

Box cell_box(const Grid& g, std::size_t c) {
  const int i = g.col(c), j = g.row(c);
  return {g.xf(i), g.xf(i + 1), g.yf(j), g.yf(j + 1)};
}

template <class Phi>
void check_support(const Phi& phi, const Grid& grid) {
  const Box s = phi.support();
  const bool inside = s[0] >= grid.x_min() && s[1] <= grid.x_max() && s[2] >= grid.y_min() && s[3] <= grid.y_max();
  if (!inside) {
    // The function may still vanish near the box edge (radial kinds); check the edge cells.
    const Box outer = {grid.x_min(), grid.x_max(), grid.y_min(), grid.y_max()};
    const Box out_left = {s[0], outer[0], s[2], s[3]}, out_right = {outer[1], s[1], s[2], s[3]};
    const Box out_low = {s[0], s[1], s[2], outer[2]}, out_high = {s[0], s[1], outer[3], s[3]};
    const bool leaks = (s[0] < outer[0] && phi.may_touch(out_left)) || (s[1] > outer[1] && phi.may_touch(out_right)) ||
                       (s[2] < outer[2] && phi.may_touch(out_low)) || (s[3] > outer[3] && phi.may_touch(out_high));
    require(!leaks, ErrorCode::kSupport, "test function support leaves the box");
  }
  for (std::size_t c = 0; c < grid.size(); ++c)
    if (!grid.is_fluid(c) && phi.may_touch(cell_box(grid, c)))
      fail(ErrorCode::kSupport, "test function support intersects solid or ghost cells");
}

}  // namespace

DiscreteScalarTest discretize(const ScalarTestFunction& phi, const Grid& grid) {
  check_support(phi, grid);
  DiscreteScalarTest out;
  out.integral.assign(grid.size(), 0.0);
  out.grad_integral.assign(grid.size(), Vec2{});
  const double hx = 0.5 * grid.dx(), hy = 0.5 * grid.dy();
  for (std::size_t c : grid.fluid_cells()) {
    const Box b = cell_box(grid, c);
    if (!phi.may_touch(b)) continue;
    const double xm = 0.5 * (b[0] + b[1]), ym = 0.5 * (b[2] + b[3]);
    double val = 0.0, gx = 0.0, gy = 0.0;
    for (int q = 0; q < 3; ++q) {
      const double yq = ym + hy * kGl3Nodes[q];
      const double xq = xm + hx * kGl3Nodes[q];
      gx += kGl3Weights[q] * hy * (phi.value({b[1], yq}) - phi.value({b[0], yq}));
      gy += kGl3Weights[q] * hx * (phi.value({xq, b[3]}) - phi.value({xq, b[2]}));
      for (int p = 0; p < 3; ++p) {
        const Vec2 x{xm + hx * kGl3Nodes[p], yq};
        val += kGl3Weights[p] * kGl3Weights[q] * hx * hy * phi.value(x);
        out.sup_value = std::max(out.sup_value, std::abs(phi.value(x)));
        out.sup_gradient = std::max(out.sup_gradient, norm(phi.gradient(x)));
      }
    }
    out.integral[c] = val;
    out.grad_integral[c] = {gx, gy};
    out.cells.push_back(c);
  }
  out.support_area = static_cast<double>(out.cells.size()) * grid.cell_area();
  return out;
}

DiscreteVectorTest discretize(const VectorTestFunction& phi, const Grid& grid) {
  check_support(phi, grid);
  DiscreteVectorTest out;
  out.integral.assign(grid.size(), Vec2{});
  out.grad_integral.assign(grid.size(), Mat2{});
  const double hx = 0.5 * grid.dx(), hy = 0.5 * grid.dy();
  for (std::size_t c : grid.fluid_cells()) {
    const Box b = cell_box(grid, c);
    if (!phi.may_touch(b)) continue;
    const double xm = 0.5 * (b[0] + b[1]), ym = 0.5 * (b[2] + b[3]);
    Vec2 val;
    Vec2 dx_int, dy_int;  // integrals of d_x phi and d_y phi
    for (int q = 0; q < 3; ++q) {
      const double yq = ym + hy * kGl3Nodes[q];
      const double xq = xm + hx * kGl3Nodes[q];
      dx_int += (kGl3Weights[q] * hy) * (phi.value({b[1], yq}) - phi.value({b[0], yq}));
      dy_int += (kGl3Weights[q] * hx) * (phi.value({xq, b[3]}) - phi.value({xq, b[2]}));
      for (int p = 0; p < 3; ++p) {
        const Vec2 x{xm + hx * kGl3Nodes[p], yq};
        val += (kGl3Weights[p] * kGl3Weights[q] * hx * hy) * phi.value(x);
        out.sup_value = std::max(out.sup_value, norm(phi.value(x)));
        out.sup_gradient = std::max(out.sup_gradient, frobenius(phi.jacobian(x)));
      }
    }
    out.integral[c] = val;
    out.grad_integral[c] = {dx_int.x, dy_int.x, dx_int.y, dy_int.y};
    out.cells.push_back(c);
  }
  out.support_area = static_cast<double>(out.cells.size()) * grid.cell_area();
  return out;
}

TimeQuadrature time_quadrature(std::span<const double> times, const TimeWeight& psi) {
  require(times.size() >= 2, ErrorCode::kInvalidArgument, "time quadrature needs at least 2 snapshots");
  require(psi.end > psi.begin && psi.ramp > 0.0 && 2.0 * psi.ramp <= psi.end - psi.begin + 1e-15,
          ErrorCode::kInvalidArgument, "time weight: invalid support or ramp");
  require(psi.begin >= times.front() && psi.end <= times.back(), ErrorCode::kSupport,
          "time weight support not inside the snapshot window");
  TimeQuadrature q;
  q.w.assign(times.size(), 0.0);
  q.w_prime.assign(times.size(), 0.0);
  const auto bp = psi.breakpoints();
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double t0 = times[k], t1 = times[k + 1];
    require(t1 > t0, ErrorCode::kInvalidArgument, "snapshot times must be strictly increasing");
    if (t1 <= psi.begin || t0 >= psi.end) continue;
    std::vector<double> cuts{t0};
    for (double b : bp)
      if (b > t0 && b < t1) cuts.push_back(b);
    cuts.push_back(t1);
    const double len = t1 - t0;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      const double a = cuts[s], b = cuts[s + 1];
      const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
      for (int g = 0; g < 4; ++g) {
        const double t = mid + half * kGl4Nodes[g];
        const double wt = half * kGl4Weights[g];
        const double left = (t1 - t) / len, right = (t - t0) / len;
        const double v = psi.value(t), d = psi.derivative(t);
        q.w[k] += wt * v * left;
        q.w[k + 1] += wt * v * right;
        q.w_prime[k] += wt * d * left;
        q.w_prime[k + 1] += wt * d * right;
      }
    }
  }
  return q;
}

std::vector<double> trapezoid_weights(std::span<const double> times, double t0, double t1) {
  std::vector<double> w(times.size(), 0.0);
  std::size_t prev = times.size();
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < t0 || times[k] > t1) continue;
    if (prev != times.size()) {
      const double h = times[k] - times[prev];
      w[prev] += 0.5 * h;
      w[k] += 0.5 * h;
    }
    prev = k;
  }
  return w;
}

}  // namespace vvl
