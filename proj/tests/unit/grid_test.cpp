#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "vvl/error.hpp"
#include "vvl/grid.hpp"

using namespace vvl;

namespace {

GridConfig with_disc(int n, double half, double r) {
  GridConfig g = vt::box(n, n, half, half, BoundaryKind::kFarField);
  g.obstacle.shape = Disc{{0.0, 0.0}, r};
  return g;
}

ErrorCode code_of(const GridConfig& g) {
  try {
    Grid grid(g);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("disc mask selects exactly the cells whose centers lie in the disc") {
    const Grid g(with_disc(16, 1.0, 0.25));
    std::size_t solid = 0;
    for (int j = 1; j < 15; ++j)
      for (int i = 1; i < 15; ++i) {
        const bool inside = std::hypot(g.xc(i), g.yc(j)) <= 0.25;
        CHECK((g.kind(i, j) == CellKind::kSolid) == inside);
        solid += inside;
      }
    CHECK(g.count(CellKind::kSolid) == solid);
    CHECK(solid > 0);
  }

  TEST_CASE("no obstacle means no solid cells") {
    const Grid g(vt::box(16, 12, 1.0, 1.0, BoundaryKind::kFarField));
    CHECK(g.count(CellKind::kSolid) == 0);
    CHECK(g.count(CellKind::kGhost) == 2 * 16 + 2 * 10);
  }

  TEST_CASE("solid count on a 64x64 grid matches the disc area") {
    const Grid g(with_disc(64, 2.0, 0.5));
    std::size_t enumerated = 0;
    for (int j = 0; j < 64; ++j)
      for (int i = 0; i < 64; ++i) enumerated += std::hypot(g.xc(i), g.yc(j)) <= 0.5;
    CHECK(g.count(CellKind::kSolid) == enumerated);
    const double expected = std::round(M_PI * 0.25 / g.cell_area());
    CHECK(std::abs(static_cast<double>(g.count(CellKind::kSolid)) - expected) <= 8.0);
  }

  TEST_CASE("cell centers and mask partition") {
    GridConfig c = with_disc(20, 1.0, 0.3);
    c.x_min = -1.5;
    const Grid g(c);
    CHECK(g.dx() == doctest::Approx(2.5 / 20).epsilon(1e-15));
    for (int i = 0; i < 20; ++i) CHECK(g.xc(i) == doctest::Approx(-1.5 + (i + 0.5) * g.dx()).epsilon(1e-15));
    CHECK(g.count(CellKind::kFluid) + g.count(CellKind::kSolid) + g.count(CellKind::kGhost) == 400u);
    CHECK(g.fluid_cells().size() == g.count(CellKind::kFluid));
  }

  TEST_CASE("periodic grids have no ghost ring") {
    const Grid g(vt::box(8, 8));
    CHECK(g.count(CellKind::kGhost) == 0);
    CHECK(g.fluid_cells().size() == 64u);
  }

  TEST_CASE("configuration errors") {
    CHECK(code_of(with_disc(16, 1.0, 0.9)) == ErrorCode::kGeometry);  // obstacle reaches the edge
    CHECK(code_of(vt::box(4, 16, 1.0, 1.0, BoundaryKind::kFarField)) == ErrorCode::kGeometry);
    CHECK(code_of(vt::box(3, 16)) == ErrorCode::kGeometry);
    CHECK_NOTHROW(Grid(vt::box(4, 4)));
    GridConfig flat = vt::box(16, 16);
    flat.x_max = flat.x_min;
    CHECK(code_of(flat) == ErrorCode::kGeometry);
    GridConfig clockwise = vt::box(16, 16, 1.0, 1.0, BoundaryKind::kFarField);
    clockwise.obstacle.shape = ConvexPolygon{{{0.2, 0.2}, {0.2, -0.2}, {-0.2, -0.2}, {-0.2, 0.2}}};
    CHECK(code_of(clockwise) == ErrorCode::kGeometry);
  }

  TEST_CASE("convexity check: perturbed regular polygons pass, a reflex vertex fails") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 3 + trial % 8;
      ConvexPolygon poly;
      for (int k = 0; k < n; ++k) {
        const double th = 2.0 * M_PI * (k + 0.1 * u(rng)) / n;
        const double r = 1.0 + 0.02 * u(rng);
        poly.vertices.push_back({r * std::cos(th), r * std::sin(th)});
      }
      CHECK_NOTHROW(check_convex_polygon(poly));
      if (n == 3) continue;
      ConvexPolygon reflex = poly;
      const int k = trial % n;
      const Vec2 a = poly.vertices[(k + n - 1) % n], b = poly.vertices[(k + 1) % n];
      // Reflect vertex k through the chord midpoint: strictly on the inner side.
      reflex.vertices[k] = a + b - poly.vertices[k];
      CHECK_THROWS_AS(check_convex_polygon(reflex), Error);
    }
  }

  TEST_CASE("polygon obstacle mask") {
    GridConfig c = vt::box(32, 32, 1.0, 1.0, BoundaryKind::kFarField);
    c.obstacle.shape = ConvexPolygon{{{-0.3, -0.2}, {0.3, -0.2}, {0.0, 0.35}}};
    const Grid g(c);
    for (std::size_t k = 0; k < g.size(); ++k)
      if (g.kind(k) == CellKind::kSolid) CHECK(c.obstacle.contains(g.center(k)));
    CHECK(g.count(CellKind::kSolid) > 10);
  }

  TEST_CASE("annulus beyond the box diagonal is empty") {
    const Grid g(vt::box(16, 16, 1.0, 1.0, BoundaryKind::kFarField));
    const CompactRegion r = annulus_cells(g, {0.0, 0.0}, 3.0);
    CHECK(r.cells.empty());
    CHECK(r.area == 0.0);
  }

  TEST_CASE("annulus count on a 64x64 grid matches 3 pi L^2") {
    const Grid g(vt::box(64, 64, 2.0, 2.0, BoundaryKind::kFarField));
    const CompactRegion r = annulus_cells(g, {0.0, 0.0}, 0.5);
    std::size_t enumerated = 0;
    for (int j = 0; j < 64; ++j)
      for (int i = 0; i < 64; ++i) {
        const double d = std::hypot(g.xc(i), g.yc(j));
        enumerated += d >= 0.5 && d <= 1.0;
      }
    CHECK(r.cells.size() == enumerated);
    CHECK(std::abs(static_cast<double>(r.cells.size()) - std::round(3.0 * M_PI * 0.25 / g.cell_area())) <= 16.0);
    CHECK(r.area == doctest::Approx(r.cells.size() * g.cell_area()));
  }

  TEST_CASE("annulus without obstacle keeps every cell in range") {
    const Grid g(vt::box(32, 32, 1.0, 1.0, BoundaryKind::kPeriodic));
    const CompactRegion r = annulus_cells(g, {0.0, 0.0}, 0.1);
    for (std::size_t c = 0; c < g.size(); ++c) {
      const double d = norm(g.center(c));
      const bool in = std::find(r.cells.begin(), r.cells.end(), c) != r.cells.end();
      CHECK(in == (d >= 0.1 && d <= 0.2));
    }
  }

  TEST_CASE("annuli with 2 L1 < L2 are disjoint") {
    const Grid g(vt::box(64, 64, 2.0, 2.0, BoundaryKind::kPeriodic));
    for (double L1 : {0.05, 0.1, 0.2}) {
      const auto a = annulus_cells(g, {0.1, -0.05}, L1);
      const auto b = annulus_cells(g, {0.1, -0.05}, 2.0 * L1 * 1.01);
      for (std::size_t c : a.cells) CHECK(std::find(b.cells.begin(), b.cells.end(), c) == b.cells.end());
    }
  }

  TEST_CASE("rectangle regions reject non-fluid cells") {
    const Grid g(with_disc(32, 1.0, 0.25));
    CHECK_THROWS_AS(rectangle_cells(g, -0.5, 0.5, -0.5, 0.5), Error);
    const auto r = rectangle_cells(g, 0.4, 0.8, 0.4, 0.8);
    CHECK(!r.cells.empty());
    CHECK(annulus_inside_box(g, {0.0, 0.0}, 0.5));
    CHECK(!annulus_inside_box(g, {0.0, 0.0}, 0.6));
  }
}
