#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "vvl/tensor.hpp"

namespace vvl {

enum class CellKind : std::uint8_t { kFluid = 0, kSolid = 1, kGhost = 2 };

/// How the outer box edges behave. kFarField puts one ring of Dirichlet ghost
/// cells at the box edge; kPeriodic wraps (used by verification runs).
enum class BoundaryKind { kFarField, kPeriodic };

struct Disc {
  Vec2 center;
  double radius = 0.0;
};

/// Vertices counter-clockwise, strictly convex.
struct ConvexPolygon {
  std::vector<Vec2> vertices;
};

struct ObstacleSpec {
  std::variant<std::monostate, Disc, ConvexPolygon> shape;

  bool empty() const { return std::holds_alternative<std::monostate>(shape); }
  bool contains(Vec2 p) const;
  /// Axis-aligned bounding box of the obstacle as {x0, x1, y0, y1}.
  std::array<double, 4> bounds() const;
  /// Smallest radius R such that the closed ball {|x - c| <= R} contains the obstacle.
  double enclosing_radius(Vec2 c) const;
  /// A representative center: disc center or polygon vertex centroid; origin if empty.
  Vec2 center() const;
};

/// Checks counter-clockwise strict convexity; throws Error(kGeometry) otherwise.
void check_convex_polygon(const ConvexPolygon& poly);

struct GridConfig {
  int nx = 32;
  int ny = 32;
  double x_min = -1.0, x_max = 1.0;
  double y_min = -1.0, y_max = 1.0;
  ObstacleSpec obstacle;
  BoundaryKind boundary = BoundaryKind::kFarField;
};

/// Prescribed far-field state (rho_inf, u_inf). rho_inf > 0.
struct FarField {
  double rho = 1.0;
  Vec2 u;

  Vec2 momentum() const { return rho * u; }
};

/// Cartesian grid over a box with a cell-masked obstacle. Immutable.
class Grid {
 public:
  explicit Grid(const GridConfig& config);

  int nx() const { return config_.nx; }
  int ny() const { return config_.ny; }
  std::size_t size() const { return mask_.size(); }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double cell_area() const { return dx_ * dy_; }
  double x_min() const { return config_.x_min; }
  double x_max() const { return config_.x_max; }
  double y_min() const { return config_.y_min; }
  double y_max() const { return config_.y_max; }
  BoundaryKind boundary() const { return config_.boundary; }
  const ObstacleSpec& obstacle() const { return config_.obstacle; }
  const GridConfig& config() const { return config_; }

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * config_.nx + i; }
  int col(std::size_t c) const { return static_cast<int>(c % config_.nx); }
  int row(std::size_t c) const { return static_cast<int>(c / config_.nx); }

  /// x_i = x_min + (i + 1/2) dx.
  double xc(int i) const { return config_.x_min + (i + 0.5) * dx_; }
  double yc(int j) const { return config_.y_min + (j + 0.5) * dy_; }
  /// Face coordinate x_min + i dx (left face of column i).
  double xf(int i) const { return config_.x_min + i * dx_; }
  double yf(int j) const { return config_.y_min + j * dy_; }
  Vec2 center(std::size_t c) const { return {xc(col(c)), yc(row(c))}; }

  CellKind kind(std::size_t c) const { return mask_[c]; }
  CellKind kind(int i, int j) const { return mask_[index(i, j)]; }
  bool is_fluid(std::size_t c) const { return mask_[c] == CellKind::kFluid; }
  const std::vector<CellKind>& mask() const { return mask_; }
  /// Indices of fluid cells in row-major order.
  const std::vector<std::size_t>& fluid_cells() const { return fluid_; }

  std::size_t count(CellKind k) const;

 private:
  GridConfig config_;
  double dx_ = 0.0;
  double dy_ = 0.0;
  std::vector<CellKind> mask_;
  std::vector<std::size_t> fluid_;
};

/// Validates the configuration and builds the grid. Same as constructing Grid.
Grid build_grid(const GridConfig& config);

/// A set of fluid cells with its measure (cell count times dx*dy).
struct CompactRegion {
  std::vector<std::size_t> cells;
  double area = 0.0;
};

/// Fluid cells whose centers satisfy L <= |center - x0| <= 2L.
CompactRegion annulus_cells(const Grid& grid, Vec2 x0, double L);

/// Rectangle [x0,x1]x[y0,y1] selecting cells by center. Throws Error(kSupport)
/// if any selected cell is not fluid.
CompactRegion rectangle_cells(const Grid& grid, double x0, double x1, double y0, double y1);

/// True if the closed disc of radius 2L about x0 lies inside the box.
bool annulus_inside_box(const Grid& grid, Vec2 x0, double L);

}  // namespace vvl
