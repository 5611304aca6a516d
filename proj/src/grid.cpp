#include "vvl/grid.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "vvl/error.hpp"

namespace vvl {

bool ObstacleSpec::contains(Vec2 p) const {
  if (const auto* d = std::get_if<Disc>(&shape)) return norm2(p - d->center) <= d->radius * d->radius;
  if (const auto* poly = std::get_if<ConvexPolygon>(&shape)) {
    const auto& v = poly->vertices;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const Vec2 a = v[k];
      const Vec2 b = v[(k + 1) % v.size()];
      if (cross(b - a, p - a) < 0.0) return false;
    }
    return true;
  }
  return false;
}

std::array<double, 4> ObstacleSpec::bounds() const {
  if (const auto* d = std::get_if<Disc>(&shape))
    return {d->center.x - d->radius, d->center.x + d->radius, d->center.y - d->radius, d->center.y + d->radius};
  if (const auto* poly = std::get_if<ConvexPolygon>(&shape)) {
    std::array<double, 4> b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                            std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (Vec2 v : poly->vertices) {
      b[0] = std::min(b[0], v.x);
      b[1] = std::max(b[1], v.x);
      b[2] = std::min(b[2], v.y);
      b[3] = std::max(b[3], v.y);
    }
    return b;
  }
  return {0.0, 0.0, 0.0, 0.0};
}

double ObstacleSpec::enclosing_radius(Vec2 c) const {
  if (const auto* d = std::get_if<Disc>(&shape)) return norm(d->center - c) + d->radius;
  if (const auto* poly = std::get_if<ConvexPolygon>(&shape)) {
    double r = 0.0;
    for (Vec2 v : poly->vertices) r = std::max(r, norm(v - c));
    return r;
  }
  return 0.0;
}

Vec2 ObstacleSpec::center() const {
  if (const auto* d = std::get_if<Disc>(&shape)) return d->center;
  if (const auto* poly = std::get_if<ConvexPolygon>(&shape)) {
    Vec2 c;
    for (Vec2 v : poly->vertices) c += v;
    return c / static_cast<double>(poly->vertices.size());
  }
  return {};
}

void check_convex_polygon(const ConvexPolygon& poly) {
  const auto& v = poly.vertices;
  require(v.size() >= 3, ErrorCode::kGeometry, "polygon needs at least 3 vertices");
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Vec2 e0 = v[(k + 1) % v.size()] - v[k];
    const Vec2 e1 = v[(k + 2) % v.size()] - v[(k + 1) % v.size()];
    if (!(cross(e0, e1) > 0.0))
      fail(ErrorCode::kGeometry, "polygon is not strictly convex and counter-clockwise at vertex " +
                                     std::to_string((k + 1) % v.size()));
  }
  // Consecutive left turns with total winding 2*pi; reject self-overlapping stars.
  double winding = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Vec2 e0 = v[(k + 1) % v.size()] - v[k];
    const Vec2 e1 = v[(k + 2) % v.size()] - v[(k + 1) % v.size()];
    winding += std::atan2(cross(e0, e1), dot(e0, e1));
  }
  require(std::abs(winding - 2.0 * M_PI) < 1e-9, ErrorCode::kGeometry, "polygon winds more than once");
}

namespace {

void validate(const GridConfig& c) {
  require(std::isfinite(c.x_min) && std::isfinite(c.x_max) && std::isfinite(c.y_min) && std::isfinite(c.y_max),
          ErrorCode::kGeometry, "degenerate bounds: non-finite");
  require(c.x_max > c.x_min && c.y_max > c.y_min, ErrorCode::kGeometry, "degenerate bounds: not ordered");
  // Small periodic boxes are allowed for synthetic checks.
  const int min_cells = c.boundary == BoundaryKind::kPeriodic && c.obstacle.empty() ? 4 : 8;
  require(c.nx >= min_cells && c.ny >= min_cells, ErrorCode::kGeometry,
          "grid needs at least " + std::to_string(min_cells) + " cells per direction");
  if (const auto* d = std::get_if<Disc>(&c.obstacle.shape))
    require(d->radius > 0.0 && std::isfinite(d->radius), ErrorCode::kGeometry, "disc radius must be positive");
  if (const auto* poly = std::get_if<ConvexPolygon>(&c.obstacle.shape)) check_convex_polygon(*poly);
  if (!c.obstacle.empty()) {
    const double dx = (c.x_max - c.x_min) / c.nx;
    const double dy = (c.y_max - c.y_min) / c.ny;
    const auto b = c.obstacle.bounds();
    const bool clear = b[0] - c.x_min >= 2.0 * dx && c.x_max - b[1] >= 2.0 * dx && b[2] - c.y_min >= 2.0 * dy &&
                       c.y_max - b[3] >= 2.0 * dy;
    require(clear, ErrorCode::kGeometry, "obstacle touches boundary: fewer than 2 cells of clearance");
  }
}

bool solid_region_connected(const Grid& g) {
  std::vector<std::size_t> solid;
  for (std::size_t c = 0; c < g.size(); ++c)
    if (g.kind(c) == CellKind::kSolid) solid.push_back(c);
  if (solid.empty()) return true;
  std::vector<char> seen(g.size(), 0);
  std::queue<std::size_t> q;
  q.push(solid.front());
  seen[solid.front()] = 1;
  std::size_t reached = 0;
  while (!q.empty()) {
    const std::size_t c = q.front();
    q.pop();
    ++reached;
    const int i = g.col(c), j = g.row(c);
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int ii = i + di[k], jj = j + dj[k];
      if (ii < 0 || jj < 0 || ii >= g.nx() || jj >= g.ny()) continue;
      const std::size_t n = g.index(ii, jj);
      if (!seen[n] && g.kind(n) == CellKind::kSolid) {
        seen[n] = 1;
        q.push(n);
      }
    }
  }
  return reached == solid.size();
}

}  // namespace

Grid::Grid(const GridConfig& config) : config_(config) {
  validate(config_);
  dx_ = (config_.x_max - config_.x_min) / config_.nx;
  dy_ = (config_.y_max - config_.y_min) / config_.ny;
  mask_.assign(static_cast<std::size_t>(config_.nx) * config_.ny, CellKind::kFluid);
  for (int j = 0; j < config_.ny; ++j) {
    for (int i = 0; i < config_.nx; ++i) {
      const std::size_t c = index(i, j);
      const bool edge = i == 0 || j == 0 || i == config_.nx - 1 || j == config_.ny - 1;
      if (config_.boundary == BoundaryKind::kFarField && edge)
        mask_[c] = CellKind::kGhost;
      else if (config_.obstacle.contains({xc(i), yc(j)}))
        mask_[c] = CellKind::kSolid;
    }
  }
  require(solid_region_connected(*this), ErrorCode::kGeometry,
          "obstacle under-resolved: solid cells are not edge-connected");
  for (std::size_t c = 0; c < mask_.size(); ++c)
    if (mask_[c] == CellKind::kFluid) fluid_.push_back(c);
}

std::size_t Grid::count(CellKind k) const {
  std::size_t n = 0;
  for (CellKind m : mask_) n += (m == k);
  return n;
}

Grid build_grid(const GridConfig& config) { return Grid(config); }

CompactRegion annulus_cells(const Grid& grid, Vec2 x0, double L) {
  require(L > 0.0, ErrorCode::kInvalidArgument, "annulus radius must be positive");
  CompactRegion region;
  const double lo2 = L * L, hi2 = 4.0 * L * L;
  for (std::size_t c : grid.fluid_cells()) {
    const double r2 = norm2(grid.center(c) - x0);
    if (r2 >= lo2 && r2 <= hi2) region.cells.push_back(c);
  }
  region.area = static_cast<double>(region.cells.size()) * grid.cell_area();
  return region;
}

CompactRegion rectangle_cells(const Grid& grid, double x0, double x1, double y0, double y1) {
  require(x1 > x0 && y1 > y0, ErrorCode::kInvalidArgument, "rectangle bounds not ordered");
  CompactRegion region;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const Vec2 p = grid.center(c);
    if (p.x < x0 || p.x > x1 || p.y < y0 || p.y > y1) continue;
    require(grid.is_fluid(c), ErrorCode::kSupport, "compact region K contains non-fluid cells");
    region.cells.push_back(c);
  }
  region.area = static_cast<double>(region.cells.size()) * grid.cell_area();
  return region;
}

bool annulus_inside_box(const Grid& grid, Vec2 x0, double L) {
  const double r = 2.0 * L;
  return x0.x - r >= grid.x_min() && x0.x + r <= grid.x_max() && x0.y - r >= grid.y_min() && x0.y + r <= grid.y_max();
}

}  // namespace vvl
