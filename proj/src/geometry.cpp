#include "gaia/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "gaia/errors.hpp"

namespace gaia {

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double Polygon2D::area() const {
  double s = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const auto& a = vertices[i];
    const auto& b = vertices[(i + 1) % vertices.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

void Polygon2D::validate() const {
  if (vertices.size() < 3) throw Error("polygon needs at least 3 vertices");
  if (!(area() > 0.0)) throw Error("polygon must be counter-clockwise with nonzero area");
}

Polygon2D convex_hull(const Matrix& points) {
  if (points.cols() != 2) throw DimensionError("convex_hull: points must be n x 2");
  if (points.rows() < 3) throw Error("convex_hull: need at least 3 points");
  require_finite(points, "convex_hull");
  std::vector<Point2> pts(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) pts[i] = {points(i, 0), points(i, 1)};
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) throw Error("convex_hull: fewer than 3 distinct points");

  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) throw Error("convex_hull: points are collinear");
  return Polygon2D{std::move(hull)};
}

namespace {

bool on_segment(const Point2& p, const Point2& a, const Point2& b) {
  if (cross(a, b, p) != 0.0) return false;
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

}  // namespace

bool point_in_polygon(const Point2& p, const Polygon2D& poly) {
  const auto& v = poly.vertices;
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if (on_segment(p, v[j], v[i])) return true;
    // Half-open rule on y so a vertex shared by two edges is counted once.
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      const double x_cross = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

}  // namespace gaia
