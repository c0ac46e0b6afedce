#pragma once

#include <vector>

#include "gaia/matrix.hpp"

namespace gaia {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Twice the signed area of triangle (o, a, b); positive when counter-clockwise.
double cross(const Point2& o, const Point2& a, const Point2& b);

/// Simple polygon, vertices counter-clockwise, at least 3 of them.
struct Polygon2D {
  std::vector<Point2> vertices;

  double area() const;  // signed; positive for CCW
  void validate() const;
};

/// Andrew's monotone chain. Collinear boundary points are dropped, so the
/// result holds only the extreme vertices. Throws on fewer than 3 points or
/// when all points are collinear.
Polygon2D convex_hull(const Matrix& points);

/// True when p lies inside or on the boundary of poly.
bool point_in_polygon(const Point2& p, const Polygon2D& poly);

}  // namespace gaia
