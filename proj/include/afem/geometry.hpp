#pragma once

#include <cmath>

namespace afem {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(b - a); }

/// Exact arithmetic mean of the endpoints. Every midpoint in the library is
/// produced by this function so that vertices created along different
/// refinement paths compare bitwise equal.
inline Point midpoint(Point a, Point b) { return {(a.x + b.x) * 0.5, (a.y + b.y) * 0.5}; }

/// Positive for counterclockwise orientation.
inline double signed_area(Point a, Point b, Point c) { return 0.5 * cross(b - a, c - a); }

/// Outward unit normal of the edge a->b of a counterclockwise triangle.
inline Point outward_normal(Point a, Point b) {
  const Point t = b - a;
  const double len = norm(t);
  return {t.y / len, -t.x / len};
}

}  // namespace afem
