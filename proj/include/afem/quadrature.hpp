#pragma once

#include <array>
#include <span>
#include <vector>

#include "afem/geometry.hpp"

namespace afem {

/// Rule on a triangle in barycentric coordinates; weights sum to 1, so a
/// physical weight is weight * |T|.
struct TriangleRule {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Rule on [0, 1]; weights sum to 1.
struct SegmentRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Quadrature orders shared by assembly, trace discretization and estimators.
struct QuadratureOptions {
  int triangle_degree = 5;
  /// Uniform subdivision levels of the element rule (4^levels sub-triangles).
  int subdivision_levels = 0;
  int segment_points = 4;
  int energy_degree = 10;
  /// Points per direction of the collapsed rule on elements at a singularity.
  int singular_points = 16;
};

/// Exact for polynomials of the given degree. Degrees 1, 2 and 5 use the
/// 1-, 3- and 7-point symmetric rules; higher degrees use a collapsed
/// Gauss-Legendre product rule.
TriangleRule triangle_rule(int degree);

/// Applies `base` on each of the 4^levels triangles of a uniform red
/// subdivision.
TriangleRule subdivided(const TriangleRule& base, int levels);

SegmentRule gauss_legendre(int points);

/// Point singularity of the data of the form r^(k/p) along rays through `at`.
/// Quadrature on segments collinear with `at` substitutes r = s^p, which makes
/// integrands of that form polynomial in s.
struct RadialSingularity {
  Point at;
  int radial_power = 1;
};

struct SegmentPoint {
  Point x;
  double t = 0.0;  // position along the segment, 0 at a and 1 at b
  double w = 0.0;  // physical weight (sums to |b - a|)
};

/// Quadrature points on the segment a-b. If the segment lies on a ray through a
/// listed singularity, the rule is applied in the substituted radial variable.
std::vector<SegmentPoint> segment_points(Point a, Point b, const SegmentRule& rule,
                                         std::span<const RadialSingularity> singularities = {});

struct TrianglePoint {
  Point x;
  std::array<double, 3> bary;
  double w = 0.0;  // physical weight
};

/// Collapsed product rule for a triangle with a vertex at a radial
/// singularity: Duffy map from that vertex combined with r = s^p.
std::vector<TrianglePoint> singular_triangle_points(const std::array<Point, 3>& p, int singular_vertex,
                                                    int radial_power, int points_per_direction);

}  // namespace afem
