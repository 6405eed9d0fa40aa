#include "afem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "afem/errors.hpp"

namespace afem {

SegmentRule gauss_legendre(int n) {
  if (n < 1) throw ConfigError("Gauss-Legendre rule needs at least one point");
  SegmentRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  // Newton iteration on P_n starting from the Chebyshev-like guesses.
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pm = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double pn = n == 1 ? x : p1;
    const double pm = n == 1 ? 1.0 : p0;
    dp = n * (x * pn - pm) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (x + 1.0);
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = 0.5 * w;
  }
  return rule;
}

TriangleRule triangle_rule(int degree) {
  TriangleRule r;
  if (degree < 1) throw ConfigError("triangle quadrature degree must be positive");
  if (degree == 1) {
    r.bary = {{1.0 / 3, 1.0 / 3, 1.0 / 3}};
    r.weights = {1.0};
    r.degree = 1;
    return r;
  }
  if (degree == 2) {
    r.bary = {{2.0 / 3, 1.0 / 6, 1.0 / 6}, {1.0 / 6, 2.0 / 3, 1.0 / 6}, {1.0 / 6, 1.0 / 6, 2.0 / 3}};
    r.weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    r.degree = 2;
    return r;
  }
  if (degree <= 5) {
    const double s15 = std::sqrt(15.0);
    const double a1 = (6.0 - s15) / 21.0;
    const double a2 = (6.0 + s15) / 21.0;
    const double w1 = (155.0 - s15) / 1200.0;
    const double w2 = (155.0 + s15) / 1200.0;
    r.bary = {{1.0 / 3, 1.0 / 3, 1.0 / 3},
              {1 - 2 * a1, a1, a1}, {a1, 1 - 2 * a1, a1}, {a1, a1, 1 - 2 * a1},
              {1 - 2 * a2, a2, a2}, {a2, 1 - 2 * a2, a2}, {a2, a2, 1 - 2 * a2}};
    r.weights = {9.0 / 40, w1, w1, w1, w2, w2, w2};
    r.degree = 5;
    return r;
  }
  // Collapsed product rule: lambda = (1-u, u(1-v), uv), Jacobian 2u on the unit-area-normalized triangle.
  const int n = (degree + 3) / 2;
  const SegmentRule g = gauss_legendre(n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double u = g.nodes[i];
      const double v = g.nodes[j];
      r.bary.push_back({1.0 - u, u * (1.0 - v), u * v});
      r.weights.push_back(2.0 * u * g.weights[i] * g.weights[j]);
    }
  }
  r.degree = 2 * n - 2;
  return r;
}

TriangleRule subdivided(const TriangleRule& base, int levels) {
  if (levels < 0) throw ConfigError("subdivision levels must be non-negative");
  // Sub-triangles in barycentric coordinates of the parent.
  using Tri = std::array<std::array<double, 3>, 3>;
  std::vector<Tri> tris{{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}};
  for (int l = 0; l < levels; ++l) {
    std::vector<Tri> next;
    next.reserve(tris.size() * 4);
    for (const Tri& t : tris) {
      auto mid = [](const std::array<double, 3>& p, const std::array<double, 3>& q) {
        return std::array<double, 3>{0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]), 0.5 * (p[2] + q[2])};
      };
      const auto m01 = mid(t[0], t[1]);
      const auto m12 = mid(t[1], t[2]);
      const auto m20 = mid(t[2], t[0]);
      next.push_back({t[0], m01, m20});
      next.push_back({m01, t[1], m12});
      next.push_back({m20, m12, t[2]});
      next.push_back({m12, m20, m01});
    }
    tris = std::move(next);
  }
  TriangleRule r;
  r.degree = base.degree;
  const double scale = 1.0 / static_cast<double>(tris.size());
  for (const Tri& t : tris) {
    for (std::size_t q = 0; q < base.size(); ++q) {
      std::array<double, 3> b{0, 0, 0};
      for (int k = 0; k < 3; ++k) {
        for (int c = 0; c < 3; ++c) b[static_cast<std::size_t>(c)] += base.bary[q][static_cast<std::size_t>(k)] * t[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)];
      }
      r.bary.push_back(b);
      r.weights.push_back(base.weights[q] * scale);
    }
  }
  return r;
}

std::vector<SegmentPoint> segment_points(Point a, Point b, const SegmentRule& rule,
                                         std::span<const RadialSingularity> singularities) {
  const Point d = b - a;
  const double len = norm(d);
  std::vector<SegmentPoint> out;
  out.reserve(rule.size());
  for (const auto& s : singularities) {
    if (s.radial_power <= 1) continue;
    const Point ra = a - s.at;
    const Point rb = b - s.at;
    const double da = norm(ra);
    const double db = norm(rb);
    // collinear with the singular point and not straddling it
    if (std::abs(cross(ra, rb)) > 1e-14 * std::max(1.0, da * db)) continue;
    if (dot(ra, rb) < 0.0) continue;
    const bool forward = da <= db;  // parametrize from the endpoint closer to the singularity
    const double r0 = forward ? da : db;
    const double r1 = forward ? db : da;
    const double p = s.radial_power;
    const double s0 = std::pow(r0, 1.0 / p);
    const double s1 = std::pow(r1, 1.0 / p);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double sq = s0 + (s1 - s0) * rule.nodes[q];
      const double r = std::pow(sq, p);
      const double jac = p * std::pow(sq, p - 1.0) * (s1 - s0);
      const double from_near = (r - r0) / len;  // fraction of the edge from the near endpoint
      const double t = forward ? from_near : 1.0 - from_near;
      out.push_back({a + t * d, t, rule.weights[q] * jac});
    }
    return out;
  }
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double t = rule.nodes[q];
    out.push_back({a + t * d, t, rule.weights[q] * len});
  }
  return out;
}

std::vector<TrianglePoint> singular_triangle_points(const std::array<Point, 3>& p, int singular_vertex,
                                                    int radial_power, int points_per_direction) {
  const int s = singular_vertex;
  const int i1 = (s + 1) % 3;
  const int i2 = (s + 2) % 3;
  const Point S = p[static_cast<std::size_t>(s)];
  const Point e1 = p[static_cast<std::size_t>(i1)] - S;
  const Point e2 = p[static_cast<std::size_t>(i2)] - S;
  const double area2 = std::abs(cross(e1, e2));
  const SegmentRule g = gauss_legendre(points_per_direction);
  const double pw = std::max(1, radial_power);
  std::vector<TrianglePoint> out;
  out.reserve(g.size() * g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double rho = g.nodes[i];
    const double u = std::pow(rho, pw);
    const double du = pw * std::pow(rho, pw - 1.0);
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double v = g.nodes[j];
      TrianglePoint tp;
      tp.x = S + u * ((1.0 - v) * e1 + v * e2);
      tp.bary[static_cast<std::size_t>(s)] = 1.0 - u;
      tp.bary[static_cast<std::size_t>(i1)] = u * (1.0 - v);
      tp.bary[static_cast<std::size_t>(i2)] = u * v;
      tp.w = g.weights[i] * g.weights[j] * area2 * u * du;
      out.push_back(tp);
    }
  }
  return out;
}

}  // namespace afem
