#include "afem/problem.hpp"

#include <cmath>
#include <numbers>

#include "afem/errors.hpp"

namespace afem {

double zshape_angle(Point p) {
  double phi = std::atan2(p.y, p.x);
  if (phi < -std::numbers::pi / 2) phi += 2 * std::numbers::pi;
  return phi;
}

double lshape_angle(Point p) {
  double phi = std::atan2(p.y, p.x);
  if (phi > std::numbers::pi / 2) phi -= 2 * std::numbers::pi;
  return phi;
}

namespace {

Mesh zshape_mesh() {
  std::vector<Point> v{{0, 0},  {0, -1}, {1, -1},   {1, 0},   {1, 1},           {0, 1},           {-1, 1},
                       {-1, 0}, {-1, -1}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}, {-2.0 / 3.0, -1.0 / 3.0}};
  std::vector<std::array<int, 3>> t{{1, 2, 9},  {2, 3, 9},  {3, 0, 9},  {0, 1, 9},   {0, 3, 10},
                                    {3, 4, 10}, {4, 5, 10}, {5, 0, 10}, {7, 0, 11},  {0, 5, 11},
                                    {5, 6, 11}, {6, 7, 11}, {0, 7, 12}, {7, 8, 12},  {8, 0, 12}};
  const auto D = EdgeKind::dirichlet;
  const auto N = EdgeKind::neumann;
  std::vector<BoundarySegment> b{{1, 2, N}, {2, 3, N}, {3, 4, N}, {4, 5, N}, {5, 6, N},
                                 {6, 7, N}, {7, 8, N}, {8, 0, D}, {0, 1, D}};
  return Mesh::from_triangles(std::move(v), t, b);
}

Mesh lshape_mesh() {
  std::vector<Point> v{{0, 0}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1},
                       {-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}};
  std::vector<std::array<int, 3>> t{{2, 3, 8}, {3, 0, 8}, {0, 1, 8}, {1, 2, 8},  {3, 4, 9},  {4, 5, 9},
                                    {5, 0, 9}, {0, 3, 9}, {0, 5, 10}, {5, 6, 10}, {6, 7, 10}, {7, 0, 10}};
  const auto D = EdgeKind::dirichlet;
  const auto N = EdgeKind::neumann;
  std::vector<BoundarySegment> b{{2, 3, N}, {3, 4, N}, {4, 5, N}, {5, 6, N},
                                 {6, 7, N}, {7, 0, D}, {0, 1, D}, {1, 2, N}};
  return Mesh::from_triangles(std::move(v), t, b);
}

Mesh unit_square_fan() {
  std::vector<Point> v{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  std::vector<std::array<int, 3>> t{{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
  const auto D = EdgeKind::dirichlet;
  const auto N = EdgeKind::neumann;
  std::vector<BoundarySegment> b{{0, 1, D}, {1, 2, N}, {2, 3, N}, {3, 0, D}};
  return Mesh::from_triangles(std::move(v), t, b);
}

void fill_zshape_data(ProblemSpec& p) {
  constexpr double alpha = 4.0 / 7.0;
  auto u = [](Point x) {
    const double r = norm(x);
    return std::pow(r, alpha) * std::cos(alpha * zshape_angle(x));
  };
  auto grad = [](Point x) -> Point {
    const double r = norm(x);
    const double phi = zshape_angle(x);
    const double s = alpha * std::pow(r, alpha - 1.0);
    return {s * std::cos((1.0 - alpha) * phi), s * std::sin((1.0 - alpha) * phi)};
  };
  p.f = [](Point) { return 0.0; };
  p.g = u;
  p.g_tangential = [grad](Point x, Point t) { return dot(grad(x), t); };
  p.phi = [grad](Point x, Point n) { return dot(grad(x), n); };
  p.exact = ExactSolution{u, grad};
  p.singularities = {RadialSingularity{{0.0, 0.0}, 7}};
  p.singular_load = false;
}

void fill_lshape_data(ProblemSpec& p) {
  constexpr double alpha = 2.0 / 3.0;
  auto g = [](Point x) {
    const double r = norm(x);
    return std::pow(r, alpha) * std::sin(alpha * lshape_angle(x));
  };
  auto grad = [](Point x) -> Point {
    const double r = norm(x);
    const double phi = lshape_angle(x);
    const double s = alpha * std::pow(r, alpha - 1.0);
    return {-s * std::sin((1.0 - alpha) * phi), s * std::cos((1.0 - alpha) * phi)};
  };
  p.f = [](Point x) { return std::pow(std::abs(1.0 - norm(x)), -0.25); };
  p.g = g;
  p.g_tangential = [grad](Point x, Point t) { return dot(grad(x), t); };
  p.phi = [](Point, Point) { return 0.0; };
  p.exact.reset();
  p.singularities = {RadialSingularity{{0.0, 0.0}, 3}};
  p.singular_load = true;
}

void fill_affine_data(ProblemSpec& p, double a, double b, double c) {
  auto u = [a, b, c](Point x) { return a + b * x.x + c * x.y; };
  const Point grad{b, c};
  p.f = [](Point) { return 0.0; };
  p.g = u;
  p.g_tangential = [grad](Point, Point t) { return dot(grad, t); };
  p.phi = [grad](Point, Point n) { return dot(grad, n); };
  p.exact = ExactSolution{u, [grad](Point) { return grad; }};
  p.singularities.clear();
  p.singular_load = false;
}

}  // namespace

ProblemSpec zshape_problem() {
  ProblemSpec p;
  p.name = "zshape";
  p.initial_mesh = zshape_mesh();
  fill_zshape_data(p);
  return p;
}

ProblemSpec lshape_problem() {
  ProblemSpec p;
  p.name = "lshape";
  p.initial_mesh = lshape_mesh();
  fill_lshape_data(p);
  return p;
}

ProblemSpec affine_problem(double a, double b, double c) {
  ProblemSpec p;
  p.name = "affine";
  p.initial_mesh = unit_square_fan();
  fill_affine_data(p, a, b, c);
  return p;
}

ProblemSpec problem_with_mesh(const std::string& data_set, Mesh mesh) {
  if (mesh.edges_of_kind(EdgeKind::dirichlet).empty()) {
    throw ConfigError("problem needs at least one Dirichlet edge");
  }
  ProblemSpec p;
  p.name = "custom:" + data_set;
  p.initial_mesh = std::move(mesh);
  if (data_set == "zshape") {
    fill_zshape_data(p);
  } else if (data_set == "lshape") {
    fill_lshape_data(p);
  } else if (data_set == "affine") {
    fill_affine_data(p, 1.0, 2.0, 3.0);
  } else if (data_set == "zero") {
    fill_affine_data(p, 0.0, 0.0, 0.0);
  } else {
    throw ConfigError("unknown data set '" + data_set + "'");
  }
  return p;
}

}  // namespace afem
