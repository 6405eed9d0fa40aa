#pragma once

// Model problem  -Δu = f in Ω,  u = g on Γ_D,  ∂_n u = φ on Γ_N.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "afem/geometry.hpp"
#include "afem/mesh.hpp"
#include "afem/quadrature.hpp"

namespace afem {

using ScalarField = std::function<double(Point)>;
/// Field evaluated on a boundary edge; the second argument is the unit tangent
/// (for g') or the outward unit normal (for φ).
using DirectedField = std::function<double(Point, Point)>;
using VectorField = std::function<Point(Point)>;

struct ExactSolution {
  ScalarField u;
  VectorField grad;
};

struct ProblemSpec {
  std::string name;
  Mesh initial_mesh;
  ScalarField f;
  ScalarField g;
  DirectedField g_tangential;
  DirectedField phi;
  std::optional<ExactSolution> exact;
  std::vector<RadialSingularity> singularities;
  /// The volume load is singular inside the domain; accurate runs should use
  /// subdivided element quadrature.
  bool singular_load = false;
};

/// Ω = (-1,1)^2 \ conv{(0,0),(-1,-1),(0,-1)}, u = r^(4/7) cos(4φ/7), f = 0.
/// The polar angle is the standard one with its branch cut inside the removed
/// wedge, φ ∈ [-π/2, 5π/4]. Γ_D is the two segments meeting at the reentrant
/// corner, Γ_N the rest.
ProblemSpec zshape_problem();

/// Ω = (-1,1)^2 \ (-1,0)×(0,1), g = r^(2/3) sin(2φ/3) with φ ∈ [-π, π/2],
/// φ_N = 0, f = |1 - r|^(-1/4). No exact solution. Γ_D is the two segments
/// meeting at the reentrant corner.
ProblemSpec lshape_problem();

/// Unit square, u = a + b x + c y. Γ_D = bottom and left sides.
ProblemSpec affine_problem(double a, double b, double c);

/// Data of a built-in problem ("zshape", "lshape", "affine" = affine(1,2,3),
/// "zero") on a user supplied mesh.
ProblemSpec problem_with_mesh(const std::string& data_set, Mesh mesh);

/// Z-shape polar representation, shared with tests.
double zshape_angle(Point p);
double lshape_angle(Point p);

}  // namespace afem
