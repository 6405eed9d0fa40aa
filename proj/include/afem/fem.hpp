#pragma once

// Lowest-order conforming Galerkin discretization.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "afem/dirichlet.hpp"
#include "afem/mesh.hpp"
#include "afem/problem.hpp"
#include "afem/quadrature.hpp"
#include "afem/sparse.hpp"

namespace afem {

/// Gradients of the three barycentric hats of a triangle.
std::array<Point, 3> hat_gradients(const std::array<Point, 3>& p);

std::array<Point, 3> triangle_points(const Mesh& mesh, int t);

/// Gradient of the P1 function with nodal values u on triangle t.
Point gradient(const Mesh& mesh, std::span<const double> u, int t);

/// Element rule used for the volume load and all volume oscillations.
TriangleRule element_rule(const QuadratureOptions& quad);

/// The load f sampled once per element with one rule, so that every integral
/// mean and norm computed from it is consistent.
struct VolumeSamples {
  TriangleRule rule;
  std::vector<double> f;       // n_triangles * rule.size()
  std::vector<double> weight;  // physical weights, same layout

  std::size_t per_element() const { return rule.size(); }
  std::span<const double> values(int t) const;
  std::span<const double> weights(int t) const;
};

/// Throws DataError on non-finite samples.
VolumeSamples sample_volume(const Mesh& mesh, const ScalarField& f, const QuadratureOptions& quad = {});

struct SparseSystem {
  CsrMatrix a;                  // stiffness over all vertices
  std::vector<double> b;        // load + Neumann
  std::vector<double> neumann;  // Neumann part of b
  std::vector<int> free;        // non-Dirichlet vertices, ascending
  std::vector<int> constrained; // Dirichlet vertices, ascending
};

SparseSystem assemble(const Mesh& mesh, const ProblemSpec& prob, const VolumeSamples& load,
                      const QuadratureOptions& quad = {});
SparseSystem assemble(const Mesh& mesh, const ProblemSpec& prob, const QuadratureOptions& quad = {});

struct DiscreteSolution {
  std::vector<double> u;
  DirichletTrace trace;
  CgStats stats;
};

/// Eliminates the Dirichlet values, solves the free system by preconditioned
/// CG and re-injects the trace. `initial` is an optional full-length guess.
DiscreteSolution solve(const SparseSystem& sys, const DirichletTrace& trace, const CgOptions& cg = {},
                       std::span<const double> initial = {});

/// ||∇(u - U)||_{L2(Ω)}, absent without an exact solution. Elements with a
/// vertex at a listed singularity use a collapsed rule graded towards it.
std::optional<double> energy_error(const Mesh& mesh, const DiscreteSolution& sol, const ProblemSpec& prob,
                                   const QuadratureOptions& quad = {});

/// Nodal values on `fine` of the P1 function `u` on `coarse`, where fine was
/// obtained from coarse by refinement.
std::vector<double> prolongate(const Mesh& coarse, const Mesh& fine, std::span<const double> u);

}  // namespace afem
