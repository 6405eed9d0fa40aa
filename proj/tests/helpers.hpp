#pragma once

#include <algorithm>
#include <random>
#include <utility>
#include <vector>

#include "afem/mesh.hpp"

namespace testing {

// (0,0),(1,0),(1,1),(0,1) split along the diagonal 0-2, all boundary Dirichlet.
inline afem::Mesh unit_square(afem::EdgeKind kind = afem::EdgeKind::dirichlet) {
  using afem::BoundarySegment;
  return afem::Mesh::from_triangles({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}},
                                    {BoundarySegment{0, 1, kind}, BoundarySegment{1, 2, kind},
                                     BoundarySegment{2, 3, kind}, BoundarySegment{3, 0, kind}});
}

inline afem::Mesh unit_triangle(afem::EdgeKind kind = afem::EdgeKind::dirichlet) {
  using afem::BoundarySegment;
  return afem::Mesh::from_triangles({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}},
                                    {BoundarySegment{0, 1, kind}, BoundarySegment{1, 2, kind},
                                     BoundarySegment{2, 0, kind}});
}

// Marks each edge with probability p (at least one edge).
inline std::vector<int> random_marking(const afem::Mesh& m, std::mt19937& rng, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<int> marked;
  for (std::size_t e = 0; e < m.n_edges(); ++e) {
    if (coin(rng)) marked.push_back(static_cast<int>(e));
  }
  if (marked.empty()) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(m.n_edges()) - 1);
    marked.push_back(pick(rng));
  }
  return marked;
}

inline afem::Mesh random_refinement(afem::Mesh m, std::mt19937& rng, int steps, double p) {
  for (int s = 0; s < steps; ++s) m = afem::refine(m, random_marking(m, rng, p));
  return m;
}

}  // namespace testing

#include "afem/problem.hpp"

namespace testing {

// Problem with user data on a given mesh, no exact solution.
inline afem::ProblemSpec custom_problem(afem::Mesh mesh, afem::ScalarField f, afem::ScalarField g,
                                        afem::DirectedField g_tangential, afem::DirectedField phi = {}) {
  afem::ProblemSpec p;
  p.name = "custom";
  p.initial_mesh = std::move(mesh);
  p.f = std::move(f);
  p.g = std::move(g);
  p.g_tangential = std::move(g_tangential);
  p.phi = phi ? std::move(phi) : afem::DirectedField([](afem::Point, afem::Point) { return 0.0; });
  return p;
}

// Unit triangle with only the bottom edge (0,0)-(1,0) Dirichlet.
inline afem::Mesh bottom_dirichlet_triangle() {
  using afem::BoundarySegment;
  using afem::EdgeKind;
  return afem::Mesh::from_triangles({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}},
                                    {BoundarySegment{0, 1, EdgeKind::dirichlet}, BoundarySegment{1, 2, EdgeKind::neumann},
                                     BoundarySegment{2, 0, EdgeKind::neumann}});
}

}  // namespace testing
