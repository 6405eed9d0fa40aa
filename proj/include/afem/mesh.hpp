#pragma once

// Conforming triangulations of polygonal domains refined by newest vertex
// bisection.
//
// Conventions:
//  * triangles are stored counterclockwise, local edge i joins v[i] and
//    v[(i + 1) % 3], and local edge 0 is the reference edge;
//  * bisecting (w0, w1, w2) at the midpoint m of its reference edge yields the
//    children (w2, w0, m) and (w1, w2, m), so each child's reference edge lies
//    opposite the newest vertex m and the child holding w0 comes first;
//  * vertex ids are stable under refinement (new vertices are appended), and an
//    edge that survives a refinement keeps its id. When an edge (a, b) is
//    bisected at m, the half that starts at the stored endpoint a inherits the id.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "afem/geometry.hpp"

namespace afem {

enum class EdgeKind : std::uint8_t { interior, dirichlet, neumann };

const char* to_string(EdgeKind k);

struct Triangle {
  std::array<int, 3> v{};
  int node = -1;  // leaf of the bisection forest
};

struct Edge {
  std::array<int, 2> v{};
  EdgeKind kind = EdgeKind::interior;
  std::array<int, 2> tri{-1, -1};
  std::array<std::int8_t, 2> local{-1, -1};

  bool is_boundary() const { return tri[1] < 0; }
};

struct BoundarySegment {
  int a = 0;
  int b = 0;
  EdgeKind kind = EdgeKind::dirichlet;
};

/// One triangle ever created from a root of the initial mesh.
struct ForestNode {
  std::array<int, 3> v{};
  std::array<EdgeKind, 3> tags{};  // classification of the local edges
  int parent = -1;
  std::array<int, 2> child{-1, -1};
  int root = 0;
  int depth = 0;

  bool is_leaf() const { return child[0] < 0; }
};

struct BisectionForest {
  std::vector<ForestNode> nodes;  // the first n_roots entries are the roots
  int n_roots = 0;
  int n_root_vertices = 0;
};

enum class ReferenceEdgeRule {
  longest,   // longest edge, ties resolved by the lowest local edge index
  as_given,  // keep (v0, v1)
};

struct RefineOptions {
  double sigma_cap = 100.0;
};

class Mesh {
 public:
  Mesh() = default;

  /// Builds an initial mesh. Clockwise triangles are reoriented by swapping
  /// v0 and v1, which keeps the reference edge. Every boundary edge must be
  /// listed in `boundary`.
  static Mesh from_triangles(std::vector<Point> vertices, const std::vector<std::array<int, 3>>& triangles,
                             const std::vector<BoundarySegment>& boundary,
                             ReferenceEdgeRule rule = ReferenceEdgeRule::longest);

  std::span<const Point> vertices() const { return vertices_; }
  std::span<const Triangle> triangles() const { return triangles_; }
  std::span<const Edge> edges() const { return edges_; }
  const BisectionForest& forest() const { return forest_; }

  std::size_t n_vertices() const { return vertices_.size(); }
  std::size_t n_triangles() const { return triangles_.size(); }
  std::size_t n_edges() const { return edges_.size(); }

  Point vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
  const Triangle& triangle(int t) const { return triangles_[static_cast<std::size_t>(t)]; }
  const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
  /// Edge ids of the local edges of triangle t (index 0 is the reference edge).
  const std::array<int, 3>& triangle_edges(int t) const { return tri_edges_[static_cast<std::size_t>(t)]; }

  int generation(int t) const;
  double area(int t) const;
  double edge_length(int e) const;
  double diameter(int t) const;
  double total_area() const;
  /// max over T of diam(T)^2 / |T|
  double sigma() const { return sigma_; }

  /// Endpoints of the bisected edge that created vertex v, if v is not a vertex of the initial mesh.
  std::optional<std::array<int, 2>> vertex_parents(int v) const;

  bool is_boundary_vertex(int v) const { return boundary_vertex_[static_cast<std::size_t>(v)] != 0; }
  bool is_dirichlet_vertex(int v) const { return dirichlet_vertex_[static_cast<std::size_t>(v)] != 0; }

  /// Edge id joining a and b, or -1.
  int find_edge(int a, int b) const;

  std::vector<int> edges_of_kind(EdgeKind k) const;

  /// Structural equality: identical vertex coordinates, triangles and edge tables.
  friend bool operator==(const Mesh& a, const Mesh& b);

 private:
  friend Mesh refine(const Mesh&, std::span<const int>, const RefineOptions&);
  friend Mesh overlay(const Mesh&, const Mesh&);

  struct EdgeSeed {
    std::uint64_t key;
    int id;
  };

  // Creates triangles, edges and derived data from the forest leaves.
  void build_from_leaves(const std::vector<int>& leaves, const std::vector<EdgeSeed>& seeds, int n_seeded);

  std::vector<Point> vertices_;
  std::vector<std::array<int, 2>> parents_;  // {-1,-1} for initial vertices
  std::vector<Triangle> triangles_;
  std::vector<std::array<int, 3>> tri_edges_;
  std::vector<Edge> edges_;
  std::vector<std::uint8_t> boundary_vertex_;
  std::vector<std::uint8_t> dirichlet_vertex_;
  BisectionForest forest_;
  double sigma_ = 0.0;
};

/// Coarsest conforming refinement in which every marked edge is bisected.
/// Marks propagate to reference edges until no triangle carries a marked edge
/// without its reference edge being marked; each triangle is then split into
/// 2, 3 or 4 children.
Mesh refine(const Mesh& mesh, std::span<const int> marked, const RefineOptions& options = {});

/// refine() with every edge marked: each triangle gets 4 children.
Mesh refine_uniform(const Mesh& mesh, const RefineOptions& options = {});

/// Coarsest common refinement of two meshes refined from the same initial mesh.
Mesh overlay(const Mesh& a, const Mesh& b);

/// Same triangles (as point sets) and the same boundary classification,
/// regardless of vertex and element numbering.
bool equivalent(const Mesh& a, const Mesh& b);

/// Every triangle has at least one vertex in the interior of the domain.
bool validate_interior_node_assumption(const Mesh& mesh);

/// Triangles, edges and nodal stars around vertices and edges.
class PatchIndex {
 public:
  explicit PatchIndex(const Mesh& mesh);

  std::span<const int> vertex_triangles(int v) const;
  std::span<const int> vertex_edges(int v) const;
  /// One triangle for boundary edges, two for interior edges.
  std::span<const int> edge_triangles(int e) const;

  double vertex_patch_area(int v) const;
  double edge_patch_area(int e) const;

 private:

  std::vector<int> vt_ptr_, vt_;
  std::vector<int> ve_ptr_, ve_;
  std::vector<int> et_ptr_, et_;
  std::vector<double> vertex_area_, edge_area_;
};

PatchIndex patches(const Mesh& mesh);

struct RefinementStep {
  std::size_t marked = 0;     // #M_j
  std::size_t mesh_size = 0;  // #T_j
};

/// (#T_l - #T_0) / sum_{j<l} #M_j for l = history.size() - 1. Empty when
/// nothing was marked.
std::optional<double> closure_ratio(std::span<const RefinementStep> history);

}  // namespace afem
