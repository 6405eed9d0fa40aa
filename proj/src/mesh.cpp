#include "afem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>
#include <unordered_map>

#include "afem/errors.hpp"

namespace afem {
namespace {

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

// Children of (w0, w1, w2) bisected at m: (w2, w0, m) and (w1, w2, m).
std::array<ForestNode, 2> bisect_node(const ForestNode& n, int m) {
  ForestNode a;
  a.v = {n.v[2], n.v[0], m};
  a.tags = {n.tags[2], n.tags[0], EdgeKind::interior};
  ForestNode b;
  b.v = {n.v[1], n.v[2], m};
  b.tags = {n.tags[1], EdgeKind::interior, n.tags[0]};
  for (auto* c : {&a, &b}) {
    c->root = n.root;
    c->depth = n.depth + 1;
  }
  return {a, b};
}

int append_children(BisectionForest& forest, int node, int m) {
  const auto kids = bisect_node(forest.nodes[static_cast<std::size_t>(node)], m);
  const int first = static_cast<int>(forest.nodes.size());
  for (int k = 0; k < 2; ++k) {
    ForestNode c = kids[static_cast<std::size_t>(k)];
    c.parent = node;
    forest.nodes.push_back(c);
  }
  forest.nodes[static_cast<std::size_t>(node)].child = {first, first + 1};
  return first;
}

}  // namespace

const char* to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::interior:
      return "I";
    case EdgeKind::dirichlet:
      return "D";
    case EdgeKind::neumann:
      return "N";
  }
  return "?";
}

Mesh Mesh::from_triangles(std::vector<Point> vertices, const std::vector<std::array<int, 3>>& triangles,
                          const std::vector<BoundarySegment>& boundary, ReferenceEdgeRule rule) {
  const int nv = static_cast<int>(vertices.size());
  if (triangles.empty()) throw MeshError("mesh has no triangles");
  for (const Point& p : vertices) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw MeshError("non-finite vertex coordinate");
  }

  std::vector<std::array<int, 3>> tris = triangles;
  for (auto& t : tris) {
    for (int v : t) {
      if (v < 0 || v >= nv) throw MeshError("triangle references vertex " + std::to_string(v) + " out of range");
    }
    const Point a = vertices[static_cast<std::size_t>(t[0])];
    const Point b = vertices[static_cast<std::size_t>(t[1])];
    const Point c = vertices[static_cast<std::size_t>(t[2])];
    const double area = signed_area(a, b, c);
    if (area == 0.0 || !std::isfinite(area)) throw MeshError("degenerate triangle");
    if (area < 0.0) std::swap(t[0], t[1]);
    if (rule == ReferenceEdgeRule::longest) {
      int best = 0;
      double best_len = -1.0;
      for (int i = 0; i < 3; ++i) {
        const double len = distance(vertices[static_cast<std::size_t>(t[static_cast<std::size_t>(i)])],
                                    vertices[static_cast<std::size_t>(t[static_cast<std::size_t>((i + 1) % 3)])]);
        if (len > best_len) {
          best_len = len;
          best = i;
        }
      }
      std::rotate(t.begin(), t.begin() + best, t.end());
    }
  }

  // Count adjacency to tell boundary from interior edges.
  std::unordered_map<std::uint64_t, int> count;
  for (const auto& t : tris) {
    for (int i = 0; i < 3; ++i) ++count[edge_key(t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>((i + 1) % 3)])];
  }
  std::unordered_map<std::uint64_t, EdgeKind> tagged;
  for (const auto& s : boundary) {
    if (s.kind == EdgeKind::interior) throw MeshError("boundary segment classified as interior");
    const auto key = edge_key(s.a, s.b);
    const auto it = count.find(key);
    if (it == count.end() || it->second != 1) {
      throw MeshError("boundary segment " + std::to_string(s.a) + "-" + std::to_string(s.b) +
                      " is not a boundary edge of the mesh");
    }
    tagged[key] = s.kind;
  }
  for (const auto& [key, c] : count) {
    if (c > 2) throw MeshError("edge shared by more than two triangles");
  }

  Mesh m;
  m.vertices_ = std::move(vertices);
  m.parents_.assign(m.vertices_.size(), {-1, -1});
  m.forest_.n_roots = static_cast<int>(tris.size());
  m.forest_.n_root_vertices = nv;
  std::vector<int> leaves;
  for (std::size_t r = 0; r < tris.size(); ++r) {
    ForestNode n;
    n.v = tris[r];
    n.root = static_cast<int>(r);
    for (int i = 0; i < 3; ++i) {
      const auto key = edge_key(n.v[static_cast<std::size_t>(i)], n.v[static_cast<std::size_t>((i + 1) % 3)]);
      if (count[key] == 1) {
        const auto it = tagged.find(key);
        if (it == tagged.end()) throw MeshError("boundary edge without Dirichlet/Neumann classification");
        n.tags[static_cast<std::size_t>(i)] = it->second;
      } else {
        n.tags[static_cast<std::size_t>(i)] = EdgeKind::interior;
      }
    }
    m.forest_.nodes.push_back(n);
    leaves.push_back(static_cast<int>(r));
  }
  m.build_from_leaves(leaves, {}, 0);
  return m;
}

void Mesh::build_from_leaves(const std::vector<int>& leaves, const std::vector<EdgeSeed>& seeds, int n_seeded) {
  triangles_.clear();
  triangles_.reserve(leaves.size());
  for (int node : leaves) {
    Triangle t;
    t.v = forest_.nodes[static_cast<std::size_t>(node)].v;
    t.node = node;
    triangles_.push_back(t);
  }

  std::unordered_map<std::uint64_t, int> ids;
  ids.reserve(seeds.size() + 2 * leaves.size());
  for (const auto& s : seeds) ids.emplace(s.key, s.id);
  int next = n_seeded;

  tri_edges_.assign(triangles_.size(), {-1, -1, -1});
  // First pass: assign ids in scan order.
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& v = triangles_[t].v;
    for (int i = 0; i < 3; ++i) {
      const auto key = edge_key(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>((i + 1) % 3)]);
      auto [it, inserted] = ids.emplace(key, next);
      if (inserted) ++next;
      tri_edges_[t][static_cast<std::size_t>(i)] = it->second;
    }
  }

  edges_.assign(static_cast<std::size_t>(next), Edge{});
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(next), 0);
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& v = triangles_[t].v;
    const auto& node = forest_.nodes[static_cast<std::size_t>(triangles_[t].node)];
    for (int i = 0; i < 3; ++i) {
      const int e = tri_edges_[t][static_cast<std::size_t>(i)];
      Edge& ed = edges_[static_cast<std::size_t>(e)];
      auto& s = seen[static_cast<std::size_t>(e)];
      if (s == 0) {
        ed.v = {v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>((i + 1) % 3)]};
        ed.tri[0] = static_cast<int>(t);
        ed.local[0] = static_cast<std::int8_t>(i);
        ed.kind = node.tags[static_cast<std::size_t>(i)];
      } else if (s == 1) {
        ed.tri[1] = static_cast<int>(t);
        ed.local[1] = static_cast<std::int8_t>(i);
      } else {
        throw MeshError("non-manifold edge");
      }
      ++s;
    }
  }
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (seen[e] == 0) throw MeshError("internal error: unused edge id " + std::to_string(e));
    const Edge& ed = edges_[e];
    const bool boundary = ed.tri[1] < 0;
    if (boundary == (ed.kind == EdgeKind::interior)) {
      throw MeshError("inconsistent edge classification (hanging node or unclassified boundary)");
    }
  }

  boundary_vertex_.assign(vertices_.size(), 0);
  dirichlet_vertex_.assign(vertices_.size(), 0);
  for (const Edge& ed : edges_) {
    if (!ed.is_boundary()) continue;
    for (int v : ed.v) {
      boundary_vertex_[static_cast<std::size_t>(v)] = 1;
      if (ed.kind == EdgeKind::dirichlet) dirichlet_vertex_[static_cast<std::size_t>(v)] = 1;
    }
  }

  sigma_ = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const double a = area(static_cast<int>(t));
    if (!(a > 0.0)) throw MeshError("triangle with non-positive area");
    const double d = diameter(static_cast<int>(t));
    sigma_ = std::max(sigma_, d * d / a);
  }
}

int Mesh::generation(int t) const { return forest_.nodes[static_cast<std::size_t>(triangle(t).node)].depth; }

double Mesh::area(int t) const {
  const auto& v = triangle(t).v;
  return signed_area(vertex(v[0]), vertex(v[1]), vertex(v[2]));
}

double Mesh::edge_length(int e) const {
  const auto& ed = edge(e);
  return distance(vertex(ed.v[0]), vertex(ed.v[1]));
}

double Mesh::diameter(int t) const {
  const auto& v = triangle(t).v;
  return std::max({distance(vertex(v[0]), vertex(v[1])), distance(vertex(v[1]), vertex(v[2])),
                   distance(vertex(v[2]), vertex(v[0]))});
}

double Mesh::total_area() const {
  double s = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) s += area(static_cast<int>(t));
  return s;
}

std::optional<std::array<int, 2>> Mesh::vertex_parents(int v) const {
  const auto& p = parents_[static_cast<std::size_t>(v)];
  if (p[0] < 0) return std::nullopt;
  return p;
}

int Mesh::find_edge(int a, int b) const {
  for (const Edge& ed : edges_) {
    if ((ed.v[0] == a && ed.v[1] == b) || (ed.v[0] == b && ed.v[1] == a)) {
      return static_cast<int>(&ed - edges_.data());
    }
  }
  return -1;
}

std::vector<int> Mesh::edges_of_kind(EdgeKind k) const {
  std::vector<int> out;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (edges_[e].kind == k) out.push_back(static_cast<int>(e));
  }
  return out;
}

bool operator==(const Mesh& a, const Mesh& b) {
  if (a.vertices_ != b.vertices_) return false;
  if (a.triangles_.size() != b.triangles_.size() || a.edges_.size() != b.edges_.size()) return false;
  for (std::size_t t = 0; t < a.triangles_.size(); ++t) {
    if (a.triangles_[t].v != b.triangles_[t].v) return false;
  }
  for (std::size_t e = 0; e < a.edges_.size(); ++e) {
    const Edge& x = a.edges_[e];
    const Edge& y = b.edges_[e];
    if (x.v != y.v || x.kind != y.kind || x.tri != y.tri) return false;
  }
  return true;
}

Mesh refine(const Mesh& mesh, std::span<const int> marked, const RefineOptions& options) {
  const std::size_t ne = mesh.n_edges();
  std::vector<std::uint8_t> mark(ne, 0);
  for (int e : marked) {
    if (e < 0 || static_cast<std::size_t>(e) >= ne) {
      throw InputError("marked edge index " + std::to_string(e) + " out of range");
    }
    mark[static_cast<std::size_t>(e)] = 1;
  }
  if (marked.empty()) return mesh;

  // Closure: a triangle with any marked edge must have its reference edge marked.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
      const auto& te = mesh.tri_edges_[t];
      if (mark[static_cast<std::size_t>(te[0])]) continue;
      if (mark[static_cast<std::size_t>(te[1])] || mark[static_cast<std::size_t>(te[2])]) {
        mark[static_cast<std::size_t>(te[0])] = 1;
        changed = true;
      }
    }
  }

  Mesh out;
  out.vertices_ = mesh.vertices_;
  out.parents_ = mesh.parents_;
  out.forest_ = mesh.forest_;

  std::vector<int> mid(ne, -1);
  std::vector<Mesh::EdgeSeed> seeds;
  seeds.reserve(ne + ne / 2);
  int next_id = static_cast<int>(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    const Edge& ed = mesh.edges_[e];
    if (!mark[e]) {
      seeds.push_back({edge_key(ed.v[0], ed.v[1]), static_cast<int>(e)});
      continue;
    }
    const int m = static_cast<int>(out.vertices_.size());
    out.vertices_.push_back(midpoint(mesh.vertex(ed.v[0]), mesh.vertex(ed.v[1])));
    out.parents_.push_back({ed.v[0], ed.v[1]});
    mid[e] = m;
    seeds.push_back({edge_key(ed.v[0], m), static_cast<int>(e)});
    seeds.push_back({edge_key(m, ed.v[1]), next_id++});
  }

  std::vector<int> leaves;
  leaves.reserve(mesh.n_triangles() * 2);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const auto& te = mesh.tri_edges_[t];
    const int node = mesh.triangles_[t].node;
    if (!mark[static_cast<std::size_t>(te[0])]) {
      leaves.push_back(node);
      continue;
    }
    const int first = append_children(out.forest_, node, mid[static_cast<std::size_t>(te[0])]);
    // Child (v2, v0, m) has reference edge (v2, v0) = local edge 2 of the parent;
    // child (v1, v2, m) has reference edge (v1, v2) = local edge 1.
    const std::array<int, 2> child_ref{te[2], te[1]};
    for (int k = 0; k < 2; ++k) {
      const int c = first + k;
      const int e = child_ref[static_cast<std::size_t>(k)];
      if (mark[static_cast<std::size_t>(e)]) {
        const int g = append_children(out.forest_, c, mid[static_cast<std::size_t>(e)]);
        leaves.push_back(g);
        leaves.push_back(g + 1);
      } else {
        leaves.push_back(c);
      }
    }
  }

  out.build_from_leaves(leaves, seeds, next_id);
  if (out.sigma_ > options.sigma_cap) {
    throw MeshQualityError("shape regularity " + std::to_string(out.sigma_) + " exceeds cap " +
                           std::to_string(options.sigma_cap));
  }
  return out;
}

Mesh refine_uniform(const Mesh& mesh, const RefineOptions& options) {
  std::vector<int> all(mesh.n_edges());
  for (std::size_t e = 0; e < all.size(); ++e) all[e] = static_cast<int>(e);
  return refine(mesh, all, options);
}

Mesh overlay(const Mesh& a, const Mesh& b) {
  const auto& fa = a.forest();
  const auto& fb = b.forest();
  const int n0 = fa.n_root_vertices;
  if (fa.n_roots != fb.n_roots || n0 != fb.n_root_vertices) {
    throw IncompatibleMeshError("meshes do not share an initial triangulation");
  }
  for (int v = 0; v < n0; ++v) {
    if (!(a.vertex(v) == b.vertex(v))) throw IncompatibleMeshError("initial vertices differ");
  }
  for (int r = 0; r < fa.n_roots; ++r) {
    const auto& x = fa.nodes[static_cast<std::size_t>(r)];
    const auto& y = fb.nodes[static_cast<std::size_t>(r)];
    if (x.v != y.v || x.tags != y.tags) throw IncompatibleMeshError("initial triangles differ");
  }

  Mesh out;
  out.vertices_.assign(a.vertices_.begin(), a.vertices_.begin() + n0);
  out.parents_.assign(static_cast<std::size_t>(n0), {-1, -1});
  out.forest_.n_roots = fa.n_roots;
  out.forest_.n_root_vertices = n0;
  out.forest_.nodes.assign(fa.nodes.begin(), fa.nodes.begin() + fa.n_roots);
  for (auto& n : out.forest_.nodes) n.child = {-1, -1};

  std::unordered_map<std::uint64_t, int> midpoints;
  auto midpoint_of = [&](int p, int q) {
    const auto key = edge_key(p, q);
    auto it = midpoints.find(key);
    if (it != midpoints.end()) return it->second;
    const int m = static_cast<int>(out.vertices_.size());
    out.vertices_.push_back(midpoint(out.vertices_[static_cast<std::size_t>(p)], out.vertices_[static_cast<std::size_t>(q)]));
    out.parents_.push_back({p, q});
    midpoints.emplace(key, m);
    return m;
  };

  std::vector<int> leaves;
  // Depth-first over the union of both trees; child k of a node means the same
  // bisection in both forests.
  struct Item {
    int na, nb, out;
  };
  for (int r = 0; r < fa.n_roots; ++r) {
    std::vector<Item> stack{{r, r, r}};
    while (!stack.empty()) {
      const Item it = stack.back();
      stack.pop_back();
      const bool split_a = it.na >= 0 && !fa.nodes[static_cast<std::size_t>(it.na)].is_leaf();
      const bool split_b = it.nb >= 0 && !fb.nodes[static_cast<std::size_t>(it.nb)].is_leaf();
      if (!split_a && !split_b) {
        leaves.push_back(it.out);
        continue;
      }
      const auto& on = out.forest_.nodes[static_cast<std::size_t>(it.out)];
      const int m = midpoint_of(on.v[0], on.v[1]);
      const int first = append_children(out.forest_, it.out, m);
      // Push in reverse so child 0 is visited first.
      for (int k = 1; k >= 0; --k) {
        const int ca = split_a ? fa.nodes[static_cast<std::size_t>(it.na)].child[static_cast<std::size_t>(k)] : -1;
        const int cb = split_b ? fb.nodes[static_cast<std::size_t>(it.nb)].child[static_cast<std::size_t>(k)] : -1;
        stack.push_back({ca, cb, first + k});
      }
    }
  }
  out.build_from_leaves(leaves, {}, 0);
  return out;
}

bool equivalent(const Mesh& a, const Mesh& b) {
  if (a.n_triangles() != b.n_triangles() || a.n_edges() != b.n_edges() || a.n_vertices() != b.n_vertices()) {
    return false;
  }
  using Key = std::array<double, 6>;
  auto tri_keys = [](const Mesh& m) {
    std::vector<Key> keys;
    for (const auto& t : m.triangles()) {
      std::array<Point, 3> p{m.vertex(t.v[0]), m.vertex(t.v[1]), m.vertex(t.v[2])};
      std::sort(p.begin(), p.end(), [](Point x, Point y) { return std::tie(x.x, x.y) < std::tie(y.x, y.y); });
      keys.push_back({p[0].x, p[0].y, p[1].x, p[1].y, p[2].x, p[2].y});
    }
    std::sort(keys.begin(), keys.end());
    return keys;
  };
  auto boundary_keys = [](const Mesh& m) {
    std::vector<std::tuple<double, double, double, double, int>> keys;
    for (const auto& e : m.edges()) {
      if (!e.is_boundary()) continue;
      Point p = m.vertex(e.v[0]);
      Point q = m.vertex(e.v[1]);
      if (std::tie(q.x, q.y) < std::tie(p.x, p.y)) std::swap(p, q);
      keys.emplace_back(p.x, p.y, q.x, q.y, static_cast<int>(e.kind));
    }
    std::sort(keys.begin(), keys.end());
    return keys;
  };
  return tri_keys(a) == tri_keys(b) && boundary_keys(a) == boundary_keys(b);
}

bool validate_interior_node_assumption(const Mesh& mesh) {
  for (const auto& t : mesh.triangles()) {
    if (std::all_of(t.v.begin(), t.v.end(), [&](int v) { return mesh.is_boundary_vertex(v); })) return false;
  }
  return true;
}

PatchIndex::PatchIndex(const Mesh& mesh) {
  const std::size_t nv = mesh.n_vertices();
  const std::size_t nt = mesh.n_triangles();
  const std::size_t ne = mesh.n_edges();

  auto build = [nv](std::vector<int>& ptr, std::vector<int>& idx, auto&& for_each_pair) {
    ptr.assign(nv + 1, 0);
    for_each_pair([&](int v, int) { ++ptr[static_cast<std::size_t>(v) + 1]; });
    for (std::size_t i = 0; i < nv; ++i) ptr[i + 1] += ptr[i];
    idx.assign(static_cast<std::size_t>(ptr[nv]), -1);
    std::vector<int> fill(ptr.begin(), ptr.end() - 1);
    for_each_pair([&](int v, int item) { idx[static_cast<std::size_t>(fill[static_cast<std::size_t>(v)]++)] = item; });
  };
  build(vt_ptr_, vt_, [&](auto&& f) {
    for (std::size_t t = 0; t < nt; ++t) {
      for (int v : mesh.triangle(static_cast<int>(t)).v) f(v, static_cast<int>(t));
    }
  });
  build(ve_ptr_, ve_, [&](auto&& f) {
    for (std::size_t e = 0; e < ne; ++e) {
      for (int v : mesh.edge(static_cast<int>(e)).v) f(v, static_cast<int>(e));
    }
  });

  et_ptr_.assign(ne + 1, 0);
  et_.clear();
  et_.reserve(2 * ne);
  edge_area_.assign(ne, 0.0);
  for (std::size_t e = 0; e < ne; ++e) {
    for (int t : mesh.edge(static_cast<int>(e)).tri) {
      if (t < 0) continue;
      et_.push_back(t);
      edge_area_[e] += mesh.area(t);
    }
    et_ptr_[e + 1] = static_cast<int>(et_.size());
  }
  vertex_area_.assign(nv, 0.0);
  for (std::size_t v = 0; v < nv; ++v) {
    for (int t : vertex_triangles(static_cast<int>(v))) vertex_area_[v] += mesh.area(t);
  }
}

std::span<const int> PatchIndex::vertex_triangles(int v) const {
  const auto b = static_cast<std::size_t>(vt_ptr_[static_cast<std::size_t>(v)]);
  const auto e = static_cast<std::size_t>(vt_ptr_[static_cast<std::size_t>(v) + 1]);
  return std::span<const int>(vt_).subspan(b, e - b);
}

std::span<const int> PatchIndex::vertex_edges(int v) const {
  const auto b = static_cast<std::size_t>(ve_ptr_[static_cast<std::size_t>(v)]);
  const auto e = static_cast<std::size_t>(ve_ptr_[static_cast<std::size_t>(v) + 1]);
  return std::span<const int>(ve_).subspan(b, e - b);
}

std::span<const int> PatchIndex::edge_triangles(int e) const {
  const auto b = static_cast<std::size_t>(et_ptr_[static_cast<std::size_t>(e)]);
  const auto n = static_cast<std::size_t>(et_ptr_[static_cast<std::size_t>(e) + 1]) - b;
  return std::span<const int>(et_).subspan(b, n);
}

double PatchIndex::vertex_patch_area(int v) const { return vertex_area_[static_cast<std::size_t>(v)]; }
double PatchIndex::edge_patch_area(int e) const { return edge_area_[static_cast<std::size_t>(e)]; }

PatchIndex patches(const Mesh& mesh) { return PatchIndex(mesh); }

std::optional<double> closure_ratio(std::span<const RefinementStep> history) {
  if (history.size() < 2) return std::nullopt;
  std::size_t marked = 0;
  for (std::size_t j = 0; j + 1 < history.size(); ++j) marked += history[j].marked;
  if (marked == 0) return std::nullopt;
  const double grown = static_cast<double>(history.back().mesh_size) - static_cast<double>(history.front().mesh_size);
  return grown / static_cast<double>(marked);
}

}  // namespace afem
