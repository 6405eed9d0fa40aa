#include "afem/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "afem/errors.hpp"
#include "afem/kernels.hpp"
#include "afem/sparse.hpp"

namespace afem {

namespace {

// Rule for the projections. Twelve points integrate products of hats with the
// radially substituted data exactly, which keeps the discrete mass matrix equal
// to the exact one.
SegmentRule projection_rule(const QuadratureOptions& quad) {
  return gauss_legendre(std::max(quad.segment_points, 12));
}

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw DataError(std::string("non-finite sample of ") + what);
  return v;
}

std::size_t index_of(const std::vector<int>& sorted, int v) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
  if (it == sorted.end() || *it != v) return sorted.size();
  return static_cast<std::size_t>(it - sorted.begin());
}

std::vector<int> dirichlet_vertices(const Mesh& mesh) {
  std::vector<int> out;
  for (std::size_t v = 0; v < mesh.n_vertices(); ++v) {
    if (mesh.is_dirichlet_vertex(static_cast<int>(v))) out.push_back(static_cast<int>(v));
  }
  return out;
}

}  // namespace

const char* to_string(DirichletMethod m) {
  switch (m) {
    case DirichletMethod::nodal: return "nodal";
    case DirichletMethod::l2_projection: return "l2";
    case DirichletMethod::scott_zhang: return "sz";
  }
  return "?";
}

DirichletMethod parse_dirichlet_method(const std::string& s) {
  if (s == "nodal") return DirichletMethod::nodal;
  if (s == "l2") return DirichletMethod::l2_projection;
  if (s == "sz") return DirichletMethod::scott_zhang;
  throw ConfigError("unknown Dirichlet discretization '" + s + "' (expected nodal, l2 or sz)");
}

double DirichletTrace::value(int vertex) const {
  const std::size_t k = index_of(vertices, vertex);
  if (k == vertices.size()) throw ContractError("vertex " + std::to_string(vertex) + " is not on the Dirichlet boundary");
  return values[k];
}

double DirichletTrace::slope(const Mesh& mesh, int e) const {
  const auto& ed = mesh.edge(e);
  return (value(ed.v[1]) - value(ed.v[0])) / mesh.edge_length(e);
}

int EdgeChoiceMap::choice(int vertex) const {
  const std::size_t k = index_of(vertices, vertex);
  if (k == vertices.size()) throw ContractError("vertex " + std::to_string(vertex) + " has no edge choice");
  return edge[k];
}

EdgeChoiceMap edge_choice(const Mesh& mesh) {
  EdgeChoiceMap m;
  m.vertices = dirichlet_vertices(mesh);
  m.edge.assign(m.vertices.size(), -1);
  // edges_of_kind is ascending, so the first hit is the smallest id
  for (int e : mesh.edges_of_kind(EdgeKind::dirichlet)) {
    for (int v : mesh.edge(e).v) {
      auto& slot = m.edge[index_of(m.vertices, v)];
      if (slot < 0) slot = e;
    }
  }
  return m;
}

double scott_zhang_value(const Mesh& mesh, const ScalarField& g, int z, int edge, const SegmentRule& rule,
                         std::span<const RadialSingularity> singularities) {
  const auto& ed = mesh.edge(edge);
  if (ed.v[0] != z && ed.v[1] != z) throw ContractError("chosen edge does not contain the vertex");
  const Point a = mesh.vertex(ed.v[0]);
  const Point b = mesh.vertex(ed.v[1]);
  const auto pts = segment_points(a, b, rule, singularities);
  // local mass matrix with the same quadrature, then its inverse gives the dual basis
  double m00 = 0.0, m01 = 0.0, m11 = 0.0;
  double r0 = 0.0, r1 = 0.0;
  for (const auto& q : pts) {
    const double gv = checked(g(q.x), "the Dirichlet trace");
    m00 += q.w * (1.0 - q.t) * (1.0 - q.t);
    m01 += q.w * (1.0 - q.t) * q.t;
    m11 += q.w * q.t * q.t;
    r0 += q.w * (1.0 - q.t) * gv;
    r1 += q.w * q.t * gv;
  }
  const double det = m00 * m11 - m01 * m01;
  if (ed.v[0] == z) return (m11 * r0 - m01 * r1) / det;
  return (m00 * r1 - m01 * r0) / det;
}

DirichletTrace discretize_trace(const Mesh& mesh, const ScalarField& g, DirichletMethod method,
                                const QuadratureOptions& quad, std::span<const RadialSingularity> singularities) {
  DirichletTrace tr;
  tr.method = method;
  tr.vertices = dirichlet_vertices(mesh);
  tr.edges = mesh.edges_of_kind(EdgeKind::dirichlet);
  const std::size_t n = tr.vertices.size();
  tr.values.assign(n, 0.0);
  switch (method) {
    case DirichletMethod::nodal:
      for (std::size_t k = 0; k < n; ++k) tr.values[k] = checked(g(mesh.vertex(tr.vertices[k])), "the Dirichlet trace");
      break;
    case DirichletMethod::scott_zhang: {
      const SegmentRule rule = projection_rule(quad);
      const EdgeChoiceMap choice = edge_choice(mesh);
      for (std::size_t k = 0; k < n; ++k) {
        tr.values[k] = scott_zhang_value(mesh, g, tr.vertices[k], choice.edge[k], rule, singularities);
      }
      break;
    }
    case DirichletMethod::l2_projection: {
      const SegmentRule rule = projection_rule(quad);
      std::vector<Triplet> trip;
      std::vector<double> rhs(n, 0.0);
      for (int e : tr.edges) {
        const auto& ed = mesh.edge(e);
        const auto ia = static_cast<std::int32_t>(index_of(tr.vertices, ed.v[0]));
        const auto ib = static_cast<std::int32_t>(index_of(tr.vertices, ed.v[1]));
        double m00 = 0.0, m01 = 0.0, m11 = 0.0, r0 = 0.0, r1 = 0.0;
        for (const auto& q : segment_points(mesh.vertex(ed.v[0]), mesh.vertex(ed.v[1]), rule, singularities)) {
          const double gv = checked(g(q.x), "the Dirichlet trace");
          m00 += q.w * (1.0 - q.t) * (1.0 - q.t);
          m01 += q.w * (1.0 - q.t) * q.t;
          m11 += q.w * q.t * q.t;
          r0 += q.w * (1.0 - q.t) * gv;
          r1 += q.w * q.t * gv;
        }
        trip.push_back({ia, ia, m00});
        trip.push_back({ia, ib, m01});
        trip.push_back({ib, ia, m01});
        trip.push_back({ib, ib, m11});
        rhs[static_cast<std::size_t>(ia)] += r0;
        rhs[static_cast<std::size_t>(ib)] += r1;
      }
      const CsrMatrix m = from_triplets(n, std::move(trip));
      // diagonally scaled P1 mass matrices are uniformly well conditioned
      CgOptions cg;
      cg.rel_tol = 1e-15;
      cg.max_iterations = 20 * n + 100;
      try {
        conjugate_gradient(m, rhs, tr.values, cg);
      } catch (const SolverError&) {
        cg.rel_tol = 1e-13;
        std::fill(tr.values.begin(), tr.values.end(), 0.0);
        conjugate_gradient(m, rhs, tr.values, cg);
      }
      break;
    }
  }
  return tr;
}

DirichletTrace discretize_trace(const Mesh& mesh, const ProblemSpec& prob, DirichletMethod method,
                                const QuadratureOptions& quad) {
  return discretize_trace(mesh, prob.g, method, quad, prob.singularities);
}

EdgeDerivativeSamples sample_edge_derivative(const Mesh& mesh, const ProblemSpec& prob, int e,
                                             const QuadratureOptions& quad) {
  const auto& ed = mesh.edge(e);
  const Point a = mesh.vertex(ed.v[0]);
  const Point b = mesh.vertex(ed.v[1]);
  EdgeDerivativeSamples s;
  s.length = mesh.edge_length(e);
  const Point t = (1.0 / s.length) * (b - a);
  for (const auto& q : segment_points(a, b, gauss_legendre(quad.segment_points), prob.singularities)) {
    s.weights.push_back(q.w);
    s.dg.push_back(checked(prob.g_tangential(q.x, t), "the tangential derivative"));
  }
  return s;
}

std::vector<double> osc_dirichlet(const Mesh& mesh, const ProblemSpec& prob, const DirichletTrace& trace,
                                  const QuadratureOptions& quad) {
  std::vector<double> out(mesh.n_edges(), 0.0);
  for (int e : trace.edges) {
    const auto s = sample_edge_derivative(mesh, prob, e, quad);
    out[static_cast<std::size_t>(e)] = s.length * kernels::weighted_sq_dev(s.weights, s.dg, trace.slope(mesh, e));
  }
  return out;
}

double check_pythagoras(const EdgeDerivativeSamples& samples, double nodal_slope, double alt_slope,
                        DirichletMethod trace_method) {
  if (trace_method != DirichletMethod::nodal) {
    throw ContractError("the Pythagoras identity holds for the nodal interpolant only");
  }
  const double a = kernels::weighted_sq_dev(samples.weights, samples.dg, nodal_slope);
  double len = 0.0;
  for (double w : samples.weights) len += w;
  const double b = (nodal_slope - alt_slope) * (nodal_slope - alt_slope) * len;
  const double c = kernels::weighted_sq_dev(samples.weights, samples.dg, alt_slope);
  return std::abs(a + b - c);
}

namespace {

// Sorted vertex triples of the triangles around z, used to detect unchanged patches.
std::vector<std::array<int, 3>> patch_signature(const Mesh& mesh, const PatchIndex& idx, int z) {
  std::vector<std::array<int, 3>> sig;
  for (int t : idx.vertex_triangles(z)) {
    auto v = mesh.triangle(t).v;
    std::sort(v.begin(), v.end());
    sig.push_back(v);
  }
  std::sort(sig.begin(), sig.end());
  return sig;
}

}  // namespace

std::vector<int> scott_zhang_locality_check(const Mesh& coarse, const Mesh& fine, const EdgeChoiceMap& choice_coarse,
                                            const EdgeChoiceMap& choice_fine, const ScalarField& v,
                                            const QuadratureOptions& quad) {
  if (fine.n_vertices() < coarse.n_vertices() || fine.forest().n_roots != coarse.forest().n_roots) {
    throw ContractError("fine mesh is not a refinement of the coarse mesh");
  }
  const PatchIndex pc(coarse);
  const PatchIndex pf(fine);
  const SegmentRule rule = projection_rule(quad);
  std::vector<int> violations;
  for (std::size_t k = 0; k < choice_coarse.vertices.size(); ++k) {
    const int z = choice_coarse.vertices[k];
    if (!fine.is_dirichlet_vertex(z)) throw ContractError("Dirichlet vertex lost under refinement");
    if (patch_signature(coarse, pc, z) != patch_signature(fine, pf, z)) continue;
    const int ec = choice_coarse.edge[k];
    const int ef = choice_fine.choice(z);
    if (ec != ef || coarse.edge(ec).v != fine.edge(ef).v) {
      throw ContractError("edge choice for vertex " + std::to_string(z) + " changed on an unchanged patch");
    }
    if (scott_zhang_value(coarse, v, z, ec, rule) != scott_zhang_value(fine, v, z, ef, rule)) violations.push_back(z);
  }
  return violations;
}

}  // namespace afem
