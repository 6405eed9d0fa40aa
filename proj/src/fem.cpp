#include "afem/fem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "afem/errors.hpp"
#include "afem/kernels.hpp"
#include "afem/parallel.hpp"

namespace afem {

std::array<Point, 3> triangle_points(const Mesh& mesh, int t) {
  const auto& v = mesh.triangle(t).v;
  return {mesh.vertex(v[0]), mesh.vertex(v[1]), mesh.vertex(v[2])};
}

std::array<Point, 3> hat_gradients(const std::array<Point, 3>& p) {
  const double a2 = cross(p[1] - p[0], p[2] - p[0]);
  std::array<Point, 3> g;
  for (int i = 0; i < 3; ++i) {
    const Point& q1 = p[static_cast<std::size_t>((i + 1) % 3)];
    const Point& q2 = p[static_cast<std::size_t>((i + 2) % 3)];
    g[static_cast<std::size_t>(i)] = (1.0 / a2) * Point{q1.y - q2.y, q2.x - q1.x};
  }
  return g;
}

Point gradient(const Mesh& mesh, std::span<const double> u, int t) {
  const auto g = hat_gradients(triangle_points(mesh, t));
  const auto& v = mesh.triangle(t).v;
  Point r{0.0, 0.0};
  for (int i = 0; i < 3; ++i) r = r + u[static_cast<std::size_t>(v[static_cast<std::size_t>(i)])] * g[static_cast<std::size_t>(i)];
  return r;
}

TriangleRule element_rule(const QuadratureOptions& quad) {
  return subdivided(triangle_rule(quad.triangle_degree), quad.subdivision_levels);
}

std::span<const double> VolumeSamples::values(int t) const {
  return std::span<const double>(f).subspan(static_cast<std::size_t>(t) * per_element(), per_element());
}

std::span<const double> VolumeSamples::weights(int t) const {
  return std::span<const double>(weight).subspan(static_cast<std::size_t>(t) * per_element(), per_element());
}

VolumeSamples sample_volume(const Mesh& mesh, const ScalarField& f, const QuadratureOptions& quad) {
  VolumeSamples s;
  s.rule = element_rule(quad);
  const std::size_t nq = s.rule.size();
  const std::size_t nt = mesh.n_triangles();
  s.f.resize(nt * nq);
  s.weight.resize(nt * nq);
  parallel_for(nt, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const auto p = triangle_points(mesh, static_cast<int>(t));
      const double area = mesh.area(static_cast<int>(t));
      for (std::size_t q = 0; q < nq; ++q) {
        const auto& b = s.rule.bary[q];
        const Point x = b[0] * p[0] + b[1] * p[1] + b[2] * p[2];
        s.f[t * nq + q] = f(x);
        s.weight[t * nq + q] = s.rule.weights[q] * area;
      }
    }
  }, 256);
  for (std::size_t i = 0; i < s.f.size(); ++i) {
    if (!std::isfinite(s.f[i])) {
      throw DataError("non-finite volume load sample on triangle " + std::to_string(i / nq));
    }
  }
  return s;
}

namespace {

// Outward unit normal of a boundary edge, from its adjacent triangle.
Point boundary_normal(const Mesh& mesh, const Edge& e, Point& a, Point& b) {
  const auto& t = mesh.triangle(e.tri[0]);
  const int l = e.local[0];
  a = mesh.vertex(t.v[static_cast<std::size_t>(l)]);
  b = mesh.vertex(t.v[static_cast<std::size_t>((l + 1) % 3)]);
  return outward_normal(a, b);
}

}  // namespace

SparseSystem assemble(const Mesh& mesh, const ProblemSpec& prob, const VolumeSamples& load,
                      const QuadratureOptions& quad) {
  const std::size_t nt = mesh.n_triangles();
  const std::size_t nv = mesh.n_vertices();
  const std::size_t nq = load.per_element();
  std::vector<std::array<double, 9>> local_k(nt);
  std::vector<std::array<double, 3>> local_b(nt);
  parallel_for(nt, [&](std::size_t begin, std::size_t end) {
    std::vector<double> wf(nq);
    std::vector<double> bary(nq);
    for (std::size_t t = begin; t < end; ++t) {
      const int ti = static_cast<int>(t);
      const double area = mesh.area(ti);
      if (!(area > 0.0)) throw MeshError("degenerate triangle " + std::to_string(t));
      const auto g = hat_gradients(triangle_points(mesh, ti));
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) local_k[t][i * 3 + j] = area * dot(g[i], g[j]);
      }
      const auto w = load.weights(ti);
      const auto f = load.values(ti);
      kernels::hadamard(w, f, wf);
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t q = 0; q < nq; ++q) bary[q] = load.rule.bary[q][i];
        local_b[t][i] = kernels::weighted_sum(wf, bary);
      }
    }
  }, 512);

  SparseSystem sys;
  std::vector<Triplet> trip;
  trip.reserve(nt * 9);
  sys.b.assign(nv, 0.0);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& v = mesh.triangle(static_cast<int>(t)).v;
    for (std::size_t i = 0; i < 3; ++i) {
      sys.b[static_cast<std::size_t>(v[i])] += local_b[t][i];
      for (std::size_t j = 0; j < 3; ++j) trip.push_back({v[i], v[j], local_k[t][i * 3 + j]});
    }
  }
  sys.a = from_triplets(nv, std::move(trip));

  sys.neumann.assign(nv, 0.0);
  const SegmentRule seg = gauss_legendre(quad.segment_points);
  for (const auto& e : mesh.edges()) {
    if (e.kind != EdgeKind::neumann) continue;
    Point a, b;
    const Point n = boundary_normal(mesh, e, a, b);
    const auto& t = mesh.triangle(e.tri[0]);
    const int ia = t.v[static_cast<std::size_t>(e.local[0])];
    const int ib = t.v[static_cast<std::size_t>((e.local[0] + 1) % 3)];
    double ba = 0.0;
    double bb = 0.0;
    for (const auto& q : segment_points(a, b, seg, prob.singularities)) {
      const double phi = prob.phi(q.x, n);
      if (!std::isfinite(phi)) throw DataError("non-finite Neumann flux sample");
      ba += q.w * (1.0 - q.t) * phi;
      bb += q.w * q.t * phi;
    }
    sys.neumann[static_cast<std::size_t>(ia)] += ba;
    sys.neumann[static_cast<std::size_t>(ib)] += bb;
  }
  for (std::size_t i = 0; i < nv; ++i) sys.b[i] += sys.neumann[i];

  for (std::size_t v = 0; v < nv; ++v) {
    (mesh.is_dirichlet_vertex(static_cast<int>(v)) ? sys.constrained : sys.free).push_back(static_cast<int>(v));
  }
  return sys;
}

SparseSystem assemble(const Mesh& mesh, const ProblemSpec& prob, const QuadratureOptions& quad) {
  return assemble(mesh, prob, sample_volume(mesh, prob.f, quad), quad);
}

DiscreteSolution solve(const SparseSystem& sys, const DirichletTrace& trace, const CgOptions& cg,
                       std::span<const double> initial) {
  const std::size_t nv = sys.a.n;
  DiscreteSolution sol;
  sol.trace = trace;
  sol.u.assign(nv, 0.0);
  if (!initial.empty()) {
    if (initial.size() != nv) throw ContractError("initial guess has the wrong length");
    std::copy(initial.begin(), initial.end(), sol.u.begin());
  }
  if (trace.vertices != sys.constrained) {
    throw ContractError("Dirichlet trace does not match the constrained vertices of the system");
  }
  for (std::size_t k = 0; k < trace.vertices.size(); ++k) {
    sol.u[static_cast<std::size_t>(trace.vertices[k])] = trace.values[k];
  }
  const std::size_t nf = sys.free.size();
  if (nf == 0) return sol;

  // b_I - A_ID g_D
  std::vector<double> gd(nv, 0.0);
  for (int v : sys.constrained) gd[static_cast<std::size_t>(v)] = sol.u[static_cast<std::size_t>(v)];
  std::vector<double> agd(nv);
  sys.a.multiply(gd, agd);
  std::vector<double> rhs(nf), x(nf);
  for (std::size_t k = 0; k < nf; ++k) {
    const auto v = static_cast<std::size_t>(sys.free[k]);
    rhs[k] = sys.b[v] - agd[v];
    x[k] = sol.u[v];
  }
  const CsrMatrix aii = submatrix(sys.a, sys.free);
  sol.stats = conjugate_gradient(aii, rhs, x, cg);
  for (std::size_t k = 0; k < nf; ++k) sol.u[static_cast<std::size_t>(sys.free[k])] = x[k];
  return sol;
}

std::optional<double> energy_error(const Mesh& mesh, const DiscreteSolution& sol, const ProblemSpec& prob,
                                   const QuadratureOptions& quad) {
  if (!prob.exact) return std::nullopt;
  const auto& grad = prob.exact->grad;
  const TriangleRule rule = triangle_rule(quad.energy_degree);
  const std::size_t nt = mesh.n_triangles();
  std::vector<double> err(nt, 0.0);
  parallel_for(nt, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const int ti = static_cast<int>(t);
      const auto p = triangle_points(mesh, ti);
      const Point gu = gradient(mesh, sol.u, ti);
      int sv = -1;
      int power = 1;
      for (const auto& s : prob.singularities) {
        for (int i = 0; i < 3; ++i) {
          if (p[static_cast<std::size_t>(i)] == s.at) {
            sv = i;
            power = s.radial_power;
          }
        }
      }
      double acc = 0.0;
      if (sv >= 0) {
        for (const auto& q : singular_triangle_points(p, sv, power, quad.singular_points)) {
          const Point d = grad(q.x) - gu;
          acc += q.w * dot(d, d);
        }
      } else {
        const double area = mesh.area(ti);
        for (std::size_t q = 0; q < rule.size(); ++q) {
          const auto& b = rule.bary[q];
          const Point d = grad(b[0] * p[0] + b[1] * p[1] + b[2] * p[2]) - gu;
          acc += rule.weights[q] * area * dot(d, d);
        }
      }
      err[t] = acc;
    }
  }, 256);
  double total = 0.0;
  for (double e : err) total += e;
  return std::sqrt(total);
}

std::vector<double> prolongate(const Mesh& coarse, const Mesh& fine, std::span<const double> u) {
  if (u.size() != coarse.n_vertices()) throw ContractError("coefficient vector does not match the coarse mesh");
  if (fine.n_vertices() < coarse.n_vertices()) throw ContractError("fine mesh has fewer vertices than the coarse mesh");
  std::vector<double> out(fine.n_vertices());
  std::copy(u.begin(), u.end(), out.begin());
  for (std::size_t v = coarse.n_vertices(); v < fine.n_vertices(); ++v) {
    const auto par = fine.vertex_parents(static_cast<int>(v));
    if (!par) throw ContractError("fine mesh is not a refinement of the coarse mesh");
    const auto a = static_cast<std::size_t>((*par)[0]);
    const auto b = static_cast<std::size_t>((*par)[1]);
    if (a >= v || b >= v) throw ContractError("vertex parents out of order");
    out[v] = 0.5 * (out[a] + out[b]);
  }
  return out;
}

}  // namespace afem
