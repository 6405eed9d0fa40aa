#include "afem/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "afem/errors.hpp"
#include "afem/kernels.hpp"
#include "afem/parallel.hpp"

namespace afem {

namespace {

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// Outward normal of the local edge l of triangle t.
Point edge_normal(const Mesh& mesh, int t, int l) {
  const auto& tv = mesh.triangle(t).v;
  return outward_normal(mesh.vertex(tv[static_cast<std::size_t>(l)]), mesh.vertex(tv[static_cast<std::size_t>((l + 1) % 3)]));
}

struct ElementMoments {
  double mass = 0.0;    // sum of weights
  double integral = 0.0;
};

}  // namespace

PatchMoments patch_moments(const VolumeSamples& load, std::span<const int> triangles) {
  double mass = 0.0;
  double integral = 0.0;
  for (int t : triangles) {
    const auto w = load.weights(t);
    for (double x : w) mass += x;
    integral += kernels::weighted_sum(w, load.values(t));
  }
  PatchMoments m;
  m.mean = mass > 0.0 ? integral / mass : 0.0;
  m.sq_dev = patch_sq_dev(load, triangles, m.mean);
  return m;
}

double patch_sq_dev(const VolumeSamples& load, std::span<const int> triangles, double c) {
  double s = 0.0;
  for (int t : triangles) s += kernels::weighted_sq_dev(load.weights(t), load.values(t), c);
  return s;
}

double normal_jump(const Mesh& mesh, std::span<const double> u, int e) {
  const auto& ed = mesh.edge(e);
  if (ed.is_boundary()) throw ContractError("normal jump requested on boundary edge " + std::to_string(e));
  const Point n = edge_normal(mesh, ed.tri[0], ed.local[0]);
  return dot(gradient(mesh, u, ed.tri[0]) - gradient(mesh, u, ed.tri[1]), n);
}

EstimatorReport estimate(const Mesh& mesh, const ProblemSpec& prob, const DiscreteSolution& sol,
                         const VolumeSamples& load, const QuadratureOptions& quad) {
  const std::size_t nt = mesh.n_triangles();
  const std::size_t ne = mesh.n_edges();
  const std::size_t nv = mesh.n_vertices();
  const PatchIndex idx(mesh);
  const SegmentRule seg = gauss_legendre(quad.segment_points);

  EstimatorReport r;
  r.res.assign(nt, 0.0);
  r.osc_t.assign(nt, 0.0);
  r.rho.assign(nt, 0.0);
  std::vector<ElementMoments> mom(nt);
  parallel_for(nt, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const int ti = static_cast<int>(t);
      const auto w = load.weights(ti);
      const auto f = load.values(ti);
      for (double x : w) mom[t].mass += x;
      mom[t].integral = kernels::weighted_sum(w, f);
      const double area = mesh.area(ti);
      r.res[t] = area * kernels::weighted_sq_dev(w, f, 0.0);
      r.osc_t[t] = area * kernels::weighted_sq_dev(w, f, mom[t].integral / mom[t].mass);
    }
  }, 512);

  // Unweighted squared edge norms entering ρ: ||[∂_n U]||^2, ||φ - ∂_n U||^2, ||(g - g_l)'||^2.
  std::vector<double> edge_norm(ne, 0.0);
  r.eta.assign(ne, 0.0);
  r.osc.assign(ne, 0.0);
  r.osc_d.assign(ne, 0.0);
  r.osc_n.assign(ne, 0.0);
  r.wosc.assign(ne, 0.0);
  r.varrho.assign(ne, 0.0);
  r.varrho_ext.assign(ne, 0.0);
  parallel_for(ne, [&](std::size_t begin, std::size_t end) {
    std::vector<double> w, vals;
    for (std::size_t e = begin; e < end; ++e) {
      const int ei = static_cast<int>(e);
      const auto& ed = mesh.edge(ei);
      const double len = mesh.edge_length(ei);
      switch (ed.kind) {
        case EdgeKind::interior: {
          const double j = normal_jump(mesh, sol.u, ei);
          edge_norm[e] = len * j * j;
          r.eta[e] = len * edge_norm[e];
          const auto tris = idx.edge_triangles(ei);
          const double mass = mom[static_cast<std::size_t>(tris[0])].mass + mom[static_cast<std::size_t>(tris[1])].mass;
          const double mean = (mom[static_cast<std::size_t>(tris[0])].integral + mom[static_cast<std::size_t>(tris[1])].integral) / mass;
          r.osc[e] = idx.edge_patch_area(ei) * patch_sq_dev(load, tris, mean);
          r.varrho[e] = r.eta[e] + r.osc[e];
          r.varrho_ext[e] = r.varrho[e];
          break;
        }
        case EdgeKind::neumann: {
          const int t = ed.tri[0];
          const int l = ed.local[0];
          const auto& tv = mesh.triangle(t).v;
          const Point a = mesh.vertex(tv[static_cast<std::size_t>(l)]);
          const Point b = mesh.vertex(tv[static_cast<std::size_t>((l + 1) % 3)]);
          const Point n = outward_normal(a, b);
          const double dnu = dot(gradient(mesh, sol.u, t), n);
          w.clear();
          vals.clear();
          for (const auto& q : segment_points(a, b, seg, prob.singularities)) {
            w.push_back(q.w);
            vals.push_back(prob.phi(q.x, n));
          }
          edge_norm[e] = kernels::weighted_sq_dev(w, vals, dnu);
          r.eta[e] = len * edge_norm[e];
          double wl = 0.0;
          for (double x : w) wl += x;
          r.osc_n[e] = len * kernels::weighted_sq_dev(w, vals, kernels::weighted_sum(w, vals) / wl);
          r.wosc[e] = r.res[static_cast<std::size_t>(t)];
          r.varrho[e] = r.eta[e];
          r.varrho_ext[e] = r.eta[e] + r.wosc[e];
          break;
        }
        case EdgeKind::dirichlet: {
          const auto s = sample_edge_derivative(mesh, prob, ei, quad);
          edge_norm[e] = kernels::weighted_sq_dev(s.weights, s.dg, sol.trace.slope(mesh, ei));
          r.osc_d[e] = len * edge_norm[e];
          r.wosc[e] = r.res[static_cast<std::size_t>(ed.tri[0])];
          r.varrho[e] = r.osc_d[e];
          r.varrho_ext[e] = r.osc_d[e] + r.wosc[e];
          break;
        }
      }
    }
  }, 512);

  for (std::size_t t = 0; t < nt; ++t) {
    double s = 0.0;
    for (int e : mesh.triangle_edges(static_cast<int>(t))) s += edge_norm[static_cast<std::size_t>(e)];
    r.rho[t] = r.res[t] + std::sqrt(mesh.area(static_cast<int>(t))) * s;
  }

  r.osc_k.assign(nv, 0.0);
  parallel_for(nv, [&](std::size_t begin, std::size_t end) {
    for (std::size_t v = begin; v < end; ++v) {
      if (mesh.is_boundary_vertex(static_cast<int>(v))) continue;
      const auto tris = idx.vertex_triangles(static_cast<int>(v));
      double mass = 0.0, integral = 0.0;
      for (int t : tris) {
        mass += mom[static_cast<std::size_t>(t)].mass;
        integral += mom[static_cast<std::size_t>(t)].integral;
      }
      r.osc_k[v] = idx.vertex_patch_area(static_cast<int>(v)) * patch_sq_dev(load, tris, integral / mass);
    }
  }, 512);

  auto& tot = r.totals;
  tot.rho = sum(r.rho);
  tot.res = sum(r.res);
  tot.osc_t = sum(r.osc_t);
  tot.osc_k = sum(r.osc_k);
  tot.osc = sum(r.osc);
  tot.osc_d = sum(r.osc_d);
  tot.osc_n = sum(r.osc_n);
  for (std::size_t e = 0; e < ne; ++e) {
    (mesh.edge(static_cast<int>(e)).kind == EdgeKind::interior ? tot.eta_omega : tot.eta_n) += r.eta[e];
  }
  tot.varrho = sum(r.varrho);
  tot.varrho_ext = sum(r.varrho_ext);
  return r;
}

EstimatorReport estimate(const Mesh& mesh, const ProblemSpec& prob, const DiscreteSolution& sol,
                         const QuadratureOptions& quad) {
  return estimate(mesh, prob, sol, sample_volume(mesh, prob.f, quad), quad);
}

std::vector<double> element_estimator(const Mesh& mesh, const ProblemSpec& prob, const DiscreteSolution& sol,
                                      const QuadratureOptions& quad) {
  return estimate(mesh, prob, sol, quad).rho;
}

std::vector<double> edge_estimator(const Mesh& mesh, const ProblemSpec& prob, const DiscreteSolution& sol,
                                   const QuadratureOptions& quad) {
  return estimate(mesh, prob, sol, quad).varrho;
}

std::vector<double> extended_estimator(const Mesh& mesh, const ProblemSpec& prob, const DiscreteSolution& sol,
                                       const QuadratureOptions& quad) {
  return estimate(mesh, prob, sol, quad).varrho_ext;
}

Oscillations oscillations(const Mesh& mesh, const ProblemSpec& prob, const QuadratureOptions& quad) {
  // The oscillations do not depend on U; any discrete function will do.
  DiscreteSolution zero;
  zero.u.assign(mesh.n_vertices(), 0.0);
  zero.trace = discretize_trace(mesh, prob, DirichletMethod::nodal, quad);
  EstimatorReport r = estimate(mesh, prob, zero, quad);
  return {std::move(r.osc_t), std::move(r.osc), std::move(r.osc_k), std::move(r.osc_n)};
}

EquivalenceReport local_equivalence_check(const Mesh& mesh, const ProblemSpec& prob, const QuadratureOptions& quad) {
  const VolumeSamples load = sample_volume(mesh, prob.f, quad);
  const PatchIndex idx(mesh);
  const std::size_t nt = mesh.n_triangles();
  std::vector<double> osc_t(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const int ti = static_cast<int>(t);
    const auto m = patch_moments(load, std::span<const int>(&ti, 1));
    osc_t[t] = mesh.area(ti) * m.sq_dev;
  }
  std::vector<double> node_dev(mesh.n_vertices());
  for (std::size_t v = 0; v < mesh.n_vertices(); ++v) {
    node_dev[v] = std::sqrt(patch_moments(load, idx.vertex_triangles(static_cast<int>(v))).sq_dev);
  }

  EquivalenceReport rep;
  std::vector<std::pair<double, double>> pairs;  // (lhs, rhs) of lhs <= rhs
  for (std::size_t e = 0; e < mesh.n_edges(); ++e) {
    const int ei = static_cast<int>(e);
    const auto tris = idx.edge_triangles(ei);
    const auto m = patch_moments(load, tris);
    const double edge_dev = std::sqrt(m.sq_dev);
    if (!mesh.edge(ei).is_boundary()) {
      const double osc = idx.edge_patch_area(ei) * m.sq_dev;
      const double lhs = osc_t[static_cast<std::size_t>(tris[0])] + osc_t[static_cast<std::size_t>(tris[1])];
      rep.max_violation_i = std::max(rep.max_violation_i, lhs - osc);
      rep.scale = std::max({rep.scale, lhs, osc});
      pairs.emplace_back(lhs, osc);
    }
    for (int z : mesh.edge(ei).v) {
      const double rhs = node_dev[static_cast<std::size_t>(z)];
      rep.max_violation_iii = std::max(rep.max_violation_iii, edge_dev - rhs);
      rep.scale = std::max({rep.scale, edge_dev, rhs});
      pairs.emplace_back(edge_dev, rhs);
    }
  }
  rep.comparisons = pairs.size();
  const double tol = 1e-12 * std::max(rep.scale, std::numeric_limits<double>::min());
  for (const auto& [l, r] : pairs) {
    if (l - r > tol) ++rep.violations;
  }
  return rep;
}

void write_entity_csv(std::ostream& os, const Mesh& mesh, const EstimatorReport& report, int level, bool header) {
  const auto prec = os.precision(17);
  if (header) os << "level,kind,id,value\n";
  for (std::size_t t = 0; t < report.rho.size(); ++t) os << level << ",T," << t << ',' << report.rho[t] << '\n';
  for (std::size_t e = 0; e < report.varrho.size(); ++e) {
    const char* kind = "E_int";
    switch (mesh.edge(static_cast<int>(e)).kind) {
      case EdgeKind::interior: kind = "E_int"; break;
      case EdgeKind::dirichlet: kind = "E_D"; break;
      case EdgeKind::neumann: kind = "E_N"; break;
    }
    os << level << ',' << kind << ',' << e << ',' << report.varrho[e] << '\n';
  }
  for (std::size_t v = 0; v < report.osc_k.size(); ++v) {
    if (mesh.is_boundary_vertex(static_cast<int>(v))) continue;
    os << level << ",K," << v << ',' << report.osc_k[v] << '\n';
  }
  os.precision(prec);
}

}  // namespace afem
