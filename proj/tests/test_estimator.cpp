#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "afem/errors.hpp"
#include "afem/estimator.hpp"
#include "helpers.hpp"

using namespace afem;

namespace {

DiscreteSolution with_values(const Mesh& m, const ProblemSpec& p, std::vector<double> u) {
  DiscreteSolution s;
  s.u = std::move(u);
  s.trace = discretize_trace(m, p, DirichletMethod::nodal);
  return s;
}

ProblemSpec load_only(Mesh m, ScalarField f) {
  return testing::custom_problem(std::move(m), std::move(f), [](Point) { return 0.0; }, [](Point, Point) { return 0.0; });
}

void check_totals(const EstimatorReport& r) {
  auto sum = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) {
      CHECK(x >= 0.0);
      s += x;
    }
    return s;
  };
  const EstimatorTotals& t = r.totals;
  const double scale = std::max(1e-300, t.varrho_ext + t.rho);
  CHECK(std::abs(sum(r.varrho) - t.varrho) <= 1e-12 * scale);
  CHECK(std::abs(sum(r.varrho_ext) - t.varrho_ext) <= 1e-12 * scale);
  CHECK(std::abs(sum(r.rho) - t.rho) <= 1e-12 * scale);
  CHECK(std::abs(sum(r.osc_d) - t.osc_d) <= 1e-12 * scale);
  CHECK(std::abs(sum(r.osc) - t.osc) <= 1e-12 * scale);
  CHECK(std::abs(t.eta() + t.osc + t.osc_d - t.varrho) <= 1e-12 * scale);
  for (std::size_t e = 0; e < r.varrho.size(); ++e) CHECK(r.varrho[e] <= r.varrho_ext[e]);
}

}  // namespace

TEST_CASE("normal jump on the split square") {
  // U = 0 on (0,1,2), U = y - x on (0,2,3); g = y (1 - x) is affine on every side
  const ProblemSpec p = testing::custom_problem(
      testing::unit_square(), [](Point) { return 0.0; }, [](Point x) { return x.y * (1 - x.x); },
      [](Point x, Point t) { return -x.y * t.x + (1 - x.x) * t.y; });
  const Mesh& m = p.initial_mesh;
  const std::vector<double> u{0, 0, 0, 1};
  const int diag = m.find_edge(0, 2);
  CHECK(std::abs(normal_jump(m, u, diag)) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(normal_jump(m, u, m.find_edge(0, 1)), ContractError);

  const EstimatorReport r = estimate(m, p, with_values(m, p, u));
  CHECK(r.eta[diag] == doctest::Approx(4.0));
  CHECK(r.varrho[diag] == doctest::Approx(4.0));
  for (double rho : r.rho) CHECK(rho == doctest::Approx(std::sqrt(0.5) * std::sqrt(2.0) * 2.0));
  check_totals(r);

  // halves of a bisected edge carry the parent jump
  const std::vector<int> mark{diag};
  const Mesh fine = refine(m, mark);
  const std::vector<double> uf = prolongate(m, fine, u);
  const int mid = static_cast<int>(fine.n_vertices()) - 1;
  for (int end : {0, 2}) CHECK(std::abs(normal_jump(fine, uf, fine.find_edge(end, mid))) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("affine problem has a vanishing estimator") {
  std::mt19937 rng(21);
  const ProblemSpec p = affine_problem(1, 2, 3);
  const Mesh m = testing::random_refinement(p.initial_mesh, rng, 4, 0.3);
  const DiscreteSolution sol = solve(assemble(m, p), discretize_trace(m, p, DirichletMethod::nodal));
  const EstimatorReport r = estimate(m, p, sol);
  CHECK(r.totals.varrho <= 1e-20);
  CHECK(r.totals.rho <= 1e-20);
  for (double x : element_estimator(m, p, sol)) CHECK(x <= 1e-20);
  for (double x : edge_estimator(m, p, sol)) CHECK(x <= 1e-20);
}

TEST_CASE("constant load on one triangle") {
  const ProblemSpec p = load_only(testing::unit_triangle(), [](Point) { return 1.0; });
  const Mesh& m = p.initial_mesh;
  const DiscreteSolution sol = with_values(m, p, {0, 0, 0});
  const EstimatorReport r = estimate(m, p, sol);
  CHECK(r.rho[0] == doctest::Approx(0.25));
  CHECK(r.res[0] == doctest::Approx(0.25));
  CHECK(r.osc_t[0] == doctest::Approx(0.0));
  for (std::size_t e = 0; e < m.n_edges(); ++e) {
    CHECK(r.wosc[e] == doctest::Approx(0.25));
    CHECK(r.varrho_ext[e] == doctest::Approx(r.varrho[e] + 0.25));
  }
  const std::vector<double> ext = extended_estimator(m, p, sol);
  CHECK(ext == r.varrho_ext);
}

TEST_CASE("zero load leaves the extended estimator unchanged") {
  const ProblemSpec p = zshape_problem();
  const Mesh m = refine_uniform(p.initial_mesh);
  const EstimatorReport r = estimate(m, p, solve(assemble(m, p), discretize_trace(m, p, DirichletMethod::nodal)));
  CHECK(r.varrho_ext == r.varrho);
  check_totals(r);
}

TEST_CASE("oscillations of f = x") {
  const ProblemSpec sq = load_only(testing::unit_square(), [](Point x) { return x.x; });
  const Oscillations o = oscillations(sq.initial_mesh, sq);
  CHECK(o.osc[sq.initial_mesh.find_edge(0, 2)] == doctest::Approx(1.0 / 12.0).epsilon(1e-14));

  const ProblemSpec tri = load_only(testing::unit_triangle(), [](Point x) { return x.x; });
  CHECK(oscillations(tri.initial_mesh, tri).osc_t[0] == doctest::Approx(0.5 / 36.0).epsilon(1e-14));

  // the square: sum of osc_T over the edge patch is strictly below osc(E)
  const EquivalenceReport eq = local_equivalence_check(sq.initial_mesh, sq);
  CHECK(eq.violations == 0);
  const Oscillations os = oscillations(sq.initial_mesh, sq);
  CHECK(os.osc_t[0] + os.osc_t[1] < os.osc[sq.initial_mesh.find_edge(0, 2)]);
}

TEST_CASE("constant data has no oscillations") {
  const ProblemSpec p = testing::custom_problem(
      refine_uniform(testing::bottom_dirichlet_triangle()), [](Point) { return 2.5; }, [](Point) { return 0.0; },
      [](Point, Point) { return 0.0; }, [](Point, Point) { return -1.0; });
  const Oscillations o = oscillations(p.initial_mesh, p);
  for (const auto* v : {&o.osc_t, &o.osc, &o.osc_k, &o.osc_n}) {
    for (double x : *v) CHECK(std::abs(x) <= 1e-28);
  }
  const EquivalenceReport eq = local_equivalence_check(p.initial_mesh, p);
  CHECK(eq.violations == 0);
}

TEST_CASE("local equivalence for random piecewise quadratics") {
  std::mt19937 rng(22);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    const double a[6] = {c(rng), c(rng), c(rng), c(rng), c(rng), c(rng)};
    const double b[6] = {c(rng), c(rng), c(rng), c(rng), c(rng), c(rng)};
    const ScalarField f = [=](Point x) {
      const double* q = x.x + 0.3 * x.y > 0 ? a : b;
      return q[0] + q[1] * x.x + q[2] * x.y + q[3] * x.x * x.x + q[4] * x.x * x.y + q[5] * x.y * x.y;
    };
    ProblemSpec p = load_only(testing::random_refinement(zshape_problem().initial_mesh, rng, 3, 0.2), f);
    CHECK(p.initial_mesh.n_triangles() >= 50);
    const EquivalenceReport eq = local_equivalence_check(p.initial_mesh, p);
    CHECK(eq.comparisons > 0);
    CHECK(eq.violations == 0);
  }
}

TEST_CASE("integral means are best constants") {
  const ProblemSpec p = lshape_problem();
  const Mesh m = refine_uniform(p.initial_mesh);
  const VolumeSamples load = sample_volume(m, p.f);
  const PatchIndex pi(m);
  std::mt19937 rng(23);
  std::normal_distribution<double> n01;
  for (std::size_t v = 0; v < m.n_vertices(); ++v) {
    const auto tris = pi.vertex_triangles(static_cast<int>(v));
    const PatchMoments mom = patch_moments(load, tris);
    CHECK(patch_sq_dev(load, tris, mom.mean) == doctest::Approx(mom.sq_dev).epsilon(1e-12));
    for (int k = 0; k < 5; ++k) CHECK(mom.sq_dev <= patch_sq_dev(load, tris, mom.mean + n01(rng)) * (1 + 1e-12));
  }
}

TEST_CASE("totals are consistent on the benchmarks") {
  std::mt19937 rng(24);
  for (const ProblemSpec& p : {zshape_problem(), lshape_problem()}) {
    const Mesh m = testing::random_refinement(p.initial_mesh, rng, 3, 0.3);
    const EstimatorReport r = estimate(m, p, solve(assemble(m, p), discretize_trace(m, p, DirichletMethod::nodal)));
    check_totals(r);
    for (std::size_t v = 0; v < m.n_vertices(); ++v) {
      if (m.is_boundary_vertex(static_cast<int>(v))) CHECK(r.osc_k[v] == 0.0);
    }
  }
}

TEST_CASE("entity csv") {
  const ProblemSpec p = load_only(testing::unit_triangle(), [](Point) { return 1.0; });
  const EstimatorReport r = estimate(p.initial_mesh, p, with_values(p.initial_mesh, p, {0, 0, 0}));
  std::ostringstream os;
  write_entity_csv(os, p.initial_mesh, r, 0, true);
  const std::string s = os.str();
  CHECK(s.rfind("level,kind,id,value\n", 0) == 0);
  CHECK(s.find("0,T,0,") != std::string::npos);
  CHECK(s.find("0,E_D,") != std::string::npos);
}
