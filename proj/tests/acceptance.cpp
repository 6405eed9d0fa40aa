// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "afem/adapt.hpp"
#include "afem/errors.hpp"
#include "afem/estimator.hpp"
#include "afem/run.hpp"

using namespace afem;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void report(int id, const std::string& title, Verdict& v) {
  std::printf("criterion %d %s: %s%s\n", id, v.pass ? "PASS" : "FAIL", title.c_str(), v.detail.str().c_str());
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

struct TimedRun {
  LoopResult result;
  double seconds = 0.0;
};

TimedRun run_loop(const RunConfig& cfg, std::function<void(const LevelView&)> observer = {}) {
  const ProblemSpec prob = make_problem(cfg);
  LoopConfig lc = make_loop_config(cfg, prob);
  lc.observer = std::move(observer);
  const auto t0 = std::chrono::steady_clock::now();
  TimedRun out;
  out.result = adaptive_loop(prob, lc);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (out.result.error) std::rethrow_exception(out.result.error);
  return out;
}

RunConfig adaptive(const std::string& problem, double theta, std::size_t max_elements = 20000) {
  RunConfig c;
  c.problem = problem;
  c.theta = theta;
  c.max_elements = max_elements;
  c.max_levels = 400;
  return c;
}

RunConfig uniform(const std::string& problem, std::size_t levels) {
  RunConfig c;
  c.problem = problem;
  c.strategy = "uniform";
  c.max_levels = levels;
  c.max_elements = 1u << 30;
  return c;
}

std::string fmt(double x, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string sci(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1e", x);
  return buf;
}

bool within(double x, double lo, double hi) { return x >= lo && x <= hi; }

// Levels of the last decade of N, at least six.
std::size_t decade_window(const std::vector<LoopRecord>& r) {
  const double cut = static_cast<double>(r.back().n_elements) / 10.0;
  std::size_t w = 0;
  for (const auto& rec : r) {
    if (static_cast<double>(rec.n_elements) >= cut) ++w;
  }
  return std::max<std::size_t>(w, 6);
}

std::size_t brute_force_min(const std::vector<double>& v, double theta) {
  double total = 0.0;
  for (double x : v) total += x;
  std::size_t best = v.size();
  for (unsigned mask = 0; mask < (1u << v.size()); ++mask) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (mask & (1u << i)) s += v[i];
    }
    if (s >= theta * total) best = std::min<std::size_t>(best, static_cast<std::size_t>(__builtin_popcount(mask)));
  }
  return best;
}

std::vector<int> random_marking(const Mesh& m, std::mt19937& rng, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<int> marked;
  for (std::size_t e = 0; e < m.n_edges(); ++e) {
    if (coin(rng)) marked.push_back(static_cast<int>(e));
  }
  if (marked.empty()) marked.push_back(static_cast<int>(rng() % m.n_edges()));
  return marked;
}

Mesh random_refinement(Mesh m, std::mt19937& rng, int steps, double p) {
  for (int s = 0; s < steps; ++s) m = refine(m, random_marking(m, rng, p));
  return m;
}

// Problem with a cubic trace on a single random triangle whose edge 0-1 is Dirichlet.
ProblemSpec random_cubic_edge(std::mt19937& rng) {
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  Point a{c(rng), c(rng)}, b{c(rng), c(rng)};
  while (distance(a, b) < 0.1) b = {c(rng), c(rng)};
  const Point n{-(b.y - a.y), b.x - a.x};
  const Point apex = midpoint(a, b) + 0.5 * n;
  ProblemSpec p;
  p.name = "cubic";
  p.initial_mesh = Mesh::from_triangles({a, b, apex}, {{0, 1, 2}},
                                        {BoundarySegment{0, 1, EdgeKind::dirichlet},
                                         BoundarySegment{1, 2, EdgeKind::neumann},
                                         BoundarySegment{2, 0, EdgeKind::neumann}},
                                        ReferenceEdgeRule::as_given);
  double k[10];
  for (double& x : k) x = c(rng);
  p.f = [](Point) { return 0.0; };
  p.g = [=](Point x) {
    return k[0] + k[1] * x.x + k[2] * x.y + k[3] * x.x * x.x + k[4] * x.x * x.y + k[5] * x.y * x.y +
           k[6] * x.x * x.x * x.x + k[7] * x.x * x.x * x.y + k[8] * x.x * x.y * x.y + k[9] * x.y * x.y * x.y;
  };
  p.g_tangential = [=](Point x, Point t) {
    const double gx = k[1] + 2 * k[3] * x.x + k[4] * x.y + 3 * k[6] * x.x * x.x + 2 * k[7] * x.x * x.y + k[8] * x.y * x.y;
    const double gy = k[2] + k[4] * x.x + 2 * k[5] * x.y + k[7] * x.x * x.x + 2 * k[8] * x.x * x.y + 3 * k[9] * x.y * x.y;
    return gx * t.x + gy * t.y;
  };
  p.phi = [](Point, Point) { return 0.0; };
  return p;
}

}  // namespace

int main() {
  std::map<double, TimedRun> zruns;

  // 1. Z-shape adaptive rate
  {
    Verdict v;
    for (double theta : {0.2, 0.5, 0.8}) {
      zruns[theta] = run_loop(adaptive("zshape", theta));
      const auto& r = zruns[theta].result.records;
      const double s = rate_fit(r, Quantity::varrho, 6);
      v.detail << " theta=" << theta << ": slope " << fmt(s) << ", N=" << r.back().n_elements << ", "
               << fmt(zruns[theta].seconds, 1) << "s;";
      v.require(r.back().n_elements >= 20000, "fewer than 2e4 elements");
      v.require(within(s, -0.58, -0.42), "slope outside [-0.58,-0.42]");
      v.require(zruns[theta].seconds <= 60.0, "runtime above 60 s");
    }
    report(1, "Z-shape adaptive varrho slope in [-0.58,-0.42] (last 6 levels)", v);
  }

  // 2. Z-shape uniform rate
  {
    Verdict v;
    const TimedRun u = run_loop(uniform("zshape", 6));
    const double s = rate_fit(u.result.records, Quantity::varrho, 6);
    v.detail << " slope " << fmt(s) << ", N=" << u.result.records.back().n_elements << ", " << fmt(u.seconds, 1) << "s";
    v.require(u.result.records.size() == 6, "not 6 levels");
    v.require(within(s, -0.34, -0.23), "slope outside [-0.34,-0.23]");
    v.require(u.seconds <= 60.0, "runtime above 60 s");
    report(2, "Z-shape uniform varrho slope in [-0.34,-0.23]", v);
  }

  // 3. Z-shape boundary terms, fitted over the last decade of N
  {
    Verdict v;
    for (double theta : {0.2, 0.5, 0.8}) {
      const auto& r = zruns[theta].result.records;
      const std::size_t w = decade_window(r);
      const double sd = rate_fit(r, Quantity::osc_d, w);
      const double sn = rate_fit(r, Quantity::eta_n, w);
      v.detail << " theta=" << theta << " (" << w << " levels): osc_D " << fmt(sd) << ", eta_N " << fmt(sn) << ";";
      v.require(within(sd, -0.85, -0.62), "osc_D slope at theta=" + fmt(theta, 1));
      v.require(within(sn, -0.85, -0.62), "eta_N slope at theta=" + fmt(theta, 1));
    }
    report(3, "Z-shape osc_D and eta_N slopes in [-0.85,-0.62]", v);
  }

  // 4. L-shape rates
  std::map<double, TimedRun> lruns;
  {
    Verdict v;
    for (double theta : {0.2, 0.5, 0.8}) {
      lruns[theta] = run_loop(adaptive("lshape", theta));
      const auto& r = lruns[theta].result.records;
      const double s = rate_fit(r, Quantity::varrho, 6);
      v.detail << " theta=" << theta << ": slope " << fmt(s) << ", " << fmt(lruns[theta].seconds, 1) << "s;";
      v.require(within(s, -0.58, -0.42), "adaptive slope at theta=" + fmt(theta, 1));
      v.require(lruns[theta].seconds <= 120.0, "runtime above 120 s");
    }
    const TimedRun u = run_loop(uniform("lshape", 7));
    const double s = rate_fit(u.result.records, Quantity::varrho, 6);
    v.detail << " uniform: slope " << fmt(s) << ", " << fmt(u.seconds, 1) << "s";
    v.require(within(s, -0.40, -0.27), "uniform slope outside [-0.40,-0.27]");
    v.require(u.seconds <= 120.0, "uniform runtime above 120 s");
    report(4, "L-shape adaptive slope in [-0.58,-0.42], uniform in [-0.40,-0.27]", v);
  }

  // 5. Modified Doerfler parity
  std::vector<TimedRun> modified_runs;
  {
    Verdict v;
    for (const char* problem : {"zshape", "lshape"}) {
      RunConfig c = adaptive(problem, 0.5);
      c.strategy = "modified";
      c.theta1 = c.theta2 = c.vartheta = 0.5;
      modified_runs.push_back(run_loop(c));
      const double sm = rate_fit(modified_runs.back().result.records, Quantity::varrho, 6);
      const auto& plain = std::string(problem) == "zshape" ? zruns[0.5] : lruns[0.5];
      const double sp = rate_fit(plain.result.records, Quantity::varrho, 6);
      v.detail << ' ' << problem << ": modified " << fmt(sm) << " vs plain " << fmt(sp) << ';';
      v.require(std::abs(sm - sp) <= 0.06, std::string(problem) + " slopes differ by more than 0.06");
    }
    report(5, "modified Doerfler slope within 0.06 of plain Doerfler", v);
  }

  // 6. Exactness suite
  {
    Verdict v;
    std::mt19937 rng(2024);

    // affine data on refined meshes: exact solution, vanishing estimator
    {
      const ProblemSpec p = affine_problem(1, 2, 3);
      double worst = 0.0, est = 0.0;
      for (int k = 0; k < 5; ++k) {
        const Mesh m = random_refinement(p.initial_mesh, rng, 4, 0.3);
        const DiscreteSolution sol = solve(assemble(m, p), discretize_trace(m, p, DirichletMethod::nodal));
        for (std::size_t i = 0; i < m.n_vertices(); ++i) worst = std::max(worst, std::abs(sol.u[i] - p.exact->u(m.vertex(static_cast<int>(i)))));
        est = std::max(est, std::sqrt(estimate(m, p, sol).totals.varrho));
      }
      v.detail << " affine: nodal error " << sci(worst) << ", estimator " << sci(est) << ';';
      v.require(worst <= 1e-10 && est <= 1e-10, "affine problem not exact");
    }

    // Pythagoras identity on random edges with random cubic data
    {
      double worst = 0.0;
      std::normal_distribution<double> n01;
      for (int k = 0; k < 100; ++k) {
        const ProblemSpec p = random_cubic_edge(rng);
        const Mesh& m = p.initial_mesh;
        const int e = m.find_edge(0, 1);
        const EdgeDerivativeSamples s = sample_edge_derivative(m, p, e);
        const double nodal = discretize_trace(m, p, DirichletMethod::nodal).slope(m, e);
        const double alt = nodal + 3.0 * n01(rng);
        double scale = 0.0;
        for (std::size_t q = 0; q < s.dg.size(); ++q) scale += s.weights[q] * (s.dg[q] - alt) * (s.dg[q] - alt);
        worst = std::max(worst, check_pythagoras(s, nodal, alt) / std::max(1.0, scale));
      }
      v.detail << " Pythagoras " << sci(worst) << ';';
      v.require(worst <= 1e-12, "Pythagoras residual above 1e-12");
    }

    // best approximation of integral means and of the trace derivative
    {
      const ProblemSpec l = lshape_problem();
      const Mesh& m = lruns[0.5].result.final_mesh;
      QuadratureOptions q;
      q.subdivision_levels = 2;
      const VolumeSamples load = sample_volume(m, l.f, q);
      const PatchIndex pi(m);
      std::normal_distribution<double> n01;
      std::size_t bad = 0, checks = 0;
      for (std::size_t z = 0; z < m.n_vertices(); z += 7) {
        const auto tris = pi.vertex_triangles(static_cast<int>(z));
        const PatchMoments mom = patch_moments(load, tris);
        for (int k = 0; k < 5; ++k, ++checks) {
          if (mom.sq_dev > patch_sq_dev(load, tris, mom.mean + n01(rng)) * (1 + 1e-12)) ++bad;
        }
      }
      const ProblemSpec z = zshape_problem();
      const Mesh& mz = zruns[0.5].result.final_mesh;
      const DirichletTrace tr = discretize_trace(mz, z, DirichletMethod::nodal);
      const std::vector<double> osc = osc_dirichlet(mz, z, tr);
      for (int e : tr.edges) {
        const EdgeDerivativeSamples s = sample_edge_derivative(mz, z, e);
        for (int k = 0; k < 50; ++k, ++checks) {
          const double c = tr.slope(mz, e) + n01(rng);
          double d = 0.0;
          for (std::size_t i = 0; i < s.dg.size(); ++i) d += s.weights[i] * (s.dg[i] - c) * (s.dg[i] - c);
          if (osc[e] > s.length * d * (1 + 1e-12)) ++bad;
        }
      }
      v.detail << " best approximation " << bad << "/" << checks << " violations;";
      v.require(bad == 0, "best approximation violated");
    }

    // osc_D monotone and reduction inequality along the adaptive runs
    {
      std::size_t bad = 0, steps = 0;
      for (const auto* runs : {&zruns, &lruns}) {
        for (const auto& [theta, tr] : *runs) {
          const auto& r = tr.result.records;
          for (std::size_t l = 1; l < r.size(); ++l, ++steps) {
            if (!r[l].osc_d_reduction_ok) ++bad;
            if (r[l].osc_d > r[l - 1].osc_d * (1 + 1e-12)) ++bad;
            if (!r[l].marked_bisected) ++bad;
          }
        }
      }
      v.detail << " osc_D reduction " << bad << "/" << steps << " violations;";
      v.require(bad == 0, "osc_D monotonicity or reduction violated");
    }

    // local equivalence inequalities
    {
      std::size_t violations = 0, comparisons = 0;
      const ProblemSpec l = lshape_problem();
      QuadratureOptions q;
      q.subdivision_levels = 2;
      for (const Mesh* m : {&lruns[0.2].result.final_mesh, &lruns[0.8].result.final_mesh}) {
        const EquivalenceReport rep = local_equivalence_check(*m, l, q);
        violations += rep.violations;
        comparisons += rep.comparisons;
      }
      std::uniform_real_distribution<double> c(-1.0, 1.0);
      for (int k = 0; k < 10; ++k) {
        double a[6];
        for (double& x : a) x = c(rng);
        ProblemSpec p = l;
        p.initial_mesh = random_refinement(l.initial_mesh, rng, 4, 0.3);
        p.f = [=](Point x) {
          const double s = x.x > x.y ? 1.0 : -0.5;
          return s * (a[0] + a[1] * x.x + a[2] * x.y + a[3] * x.x * x.x + a[4] * x.x * x.y + a[5] * x.y * x.y);
        };
        const EquivalenceReport rep = local_equivalence_check(p.initial_mesh, p);
        violations += rep.violations;
        comparisons += rep.comparisons;
      }
      v.detail << " local equivalence " << violations << "/" << comparisons << " violations;";
      v.require(violations == 0, "local equivalence violated");
    }

    // edgewise estimator vs extended estimator, every level of two runs
    {
      std::size_t bad = 0, edges = 0;
      auto observer = [&](const LevelView& lv) {
        for (std::size_t e = 0; e < lv.report.varrho.size(); ++e, ++edges) {
          if (lv.report.varrho[e] > lv.report.varrho_ext[e]) ++bad;
        }
      };
      run_loop(adaptive("zshape", 0.5, 5000), observer);
      run_loop(adaptive("lshape", 0.5, 5000), observer);
      v.detail << " extended estimator " << bad << "/" << edges << " violations;";
      v.require(bad == 0, "extended estimator below edge estimator");
    }

    // overlay bound on random mesh pairs
    {
      std::size_t bad = 0;
      const ProblemSpec z = zshape_problem();
      const Mesh& t0 = z.initial_mesh;
      for (int k = 0; k < 200; ++k) {
        const Mesh a = random_refinement(t0, rng, 1 + static_cast<int>(rng() % 4), 0.2);
        const Mesh b = random_refinement(t0, rng, 1 + static_cast<int>(rng() % 4), 0.2);
        const Mesh o = overlay(a, b);
        if (o.n_triangles() > a.n_triangles() + b.n_triangles() - t0.n_triangles()) ++bad;
        if (std::abs(o.total_area() - t0.total_area()) > 1e-12) ++bad;
      }
      v.detail << " overlay " << bad << "/200 violations;";
      v.require(bad == 0, "overlay bound violated");
    }

    // Doerfler minimal cardinality against brute force
    {
      std::size_t bad = 0;
      std::uniform_int_distribution<int> size(1, 12);
      std::uniform_real_distribution<double> val(0.0, 1.0), th(0.01, 0.99);
      for (int k = 0; k < 500; ++k) {
        std::vector<double> ind(static_cast<std::size_t>(size(rng)));
        for (double& x : ind) x = k % 4 == 0 ? std::floor(5 * val(rng)) : std::pow(val(rng), 3);
        const double theta = th(rng);
        const std::vector<int> m = mark_doerfler(ind, theta);
        double total = 0.0, marked = 0.0;
        for (double x : ind) total += x;
        for (int i : m) marked += ind[i];
        if (total == 0.0) {
          if (!m.empty()) ++bad;
          continue;
        }
        if (marked < theta * total || m.size() != brute_force_min(ind, theta)) ++bad;
      }
      v.detail << " Doerfler minimality " << bad << "/500 violations;";
      v.require(bad == 0, "Doerfler set not minimal");
    }

    // modified marking implies plain Doerfler with the equivalent parameter
    {
      std::size_t bad = 0, steps = 0;
      for (const auto& tr : modified_runs) {
        for (std::size_t l = 0; l + 1 < tr.result.records.size(); ++l, ++steps) {
          if (!tr.result.records[l].doerfler_ok) ++bad;
        }
      }
      v.detail << " modified marking " << bad << "/" << steps << " violations";
      v.require(bad == 0, "modified marking translation violated");
    }
    report(6, "exactness suite", v);
  }

  // 7. Scott-Zhang locality under local refinement
  {
    Verdict v;
    std::mt19937 rng(77);
    const ProblemSpec z = zshape_problem();
    const ScalarField smooth = [](Point x) { return std::sin(3 * x.x) * std::exp(x.y); };
    std::size_t violations = 0, checked = 0, contract = 0;
    for (int k = 0; k < 50; ++k) {
      const Mesh coarse = random_refinement(z.initial_mesh, rng, 1 + static_cast<int>(rng() % 3), 0.3);
      std::vector<int> mark;
      const int count = 1 + static_cast<int>(rng() % 3);
      for (int i = 0; i < count; ++i) mark.push_back(static_cast<int>(rng() % coarse.n_edges()));
      const Mesh fine = refine(coarse, mark);
      const EdgeChoiceMap cc = edge_choice(coarse), cf = edge_choice(fine);
      try {
        for (const ScalarField* g : {&z.g, &smooth}) violations += scott_zhang_locality_check(coarse, fine, cc, cf, *g).size();
      } catch (const ContractError&) {
        ++contract;
      }
      // vertices whose neighbourhood did not change
      const DirichletTrace a = discretize_trace(coarse, smooth, DirichletMethod::scott_zhang);
      const DirichletTrace b = discretize_trace(fine, smooth, DirichletMethod::scott_zhang);
      for (std::size_t i = 0; i < a.vertices.size(); ++i) {
        if (a.values[i] == b.value(a.vertices[i])) ++checked;
      }
    }
    v.detail << " " << violations << " violations, " << contract << " persistence errors, " << checked
             << " Dirichlet values unchanged";
    v.require(violations == 0 && contract == 0, "locality violated");
    v.require(checked > 0, "no unchanged patch exercised");
    report(7, "Scott-Zhang values persist on unchanged patches (50 refinements)", v);
  }

  // 8. projected traces
  {
    Verdict v;
    for (const char* method : {"l2", "sz"}) {
      RunConfig c = adaptive("zshape", 0.5);
      c.dirichlet = method;
      const TimedRun tr = run_loop(c);
      const auto& r = tr.result.records;
      bool monotone = true;
      for (std::size_t l = 4; l < r.size(); ++l) monotone = monotone && r[l].varrho < r[l - 1].varrho;
      const double s = rate_fit(r, Quantity::varrho, 6);
      v.detail << ' ' << method << ": slope " << fmt(s) << (monotone ? ", monotone;" : ", not monotone;");
      v.require(monotone, std::string(method) + " estimator not monotone from level 3");
      v.require(within(s, -0.58, -0.42), std::string(method) + " slope outside [-0.58,-0.42]");
    }
    report(8, "l2 and sz traces: monotone varrho from level 3, slope in [-0.58,-0.42]", v);
  }

  // 9. contraction probe
  {
    Verdict v;
    const auto c = contraction_diagnostic(zruns[0.5].result.records, 1.0, 1.0);
    v.require(c.has_value(), "no energy error");
    if (c) {
      double kmax = 0.0;
      for (std::size_t l = 2; l < c->kappa.size(); ++l) {
        if (c->kappa[l]) kmax = std::max(kmax, *c->kappa[l]);
      }
      v.detail << " kappa<1 on " << fmt(100 * c->fraction_below_one, 1) << "% of " << c->considered
               << " levels, max kappa " << fmt(kmax);
      v.require(c->fraction_below_one >= 0.9, "contraction on fewer than 90% of levels");
    }
    report(9, "Z-shape contraction with lambda=gamma=1", v);
  }

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
