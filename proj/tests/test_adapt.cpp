#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "afem/adapt.hpp"
#include "afem/errors.hpp"
#include "helpers.hpp"

using namespace afem;

namespace {

// Smallest cardinality of a subset reaching theta * total.
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

std::vector<LoopRecord> synthetic(double rate) {
  std::vector<LoopRecord> r;
  for (int l = 0; l < 8; ++l) {
    LoopRecord rec;
    rec.level = l;
    rec.n_elements = static_cast<std::size_t>(100 * std::pow(2.0, l));
    rec.varrho = std::pow(static_cast<double>(rec.n_elements), 2 * rate);
    r.push_back(rec);
  }
  return r;
}

}  // namespace

TEST_CASE("Doerfler marking examples") {
  const std::vector<double> v{9, 4, 1, 1, 1};
  CHECK(mark_doerfler(v, 0.5) == std::vector<int>{0});
  CHECK(mark_doerfler(v, 0.99).size() == 5);
  CHECK(mark_doerfler(std::vector<double>{1, 1, 1, 1}, 0.5) == std::vector<int>{0, 1});
  CHECK(mark_doerfler(std::vector<double>{0, 0}, 0.5).empty());
  CHECK_THROWS_AS(mark_doerfler(v, 1.0), ConfigError);
  CHECK_THROWS_AS(mark_doerfler(v, 0.0), ConfigError);
}

TEST_CASE("Doerfler marking has minimal cardinality") {
  std::mt19937 rng(31);
  std::uniform_int_distribution<int> size(1, 12);
  std::uniform_real_distribution<double> val(0.0, 1.0), th(0.05, 0.95);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> v(static_cast<std::size_t>(size(rng)));
    for (double& x : v) x = k % 3 == 0 ? std::floor(4 * val(rng)) : val(rng) * val(rng);
    const double theta = th(rng);
    const std::vector<int> m = mark_doerfler(v, theta);
    double total = 0.0, marked = 0.0;
    for (double x : v) total += x;
    for (int i : m) marked += v[i];
    if (total == 0.0) {
      CHECK(m.empty());
      continue;
    }
    CHECK(marked >= theta * total);
    CHECK(m.size() == brute_force_min(v, theta));
  }
}

TEST_CASE("modified marking branches") {
  const std::vector<double> eta{4, 1, 1, 0};
  const std::vector<double> zero(4, 0.0);
  const ModifiedMarking a = mark_modified(eta, zero, 0.5, 0.5, 0.5);
  CHECK(a.branch == Branch::jump);
  CHECK(a.marked == std::vector<int>{0});

  const std::vector<double> osc{0, 0, 0, 2};
  const ModifiedMarking b = mark_modified(zero, osc, 0.5, 0.5, 0.5);
  CHECK(b.branch == Branch::oscillation);
  CHECK(b.marked == std::vector<int>{3});
  CHECK(std::string(to_string(Branch::oscillation)) == "osc");
  CHECK_THROWS_AS(mark_modified(eta, osc, 0.5, 1.5, 0.5), ConfigError);
  CHECK_THROWS_AS(mark_modified(eta, osc, 0.5, 0.5, 0.0), ConfigError);
}

TEST_CASE("modified marking satisfies plain Doerfler with the equivalent parameter") {
  std::mt19937 rng(32);
  std::uniform_real_distribution<double> u(0.0, 1.0), th(0.1, 0.9), vt(0.1, 3.0);
  for (int k = 0; k < 300; ++k) {
    const std::size_t n = 1 + rng() % 30;
    std::vector<double> eta(n), osc(n), sum(n);
    const double os = u(rng) * 2;
    for (std::size_t i = 0; i < n; ++i) {
      eta[i] = u(rng);
      osc[i] = os * u(rng) * u(rng);
      sum[i] = eta[i] + osc[i];
    }
    const double t1 = th(rng), t2 = th(rng), v = vt(rng);
    const ModifiedMarking m = mark_modified(eta, osc, t1, t2, v);
    double total = 0.0, marked = 0.0;
    for (double x : sum) total += x;
    for (int i : m.marked) marked += sum[i];
    CHECK(marked >= equivalent_theta(t1, t2, v) * total * (1 - 1e-12));
  }
}

TEST_CASE("marking configuration") {
  MarkingConfig c;
  c.validate();
  c.theta = 1.2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.strategy = Strategy::uniform;
  c.validate();
  c.strategy = Strategy::modified;
  c.vartheta = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(parse_strategy("modified") == Strategy::modified);
  CHECK_THROWS_AS(parse_strategy("greedy"), ConfigError);
}

TEST_CASE("affine problem stops after one level") {
  LoopConfig cfg;
  const LoopResult r = adaptive_loop(affine_problem(1, 2, 3), cfg);
  REQUIRE(r.records.size() == 1);
  CHECK(std::sqrt(r.records[0].varrho) <= 1e-10);
  CHECK_FALSE(r.error);
}

TEST_CASE("uniform refinement quadruples the mesh") {
  LoopConfig cfg;
  cfg.marking.strategy = Strategy::uniform;
  cfg.stop.max_levels = 6;
  const ProblemSpec p = zshape_problem();
  const LoopResult r = adaptive_loop(p, cfg);
  REQUIRE(r.records.size() == 6);
  for (std::size_t l = 0; l < r.records.size(); ++l) {
    CHECK(r.records[l].n_elements == p.initial_mesh.n_triangles() * static_cast<std::size_t>(std::pow(4, l)));
  }
  CHECK(r.final_mesh.n_triangles() == r.records.back().n_elements);
}

TEST_CASE("zshape adaptive loop") {
  LoopConfig cfg;
  cfg.stop.max_elements = 10000;
  cfg.stop.max_levels = 100;
  std::size_t observed = 0;
  cfg.observer = [&](const LevelView& v) {
    ++observed;
    for (std::size_t e = 0; e < v.report.varrho.size(); ++e) CHECK(v.report.varrho[e] <= v.report.varrho_ext[e]);
  };
  const LoopResult r = adaptive_loop(zshape_problem(), cfg);
  CHECK_FALSE(r.error);
  CHECK(observed == r.records.size());
  CHECK(r.records.back().n_elements >= 10000);
  for (std::size_t l = 0; l < r.records.size(); ++l) {
    const LoopRecord& rec = r.records[l];
    CHECK(rec.doerfler_ok);
    CHECK(rec.osc_d_reduction_ok);
    CHECK(rec.marked_bisected);
    CHECK(rec.energy_error.has_value());
    if (l > 0) CHECK(rec.n_elements > r.records[l - 1].n_elements);
    if (l >= 2) CHECK(rec.varrho < r.records[l - 1].varrho);
  }
  const double slope = rate_fit(r.records, Quantity::varrho, 6);
  CHECK(slope < -0.4);
  CHECK(slope > -0.6);

  const auto c = contraction_diagnostic(r.records, 1.0, 1.0);
  REQUIRE(c.has_value());
  CHECK(c->kappa.size() == r.records.size() - 1);
  CHECK(c->fraction_below_one >= 0.9);
}

TEST_CASE("modified marking loop records branches") {
  LoopConfig cfg;
  cfg.marking.strategy = Strategy::modified;
  cfg.stop.max_elements = 3000;
  cfg.stop.max_levels = 100;
  const LoopResult r = adaptive_loop(zshape_problem(), cfg);
  for (std::size_t l = 0; l + 1 < r.records.size(); ++l) {
    CHECK(r.records[l].branch != Branch::none);
    CHECK(r.records[l].doerfler_ok);
  }
}

TEST_CASE("contraction needs an exact solution") {
  LoopConfig cfg;
  cfg.stop.max_levels = 3;
  const LoopResult r = adaptive_loop(lshape_problem(), cfg);
  CHECK_FALSE(contraction_diagnostic(r.records, 1.0, 1.0).has_value());
  CHECK_THROWS_AS(rate_fit(r.records, Quantity::error, 3), FitError);

  std::vector<LoopRecord> zero(4);
  for (auto& rec : zero) rec.energy_error = 0.0;
  const auto c = contraction_diagnostic(zero, 1.0, 1.0);
  REQUIRE(c.has_value());
  for (const auto& k : c->kappa) CHECK_FALSE(k.has_value());
}

TEST_CASE("rate fit on exact power laws") {
  CHECK(rate_fit(synthetic(-0.5), Quantity::varrho, 6) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(rate_fit(synthetic(-0.75), Quantity::varrho, 8) == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK_THROWS_AS(rate_fit(synthetic(-0.5), Quantity::varrho, 2), FitError);
  CHECK_THROWS_AS(rate_fit(synthetic(-0.5), Quantity::varrho, 9), FitError);
  CHECK_THROWS_AS(rate_fit(synthetic(-0.5), Quantity::osc_d, 4), FitError);
}
