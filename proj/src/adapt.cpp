#include "afem/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "afem/errors.hpp"

namespace afem {

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::doerfler: return "doerfler";
    case Strategy::modified: return "modified";
    case Strategy::uniform: return "uniform";
  }
  return "?";
}

Strategy parse_strategy(const std::string& s) {
  if (s == "doerfler") return Strategy::doerfler;
  if (s == "modified") return Strategy::modified;
  if (s == "uniform") return Strategy::uniform;
  throw ConfigError("unknown strategy '" + s + "' (expected doerfler, modified or uniform)");
}

const char* to_string(Branch b) {
  switch (b) {
    case Branch::none: return "none";
    case Branch::jump: return "jump";
    case Branch::oscillation: return "osc";
  }
  return "?";
}

namespace {

void check_unit_interval(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) throw ConfigError(std::string(name) + " must lie in (0, 1)");
}

}  // namespace

void MarkingConfig::validate() const {
  switch (strategy) {
    case Strategy::doerfler:
      check_unit_interval(theta, "theta");
      break;
    case Strategy::modified:
      check_unit_interval(theta1, "theta1");
      check_unit_interval(theta2, "theta2");
      if (!(vartheta > 0.0) || !std::isfinite(vartheta)) throw ConfigError("vartheta must be positive");
      break;
    case Strategy::uniform:
      break;
  }
}

std::vector<int> mark_doerfler(std::span<const double> indicators, double theta) {
  check_unit_interval(theta, "theta");
  std::vector<int> order(indicators.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return indicators[static_cast<std::size_t>(a)] > indicators[static_cast<std::size_t>(b)];
  });
  double total = 0.0;
  for (int i : order) total += indicators[static_cast<std::size_t>(i)];
  std::vector<int> marked;
  if (!(total > 0.0)) return marked;
  const double target = theta * total;
  double acc = 0.0;
  for (int i : order) {
    marked.push_back(i);
    acc += indicators[static_cast<std::size_t>(i)];
    if (acc >= target) break;
  }
  return marked;
}

ModifiedMarking mark_modified(std::span<const double> eta, std::span<const double> osc, double theta1,
                              double theta2, double vartheta) {
  MarkingConfig cfg;
  cfg.strategy = Strategy::modified;
  cfg.theta1 = theta1;
  cfg.theta2 = theta2;
  cfg.vartheta = vartheta;
  cfg.validate();
  if (eta.size() != osc.size()) throw ContractError("indicator families differ in length");
  double eta_sum = 0.0;
  double osc_sum = 0.0;
  for (double x : eta) eta_sum += x;
  for (double x : osc) osc_sum += x;
  ModifiedMarking m;
  if (osc_sum <= vartheta * eta_sum) {
    m.branch = Branch::jump;
    m.marked = mark_doerfler(eta, theta1);
  } else {
    m.branch = Branch::oscillation;
    m.marked = mark_doerfler(osc, theta2);
  }
  return m;
}

double equivalent_theta(double theta1, double theta2, double vartheta) {
  return std::min(theta1 / (1.0 + vartheta), theta2 / (1.0 + 1.0 / vartheta));
}

namespace {

std::uint64_t pair_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

LoopResult adaptive_loop(const ProblemSpec& prob, const LoopConfig& config) {
  config.marking.validate();
  if (config.stop.max_levels == 0 || config.stop.max_elements == 0) {
    throw ConfigError("stop criteria must be positive");
  }
  LoopResult result;
  Mesh mesh = prob.initial_mesh;
  std::vector<double> guess;
  std::vector<RefinementStep> history;
  double varrho0 = -1.0;
  std::vector<std::array<int, 2>> prev_marked_vertices;
  const double theta_check = config.marking.strategy == Strategy::modified
                                 ? equivalent_theta(config.marking.theta1, config.marking.theta2, config.marking.vartheta)
                                 : config.marking.theta;

  try {
    for (int level = 0;; ++level) {
      const VolumeSamples load = sample_volume(mesh, prob.f, config.quad);
      const SparseSystem sys = assemble(mesh, prob, load, config.quad);
      const DirichletTrace trace = discretize_trace(mesh, prob, config.dirichlet, config.quad);
      DiscreteSolution sol = solve(sys, trace, config.cg, config.warm_start ? std::span<const double>(guess) : std::span<const double>());
      const EstimatorReport rep = estimate(mesh, prob, sol, load, config.quad);

      LoopRecord rec;
      rec.level = level;
      rec.n_elements = mesh.n_triangles();
      rec.n_vertices = mesh.n_vertices();
      rec.n_edges = mesh.n_edges();
      const auto& t = rep.totals;
      rec.varrho = t.varrho;
      rec.eta_omega = t.eta_omega;
      rec.eta_n = t.eta_n;
      rec.osc = t.osc;
      rec.osc_d = t.osc_d;
      rec.osc_n = t.osc_n;
      rec.osc_t = t.osc_t;
      rec.osc_k = t.osc_k;
      rec.rho = t.rho;
      rec.varrho_ext = t.varrho_ext;
      rec.energy_error = energy_error(mesh, sol, prob, config.quad);
      if (rec.energy_error) {
        rec.delta = *rec.energy_error * *rec.energy_error + config.lambda * t.osc_d + config.gamma * t.varrho_ext;
      }
      rec.sigma = mesh.sigma();
      rec.cg_iterations = sol.stats.iterations;
      rec.cg_residual = sol.stats.residual;
      rec.cg_min_curvature = sol.stats.min_curvature;
      if (!result.records.empty()) {
        const LoopRecord& prev = result.records.back();
        const double slack = 1e-12 * std::max(prev.osc_d, 1e-300);
        rec.osc_d_reduction_ok = rec.osc_d <= prev.osc_d - 0.5 * prev.marked_osc_d + slack;
        std::unordered_set<std::uint64_t> keys;
        keys.reserve(mesh.n_edges() * 2);
        for (const auto& e : mesh.edges()) keys.insert(pair_key(e.v[0], e.v[1]));
        for (const auto& ab : prev_marked_vertices) {
          if (keys.count(pair_key(ab[0], ab[1]))) rec.marked_bisected = false;
        }
        rec.closure_ratio = closure_ratio(history);
      }
      history.push_back({0, mesh.n_triangles()});
      if (varrho0 < 0.0) varrho0 = std::sqrt(t.varrho);

      // stop tests come after recording so the last level is always reported
      std::vector<double> au(sol.u.size());
      sys.a.multiply(sol.u, au);
      const double energy = std::sqrt(std::max(0.0, std::inner_product(sol.u.begin(), sol.u.end(), au.begin(), 0.0)));
      const double floor = config.stop.estimator_floor * std::max({1.0, energy, varrho0});
      const bool stop = result.records.size() + 1 >= config.stop.max_levels ||
                        mesh.n_triangles() >= config.stop.max_elements || std::sqrt(t.varrho) <= floor;

      std::vector<int> marked;
      if (!stop) {
        switch (config.marking.strategy) {
          case Strategy::doerfler:
            marked = mark_doerfler(rep.varrho, config.marking.theta);
            break;
          case Strategy::modified: {
            std::vector<double> osc(rep.osc.size());
            for (std::size_t e = 0; e < osc.size(); ++e) osc[e] = rep.osc[e] + rep.osc_d[e];
            auto m = mark_modified(rep.eta, osc, config.marking.theta1, config.marking.theta2, config.marking.vartheta);
            marked = std::move(m.marked);
            rec.branch = m.branch;
            break;
          }
          case Strategy::uniform:
            marked.resize(mesh.n_edges());
            std::iota(marked.begin(), marked.end(), 0);
            break;
        }
        std::sort(marked.begin(), marked.end());
        rec.n_marked = marked.size();
        for (int e : marked) {
          rec.marked_varrho += rep.varrho[static_cast<std::size_t>(e)];
          rec.marked_osc_d += rep.osc_d[static_cast<std::size_t>(e)];
        }
        if (config.marking.strategy != Strategy::uniform) {
          rec.doerfler_ok = rec.marked_varrho >= theta_check * t.varrho * (1.0 - 1e-12);
        }
        history.back().marked = marked.size();
      }
      result.records.push_back(rec);
      result.final_mesh = mesh;
      result.final_solution = sol;
      if (config.observer) config.observer(LevelView{level, mesh, load, sol, rep, marked});

      if (stop || marked.empty()) break;
      prev_marked_vertices.clear();
      for (int e : marked) prev_marked_vertices.push_back(mesh.edge(e).v);
      Mesh next = refine(mesh, marked, config.refine);
      guess = prolongate(mesh, next, sol.u);
      mesh = std::move(next);
    }
  } catch (...) {
    result.error = std::current_exception();
  }
  return result;
}

std::optional<ContractionReport> contraction_diagnostic(std::span<const LoopRecord> records, double lambda,
                                                        double gamma) {
  if (records.empty()) return std::nullopt;
  for (const auto& r : records) {
    if (!r.energy_error) return std::nullopt;
  }
  std::vector<double> delta;
  for (const auto& r : records) {
    delta.push_back(*r.energy_error * *r.energy_error + lambda * r.osc_d + gamma * r.varrho_ext);
  }
  ContractionReport rep;
  std::size_t below = 0;
  for (std::size_t l = 0; l + 1 < delta.size(); ++l) {
    if (delta[l] > 0.0) {
      rep.kappa.push_back(delta[l + 1] / delta[l]);
      if (l >= 2) {
        ++rep.considered;
        if (delta[l + 1] < delta[l]) ++below;
      }
    } else {
      rep.kappa.push_back(std::nullopt);
    }
  }
  rep.fraction_below_one = rep.considered ? static_cast<double>(below) / static_cast<double>(rep.considered) : 0.0;
  return rep;
}

const char* to_string(Quantity q) {
  switch (q) {
    case Quantity::varrho: return "varrho";
    case Quantity::eta: return "eta";
    case Quantity::eta_omega: return "eta_omega";
    case Quantity::eta_n: return "eta_n";
    case Quantity::osc: return "osc";
    case Quantity::osc_d: return "osc_d";
    case Quantity::osc_n: return "osc_n";
    case Quantity::rho: return "rho";
    case Quantity::varrho_ext: return "varrho_ext";
    case Quantity::error: return "error";
  }
  return "?";
}

std::optional<double> quantity_value(const LoopRecord& r, Quantity q) {
  switch (q) {
    case Quantity::varrho: return std::sqrt(r.varrho);
    case Quantity::eta: return std::sqrt(r.eta_omega + r.eta_n);
    case Quantity::eta_omega: return std::sqrt(r.eta_omega);
    case Quantity::eta_n: return std::sqrt(r.eta_n);
    case Quantity::osc: return std::sqrt(r.osc);
    case Quantity::osc_d: return std::sqrt(r.osc_d);
    case Quantity::osc_n: return std::sqrt(r.osc_n);
    case Quantity::rho: return std::sqrt(r.rho);
    case Quantity::varrho_ext: return std::sqrt(r.varrho_ext);
    case Quantity::error: return r.energy_error;
  }
  return std::nullopt;
}

std::pair<double, double> least_squares_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw FitError("need at least two points for a line fit");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("degenerate abscissae in line fit");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

double rate_fit(std::span<const LoopRecord> records, Quantity q, std::size_t window) {
  if (window < 3) throw FitError("rate window must contain at least three levels");
  if (records.size() < window) {
    throw FitError("only " + std::to_string(records.size()) + " levels for a window of " + std::to_string(window));
  }
  std::vector<double> x, y;
  for (const auto& r : records.subspan(records.size() - window)) {
    const auto v = quantity_value(r, q);
    if (!v) throw FitError(std::string("quantity ") + to_string(q) + " is not available");
    if (!(*v > 0.0) || r.n_elements == 0) {
      throw FitError(std::string("quantity ") + to_string(q) + " is not positive on every level of the window");
    }
    x.push_back(std::log(static_cast<double>(r.n_elements)));
    y.push_back(std::log(*v));
  }
  return least_squares_line(x, y).first;
}

}  // namespace afem
