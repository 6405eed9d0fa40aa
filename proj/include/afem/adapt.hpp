#pragma once

// Marking strategies and the solve-estimate-mark-refine loop.

#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "afem/dirichlet.hpp"
#include "afem/estimator.hpp"
#include "afem/fem.hpp"
#include "afem/mesh.hpp"
#include "afem/problem.hpp"
#include "afem/sparse.hpp"

namespace afem {

enum class Strategy { doerfler, modified, uniform };

const char* to_string(Strategy s);
Strategy parse_strategy(const std::string& s);

struct MarkingConfig {
  Strategy strategy = Strategy::doerfler;
  double theta = 0.5;
  double theta1 = 0.5;
  double theta2 = 0.5;
  double vartheta = 0.5;

  /// Throws ConfigError on out-of-range parameters of the selected strategy.
  void validate() const;
};

/// Minimal set M with theta * sum <= sum_M: the largest indicators first, ties by
/// ascending id. Empty when no indicator is positive.
std::vector<int> mark_doerfler(std::span<const double> indicators, double theta);

enum class Branch { none, jump, oscillation };

const char* to_string(Branch b);

struct ModifiedMarking {
  std::vector<int> marked;
  Branch branch = Branch::none;
};

/// Jump branch when osc^2 + osc_D^2 <= vartheta * eta^2 (Dörfler on eta with
/// theta1), oscillation branch otherwise (Dörfler on osc + osc_D with theta2).
ModifiedMarking mark_modified(std::span<const double> eta, std::span<const double> osc, double theta1,
                              double theta2, double vartheta);

/// Plain Dörfler parameter satisfied by every modified marking:
/// min(theta1 / (1 + vartheta), theta2 / (1 + 1 / vartheta)).
double equivalent_theta(double theta1, double theta2, double vartheta);

struct StopCriteria {
  std::size_t max_elements = 50000;
  std::size_t max_levels = 25;
  /// Stop once ϱ <= floor * max(1, ||∇U||, ϱ_0).
  double estimator_floor = 1e-12;
};

struct LevelView {
  int level = 0;
  const Mesh& mesh;
  const VolumeSamples& load;
  const DiscreteSolution& solution;
  const EstimatorReport& report;
  std::span<const int> marked;  // empty on the last level
};

struct LoopConfig {
  MarkingConfig marking;
  DirichletMethod dirichlet = DirichletMethod::nodal;
  StopCriteria stop;
  QuadratureOptions quad;
  CgOptions cg;
  RefineOptions refine;
  double lambda = 1.0;
  double gamma = 1.0;
  /// Start CG from the prolongated previous solution.
  bool warm_start = true;
  /// Called once per level after marking.
  std::function<void(const LevelView&)> observer;
};

struct LoopRecord {
  int level = 0;
  std::size_t n_elements = 0;
  std::size_t n_vertices = 0;
  std::size_t n_edges = 0;
  std::size_t n_marked = 0;
  Branch branch = Branch::none;
  // squared totals
  double varrho = 0.0;
  double eta_omega = 0.0;
  double eta_n = 0.0;
  double osc = 0.0;
  double osc_d = 0.0;
  double osc_n = 0.0;
  double osc_t = 0.0;
  double osc_k = 0.0;
  double rho = 0.0;
  double varrho_ext = 0.0;
  /// ||∇(u - U)||, not squared
  std::optional<double> energy_error;
  /// err^2 + lambda osc_D^2 + gamma ϱ̃^2
  std::optional<double> delta;
  /// sum of ϱ(E)^2 and osc_D(E)^2 over the marked edges
  double marked_varrho = 0.0;
  double marked_osc_d = 0.0;
  /// Dörfler property of the marked set with the parameter implied by the strategy
  bool doerfler_ok = true;
  /// osc_D^2 <= previous osc_D^2 - 1/2 previous osc_D(M)^2 (true on level 0)
  bool osc_d_reduction_ok = true;
  /// every edge marked on the previous level was bisected (true on level 0)
  bool marked_bisected = true;
  std::optional<double> closure_ratio;
  double sigma = 0.0;
  std::size_t cg_iterations = 0;
  double cg_residual = 0.0;
  double cg_min_curvature = 0.0;
};

struct LoopResult {
  std::vector<LoopRecord> records;
  Mesh final_mesh;
  DiscreteSolution final_solution;
  /// Set when a level failed; the records up to that point are kept.
  std::exception_ptr error;
};

LoopResult adaptive_loop(const ProblemSpec& prob, const LoopConfig& config);

struct ContractionReport {
  /// κ_l = Δ_{l+1} / Δ_l, absent where Δ_l = 0
  std::vector<std::optional<double>> kappa;
  /// share of defined κ_l with l >= 2 that are below one
  double fraction_below_one = 0.0;
  std::size_t considered = 0;
};

/// Absent when the records carry no energy error.
std::optional<ContractionReport> contraction_diagnostic(std::span<const LoopRecord> records, double lambda,
                                                        double gamma);

enum class Quantity { varrho, eta, eta_omega, eta_n, osc, osc_d, osc_n, rho, varrho_ext, error };

const char* to_string(Quantity q);

/// Unsquared value of the quantity, absent when it was not recorded.
std::optional<double> quantity_value(const LoopRecord& r, Quantity q);

/// Least-squares slope of log(quantity) against log(#T) over the last `window`
/// records. Throws FitError with fewer than three usable points.
double rate_fit(std::span<const LoopRecord> records, Quantity q, std::size_t window);

/// Slope and intercept of the least-squares line through (x, y).
std::pair<double, double> least_squares_line(std::span<const double> x, std::span<const double> y);

}  // namespace afem
