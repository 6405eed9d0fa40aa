#pragma once

// Batch runs: configuration, CSV output and multi-run comparison.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "afem/adapt.hpp"

namespace afem {

struct RunConfig {
  std::string name = "run";
  /// zshape, lshape, affine or custom:<mesh file>
  std::string problem = "zshape";
  /// Data set for custom meshes: zshape, lshape, affine or zero.
  std::string data;
  std::string strategy = "doerfler";
  double theta = 0.5;
  double theta1 = 0.5;
  double theta2 = 0.5;
  double vartheta = 0.5;
  std::string dirichlet = "nodal";
  std::size_t max_elements = 50000;
  std::size_t max_levels = 25;
  int quad_degree = 5;
  /// Element-rule subdivision levels; negative selects 2 for singular loads and 0 otherwise.
  int subdivision = -1;
  double cg_tol = 1e-12;
  std::string output = "afem2d";
  std::uint64_t seed = 0;
  bool single_thread = false;
  /// Also write per-entity estimator values of every level.
  bool entities = false;
  std::size_t rate_window = 6;
  double lambda = 1.0;
  double gamma = 1.0;
  double sigma_cap = 100.0;

  /// Throws ConfigError.
  void validate() const;
};

ProblemSpec make_problem(const RunConfig& cfg);
LoopConfig make_loop_config(const RunConfig& cfg, const ProblemSpec& prob);

struct RateRow {
  Quantity quantity;
  std::optional<double> slope;
  std::size_t window = 0;
  std::string status;  // "ok" or the reason no slope was fitted
};

std::vector<RateRow> fit_rates(std::span<const LoopRecord> records, std::size_t window);

void write_levels_csv(std::ostream& os, const RunConfig& cfg, std::span<const LoopRecord> records);
void write_rates_csv(std::ostream& os, const RunConfig& cfg, std::span<const RateRow> rates);

struct RunOutcome {
  LoopResult result;
  std::vector<RateRow> rates;
  std::vector<std::string> files;
  /// 0 on success, 1 when the loop failed (outputs hold the partial records).
  int exit_code = 0;
  std::string message;
};

/// Runs the loop and writes <output>_levels.csv, <output>_rates.csv and
/// <output>_mesh_<L>.txt for the last level L. Throws ConfigError before
/// doing any work when the configuration is invalid.
RunOutcome run(const RunConfig& cfg);

/// Parses a list of configurations: either a JSON array or an object with a
/// "runs" array. Keys follow the command line flags with underscores.
std::vector<RunConfig> parse_run_configs(const std::string& json_text, const RunConfig& defaults);

struct CompareOutcome {
  std::vector<RunOutcome> runs;
  std::vector<std::string> names;  // after deduplication
  std::string merged_file;
  int exit_code = 0;
};

/// Executes every configuration (concurrently when threads are available),
/// each with output prefix <output>_<name>, and writes <output>_compare.csv in
/// long format: run,level,n_elements,quantity,value. Duplicate names get
/// numeric suffixes; configurations must share one problem.
CompareOutcome compare(std::vector<RunConfig> configs, const std::string& output);

/// Appends _2, _3, ... to repeated names.
std::vector<std::string> deduplicate_names(std::span<const std::string> names);

}  // namespace afem
