// afem2d: adaptive P1 finite elements for the Poisson problem with mixed
// boundary data. See README.md for usage.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "afem/errors.hpp"
#include "afem/parallel.hpp"
#include "afem/run.hpp"

namespace {

void add_run_options(CLI::App& app, afem::RunConfig& cfg) {
  app.add_option("--problem", cfg.problem, "zshape, lshape, affine or custom:<mesh file>")->capture_default_str();
  app.add_option("--data", cfg.data, "data set for custom meshes: zshape, lshape, affine, zero");
  app.add_option("--strategy", cfg.strategy, "doerfler, modified or uniform")->capture_default_str();
  app.add_option("--theta", cfg.theta, "Doerfler parameter")->capture_default_str();
  app.add_option("--theta1", cfg.theta1, "modified marking, jump branch")->capture_default_str();
  app.add_option("--theta2", cfg.theta2, "modified marking, oscillation branch")->capture_default_str();
  app.add_option("--vartheta", cfg.vartheta, "modified marking branch switch")->capture_default_str();
  app.add_option("--dirichlet", cfg.dirichlet, "nodal, l2 or sz")->capture_default_str();
  app.add_option("--max-elements", cfg.max_elements, "stop once the mesh has this many triangles")->capture_default_str();
  app.add_option("--max-levels", cfg.max_levels, "maximal number of levels")->capture_default_str();
  app.add_option("--quad-degree", cfg.quad_degree, "triangle quadrature degree")->capture_default_str();
  app.add_option("--subdivision", cfg.subdivision, "element rule subdivision levels (-1: automatic)")->capture_default_str();
  app.add_option("--cg-tol", cfg.cg_tol, "relative CG residual")->capture_default_str();
  app.add_option("--rate-window", cfg.rate_window, "levels used for the rate fits")->capture_default_str();
  app.add_option("--seed", cfg.seed, "recorded in the output headers")->capture_default_str();
  app.add_flag("--single-thread", cfg.single_thread, "deterministic single-threaded mode");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"afem2d - adaptive finite elements for -Δu = f with mixed boundary data"};
  app.require_subcommand(1);

  afem::RunConfig cfg;
  auto* run_cmd = app.add_subcommand("run", "run one adaptive or uniform loop");
  add_run_options(*run_cmd, cfg);
  run_cmd->add_option("--output", cfg.output, "output path prefix")->capture_default_str();
  run_cmd->add_flag("--entities", cfg.entities, "write per-entity indicators of every level");

  afem::RunConfig defaults;
  std::string list_file;
  std::string compare_output = "compare";
  auto* cmp_cmd = app.add_subcommand("compare", "run several configurations and merge their level tables");
  cmp_cmd->add_option("configs", list_file, "JSON file with a list of run configurations")->required();
  cmp_cmd->add_option("--output", compare_output, "output path prefix")->capture_default_str();
  add_run_options(*cmp_cmd, defaults);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) {
      if (cfg.single_thread) afem::set_max_threads(1);
      const auto out = afem::run(cfg);
      for (const auto& f : out.files) std::cout << "wrote " << f << '\n';
      if (out.exit_code != 0) {
        std::cerr << "afem2d: run aborted after " << out.result.records.size() << " levels: " << out.message << '\n';
        return out.exit_code;
      }
      if (!out.result.records.empty()) {
        const auto& last = out.result.records.back();
        std::cout << "levels " << out.result.records.size() << ", elements " << last.n_elements
                  << ", estimator^2 " << last.varrho << '\n';
      }
      return 0;
    }
    if (*cmp_cmd) {
      if (defaults.single_thread) afem::set_max_threads(1);
      std::ifstream in(list_file);
      if (!in) throw afem::InputError("cannot read " + list_file);
      std::stringstream ss;
      ss << in.rdbuf();
      auto configs = afem::parse_run_configs(ss.str(), defaults);
      const auto out = afem::compare(std::move(configs), compare_output);
      for (std::size_t i = 0; i < out.runs.size(); ++i) {
        if (out.runs[i].exit_code != 0) {
          std::cerr << "afem2d: run " << out.names[i] << " aborted: " << out.runs[i].message << '\n';
        }
      }
      std::cout << "wrote " << out.merged_file << '\n';
      return out.exit_code;
    }
  } catch (const std::invalid_argument& e) {  // ConfigError, InputError
    std::cerr << "afem2d: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "afem2d: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
