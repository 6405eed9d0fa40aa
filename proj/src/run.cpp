#include "afem/run.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

#include <json.hpp>

#include "afem/errors.hpp"
#include "afem/mesh_io.hpp"
#include "afem/parallel.hpp"

namespace afem {

void RunConfig::validate() const {
  if (problem != "zshape" && problem != "lshape" && problem != "affine" && problem.rfind("custom:", 0) != 0) {
    throw ConfigError("unknown problem '" + problem + "' (expected zshape, lshape, affine or custom:<mesh file>)");
  }
  if (problem.rfind("custom:", 0) == 0) {
    if (problem.size() == 7) throw ConfigError("custom problem needs a mesh file: custom:<path>");
    if (data.empty()) throw ConfigError("custom problems need a data set (zshape, lshape, affine or zero)");
  }
  if (!data.empty() && data != "zshape" && data != "lshape" && data != "affine" && data != "zero") {
    throw ConfigError("unknown data set '" + data + "'");
  }
  MarkingConfig m;
  m.strategy = parse_strategy(strategy);
  m.theta = theta;
  m.theta1 = theta1;
  m.theta2 = theta2;
  m.vartheta = vartheta;
  m.validate();
  parse_dirichlet_method(dirichlet);
  if (max_elements == 0) throw ConfigError("max_elements must be positive");
  if (max_levels == 0) throw ConfigError("max_levels must be positive");
  if (quad_degree < 1 || quad_degree > 40) throw ConfigError("quad_degree must lie in [1, 40]");
  if (subdivision > 5) throw ConfigError("subdivision must be at most 5");
  if (!(cg_tol > 0.0 && cg_tol < 1.0)) throw ConfigError("cg_tol must lie in (0, 1)");
  if (output.empty()) throw ConfigError("output prefix must not be empty");
  if (rate_window < 3) throw ConfigError("rate window must be at least 3");
  if (!(lambda > 0.0) || !(gamma > 0.0)) throw ConfigError("lambda and gamma must be positive");
  if (!(sigma_cap > 0.0)) throw ConfigError("sigma cap must be positive");
}

ProblemSpec make_problem(const RunConfig& cfg) {
  if (cfg.problem == "zshape") return zshape_problem();
  if (cfg.problem == "lshape") return lshape_problem();
  if (cfg.problem == "affine") return affine_problem(1.0, 2.0, 3.0);
  const std::string path = cfg.problem.substr(7);
  return problem_with_mesh(cfg.data, read_mesh_file(path));
}

LoopConfig make_loop_config(const RunConfig& cfg, const ProblemSpec& prob) {
  LoopConfig lc;
  lc.marking.strategy = parse_strategy(cfg.strategy);
  lc.marking.theta = cfg.theta;
  lc.marking.theta1 = cfg.theta1;
  lc.marking.theta2 = cfg.theta2;
  lc.marking.vartheta = cfg.vartheta;
  lc.dirichlet = parse_dirichlet_method(cfg.dirichlet);
  lc.stop.max_elements = cfg.max_elements;
  lc.stop.max_levels = cfg.max_levels;
  lc.quad.triangle_degree = cfg.quad_degree;
  lc.quad.subdivision_levels = cfg.subdivision >= 0 ? cfg.subdivision : (prob.singular_load ? 2 : 0);
  lc.cg.rel_tol = cfg.cg_tol;
  lc.refine.sigma_cap = cfg.sigma_cap;
  lc.lambda = cfg.lambda;
  lc.gamma = cfg.gamma;
  return lc;
}

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path);
  return f;
}

std::string describe(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& ex) {
    return ex.what();
  } catch (...) {
    return "unknown error";
  }
}

}  // namespace

RunOutcome run(const RunConfig& cfg) {
  cfg.validate();
  ProblemSpec prob = make_problem(cfg);
  LoopConfig lc = make_loop_config(cfg, prob);
  if (cfg.single_thread) set_max_threads(1);

  std::ofstream entities;
  bool first = true;
  if (cfg.entities) {
    entities = open_output(cfg.output + "_entities.csv");
    entities << "# schema=1 per-entity squared indicators: T rho, E_* varrho, K osc_K\n";
    lc.observer = [&](const LevelView& v) {
      write_entity_csv(entities, v.mesh, v.report, v.level, first);
      first = false;
    };
  }

  RunOutcome out;
  out.result = adaptive_loop(prob, lc);
  const auto& recs = out.result.records;
  out.rates = fit_rates(recs, cfg.rate_window);
  {
    auto f = open_output(cfg.output + "_levels.csv");
    write_levels_csv(f, cfg, recs);
    out.files.push_back(cfg.output + "_levels.csv");
  }
  {
    auto f = open_output(cfg.output + "_rates.csv");
    write_rates_csv(f, cfg, out.rates);
    out.files.push_back(cfg.output + "_rates.csv");
  }
  if (!recs.empty() && out.result.final_mesh.n_triangles() > 0) {
    const std::string path = cfg.output + "_mesh_" + std::to_string(recs.back().level) + ".txt";
    write_mesh_file(path, out.result.final_mesh);
    out.files.push_back(path);
  }
  if (cfg.entities) out.files.push_back(cfg.output + "_entities.csv");
  if (out.result.error) {
    out.exit_code = 1;
    out.message = describe(out.result.error);
  }
  return out;
}

namespace {

template <class T>
void read_key(const nlohmann::json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

}  // namespace

std::vector<RunConfig> parse_run_configs(const std::string& json_text, const RunConfig& defaults) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed run list: ") + e.what());
  }
  const nlohmann::json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("runs")) throw ConfigError("run list object needs a \"runs\" array");
    list = &doc.at("runs");
  }
  if (!list->is_array()) throw ConfigError("run list must be an array");
  std::vector<RunConfig> out;
  for (const auto& j : *list) {
    if (!j.is_object()) throw ConfigError("each run must be an object");
    RunConfig c = defaults;
    c.name = "run" + std::to_string(out.size() + 1);
    try {
      read_key(j, "name", c.name);
      read_key(j, "problem", c.problem);
      read_key(j, "data", c.data);
      read_key(j, "strategy", c.strategy);
      read_key(j, "theta", c.theta);
      read_key(j, "theta1", c.theta1);
      read_key(j, "theta2", c.theta2);
      read_key(j, "vartheta", c.vartheta);
      read_key(j, "dirichlet", c.dirichlet);
      read_key(j, "max_elements", c.max_elements);
      read_key(j, "max_levels", c.max_levels);
      read_key(j, "quad_degree", c.quad_degree);
      read_key(j, "subdivision", c.subdivision);
      read_key(j, "cg_tol", c.cg_tol);
      read_key(j, "seed", c.seed);
      read_key(j, "rate_window", c.rate_window);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("bad value in run list: ") + e.what());
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<std::string> deduplicate_names(std::span<const std::string> names) {
  std::vector<std::string> out;
  std::map<std::string, int> seen;
  for (const auto& n : names) {
    std::string candidate = n;
    int k = ++seen[n];
    if (k > 1) {
      do {
        candidate = n + "_" + std::to_string(k++);
      } while (seen.count(candidate));
      seen[n] = k - 1;
    }
    seen.emplace(candidate, 1);
    out.push_back(candidate);
  }
  return out;
}

CompareOutcome compare(std::vector<RunConfig> configs, const std::string& output) {
  if (configs.empty()) throw ConfigError("compare needs at least one configuration");
  for (const auto& c : configs) {
    if (c.problem != configs.front().problem || c.data != configs.front().data) {
      throw ConfigError("compared runs must share one problem ('" + configs.front().problem + "' vs '" + c.problem + "')");
    }
    c.validate();
  }
  CompareOutcome out;
  std::vector<std::string> names;
  for (const auto& c : configs) names.push_back(c.name);
  out.names = deduplicate_names(names);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    configs[i].name = out.names[i];
    configs[i].output = output + "_" + out.names[i];
  }

  // Runs share nothing but read-only data, so they may execute side by side.
  const std::size_t workers = std::max<std::size_t>(1, std::min(max_threads(), configs.size()));
  out.runs.resize(configs.size());
  for (std::size_t begin = 0; begin < configs.size(); begin += workers) {
    const std::size_t end = std::min(configs.size(), begin + workers);
    std::vector<std::future<RunOutcome>> jobs;
    for (std::size_t i = begin + 1; i < end; ++i) {
      jobs.push_back(std::async(std::launch::async, [&configs, i] { return run(configs[i]); }));
    }
    out.runs[begin] = run(configs[begin]);
    for (std::size_t i = begin + 1; i < end; ++i) out.runs[i] = jobs[i - begin - 1].get();
  }

  out.merged_file = output + "_compare.csv";
  auto f = open_output(out.merged_file);
  f.precision(17);
  f << "# schema=1 problem=" << configs.front().problem << "; values are squared totals except error_sq\n";
  f << "run,level,n_elements,quantity,value\n";
  for (std::size_t i = 0; i < out.runs.size(); ++i) {
    for (const auto& r : out.runs[i].result.records) {
      const std::pair<const char*, std::optional<double>> cols[] = {
          {"varrho_sq", r.varrho},   {"eta_omega_sq", r.eta_omega}, {"eta_n_sq", r.eta_n},
          {"osc_sq", r.osc},         {"osc_d_sq", r.osc_d},         {"varrho_ext_sq", r.varrho_ext},
          {"error_sq", r.energy_error ? std::optional<double>(*r.energy_error * *r.energy_error) : std::nullopt}};
      for (const auto& [q, v] : cols) {
        if (!v) continue;
        f << out.names[i] << ',' << r.level << ',' << r.n_elements << ',' << q << ',' << *v << '\n';
      }
    }
    if (out.runs[i].exit_code != 0) out.exit_code = 1;
  }
  return out;
}

}  // namespace afem
