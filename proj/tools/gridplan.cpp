// Command-line front end: runs studies, clusters scenario sets, exports MPS
// files, solves exported files (usable as a reference backend) and compares
// finished runs.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "gridplan/bnb.hpp"
#include "gridplan/study.hpp"

using namespace gridplan;
namespace fs = std::filesystem;

namespace {

std::string env_backend() {
  const char* b = std::getenv("GRIDPLAN_BACKEND");
  return b ? b : "";
}

void write_error_record(const fs::path& outdir, const std::string& kind,
                        const std::string& message) {
  if (outdir.empty()) return;
  std::error_code ec;
  fs::create_directories(outdir, ec);
  std::ofstream out(outdir / "error.json");
  if (!out) return;
  json j;
  j["error"] = kind;
  j["message"] = message;
  out << j.dump(1) << '\n';
}

struct RunFlags {
  std::string config;
  std::string system;
  std::string mode = "SO";
  std::string source = "cluster";
  std::string scenario_file;
  int k = 5;
  bool x5 = false;
  std::uint64_t seed = 0;
  double scc = -1;
  double mip_gap = -1;
  long node_limit = 500000;
  double time_limit = -1;
  std::string out = "study-out";
};

StudyConfig resolve_run_config(const RunFlags& f, const CLI::App* cmd) {
  StudyConfig cfg;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw ParseError("cannot open config file " + f.config);
    cfg = study_config_from_json(json::parse(in), fs::path(f.config).parent_path());
  }
  auto passed = [&](const std::string& name) { return cmd->count(name) > 0; };
  if (passed("--system") || f.config.empty()) cfg.system = f.system;
  if (passed("--mode") || f.config.empty()) cfg.mode = plan_mode_from_string(f.mode);
  if (passed("--scenario-source") || f.config.empty()) {
    if (f.source == "cluster") cfg.source = ScenarioSource::Cluster;
    else if (f.source == "file") cfg.source = ScenarioSource::File;
    else throw ParseError("unknown scenario source '" + f.source + "'");
  }
  if (passed("--scenario-file")) cfg.scenario_file = f.scenario_file;
  if (passed("--k")) cfg.k = f.k;
  if (passed("--x5")) cfg.extremes = f.x5;
  if (passed("--seed")) cfg.seed = f.seed;
  if (passed("--scc")) cfg.scc = f.scc;
  if (passed("--mip-gap")) cfg.mip_gap = f.mip_gap;
  if (passed("--node-limit")) cfg.node_limit = f.node_limit;
  if (passed("--time-limit")) cfg.time_limit_sec = f.time_limit;
  if (passed("--out") || cfg.outdir.empty()) cfg.outdir = f.out;
  cfg.backend = env_backend();
  if (cfg.system.empty()) throw ParseError("no system file given (--system)");
  if (cfg.source == ScenarioSource::File && cfg.scenario_file.empty())
    throw ParseError("scenario source 'file' needs --scenario-file");
  return cfg;
}

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config, "Study config JSON (flags override it)");
  cmd->add_option("--system", f.system, "System file");
  cmd->add_option("--mode", f.mode, "SO, MO or MO-OPOI");
  cmd->add_option("--scenario-source", f.source, "cluster or file");
  cmd->add_option("--scenario-file", f.scenario_file, "Scenario set JSON");
  cmd->add_option("--k", f.k, "Cluster count per epoch");
  cmd->add_flag("--x5", f.x5, "Add one extreme day per cluster");
  cmd->add_option("--seed", f.seed, "Clustering seed");
  cmd->add_option("--scc", f.scc, "Carbon price override, $/t CO2");
  cmd->add_option("--mip-gap", f.mip_gap, "Relative MIP gap target");
  cmd->add_option("--node-limit", f.node_limit, "Branch-and-bound node limit");
  cmd->add_option("--time-limit", f.time_limit, "Wall-clock limit, seconds");
  cmd->add_option("--out", f.out, "Output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-stage generation, storage and transmission expansion planning"};
  app.require_subcommand(1);

  RunFlags rf;
  auto* run = app.add_subcommand("run", "Run a study end to end");
  add_run_flags(run, rf);

  std::string cl_system, cl_out = "scenarios.json";
  int cl_k = 5;
  bool cl_x5 = false;
  std::uint64_t cl_seed = 0;
  auto* cluster = app.add_subcommand("cluster", "Build representative days");
  cluster->add_option("--system", cl_system, "System file")->required();
  cluster->add_option("--k", cl_k, "Cluster count per epoch");
  cluster->add_flag("--x5", cl_x5, "Add one extreme day per cluster");
  cluster->add_option("--seed", cl_seed, "Clustering seed");
  cluster->add_option("--out", cl_out, "Scenario set output file");

  RunFlags xf;
  std::string xp_out = "model.mps";
  auto* exportmps = app.add_subcommand("export-mps", "Build and export the program");
  add_run_flags(exportmps, xf);
  exportmps->add_option("--mps-out", xp_out, "MPS output path");

  std::string sm_model, sm_out;
  double sm_gap = 1e-4, sm_time = -1;
  long sm_nodes = 500000;
  auto* solvemps = app.add_subcommand("solve-mps", "Solve an exported MPS file");
  solvemps->add_option("mps", sm_model, "MPS file")->required();
  solvemps->add_option("solution", sm_out, "Solution output file")->required();
  solvemps->add_option("gap", sm_gap, "Relative MIP gap target");
  solvemps->add_option("--node-limit", sm_nodes, "Node limit");
  solvemps->add_option("--time-limit", sm_time, "Wall-clock limit, seconds");

  std::vector<std::string> cp_dirs;
  std::string cp_out = "compare.csv";
  auto* compare = app.add_subcommand("compare", "Compare finished study directories");
  compare->add_option("dirs", cp_dirs, "Study directories (first is the baseline)")
      ->required();
  compare->add_option("--out", cp_out, "Comparison CSV path");

  CLI11_PARSE(app, argc, argv);

  fs::path error_dir;
  try {
    if (run->parsed()) {
      StudyConfig cfg = resolve_run_config(rf, run);
      error_dir = cfg.outdir;
      StudyResult res = run_study(cfg);
      std::cout << "status " << to_string(res.sol.status) << " objective "
                << res.sol.objective << " gap " << res.sol.gap << " nodes "
                << res.sol.nodes << "\n";
      std::cout << "artifacts in " << res.outdir.string() << "\n";
    } else if (cluster->parsed()) {
      SystemModel m = load_system(cl_system);
      auto set = build_scenarios(m, cl_k, cl_x5, cl_seed);
      save_scenarios(set, cl_out);
      std::cout << "wrote " << cl_out << "\n";
    } else if (exportmps->parsed()) {
      StudyConfig cfg = resolve_run_config(xf, exportmps);
      SystemModel m = load_system(cfg.system);
      ScenarioSet set = cfg.source == ScenarioSource::Cluster
                            ? build_scenarios(m, cfg.k, cfg.extremes, cfg.seed)
                            : load_scenarios(cfg.scenario_file);
      MilpInstance inst = build_program(m, set, {cfg.mode, cfg.scc});
      write_mps(inst, xp_out);
      std::cout << "wrote " << xp_out << " (" << inst.vars.size() << " columns, "
                << inst.rows.size() << " rows, " << inst.binary_count()
                << " binaries)\n";
    } else if (solvemps->parsed()) {
      MilpInstance inst = read_mps(sm_model);
      SolveLimits limits{sm_gap, sm_nodes,
                         sm_time > 0 ? std::optional<double>(sm_time) : std::nullopt};
      PlanSolution sol;
      try {
        sol = solve_milp(inst, limits);
      } catch (const SolverError&) {
        throw;
      }
      write_solution(inst, sol, sm_out);
      std::cout << "status " << to_string(sol.status) << " objective " << sol.objective
                << "\n";
    } else if (compare->parsed()) {
      std::vector<fs::path> dirs(cp_dirs.begin(), cp_dirs.end());
      compare_studies(dirs, cp_out);
      std::cout << "wrote " << cp_out << "\n";
    }
  } catch (const ParseError& e) {
    write_error_record(error_dir, "parse", e.what());
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ModelError& e) {
    write_error_record(error_dir, "model", e.what());
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const SolverError& e) {
    write_error_record(error_dir, "solver", e.what());
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    write_error_record(error_dir, "internal", e.what());
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
  return 0;
}
