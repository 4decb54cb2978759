#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridplan/backend.hpp"
#include "gridplan/bnb.hpp"
#include "gridplan/builder.hpp"
#include "gridplan/report.hpp"
#include "gridplan/scenario.hpp"
#include "gridplan/system_io.hpp"

namespace gridplan {

enum class ScenarioSource { Cluster, File };

struct StudyConfig {
  std::filesystem::path system;
  ScenarioSource source = ScenarioSource::Cluster;
  std::filesystem::path scenario_file;
  int k = 5;
  bool extremes = false;  // the X5 switch
  std::uint64_t seed = 0;
  PlanMode mode = PlanMode::SingleObjective;
  std::optional<double> scc;
  std::optional<double> mip_gap;  // defaults to the system config value
  long node_limit = 500000;
  std::optional<double> time_limit_sec;
  std::filesystem::path outdir;
  std::string backend;  // external solver command; empty runs the built-in
};

inline json study_config_to_json(const StudyConfig& c) {
  json j;
  j["system"] = c.system.string();
  j["mode"] = to_string(c.mode);
  json s;
  s["source"] = c.source == ScenarioSource::Cluster ? "cluster" : "file";
  if (c.source == ScenarioSource::File) s["file"] = c.scenario_file.string();
  s["k"] = c.k;
  s["extremes"] = c.extremes;
  s["seed"] = c.seed;
  j["scenarios"] = s;
  if (c.scc) j["scc"] = *c.scc;
  if (c.mip_gap) j["mip_gap"] = *c.mip_gap;
  j["node_limit"] = c.node_limit;
  if (c.time_limit_sec) j["time_limit_sec"] = *c.time_limit_sec;
  j["out"] = c.outdir.string();
  // The backend command comes from the environment, never from config files.
  return j;
}

inline StudyConfig study_config_from_json(const json& jin,
                                          const std::filesystem::path& base_dir) {
  const json& j = jin.contains("config") ? jin["config"] : jin;  // accept manifests
  StudyConfig c;
  auto path_of = [&base_dir](const std::string& s) {
    std::filesystem::path p(s);
    return p.is_absolute() ? p : base_dir / p;
  };
  c.system = path_of(j.at("system").get<std::string>());
  c.mode = plan_mode_from_string(j.value("mode", "SO"));
  if (j.contains("scenarios")) {
    const json& s = j["scenarios"];
    const std::string src = s.value("source", "cluster");
    if (src == "cluster") c.source = ScenarioSource::Cluster;
    else if (src == "file") c.source = ScenarioSource::File;
    else throw ParseError("unknown scenario source '" + src + "'");
    if (s.contains("file")) c.scenario_file = path_of(s["file"].get<std::string>());
    c.k = s.value("k", c.k);
    c.extremes = s.value("extremes", c.extremes);
    c.seed = s.value("seed", c.seed);
  }
  if (j.contains("scc") && !j["scc"].is_null()) c.scc = j["scc"].get<double>();
  if (j.contains("mip_gap") && !j["mip_gap"].is_null())
    c.mip_gap = j["mip_gap"].get<double>();
  c.node_limit = j.value("node_limit", c.node_limit);
  if (j.contains("time_limit_sec") && !j["time_limit_sec"].is_null())
    c.time_limit_sec = j["time_limit_sec"].get<double>();
  if (j.contains("out")) c.outdir = path_of(j["out"].get<std::string>());
  return c;
}

struct StudyResult {
  SystemModel model;
  ScenarioSet scenarios;
  MilpInstance inst;
  PlanSolution sol;
  CostBreakdown costs;
  ReplayReport replay;
  std::filesystem::path outdir;
};

// Runs one study end to end: load, scenarios, build, solve, replay-check,
// evaluate and write every artifact into the output directory.
inline StudyResult run_study(const StudyConfig& cfg) {
  StudyResult out;
  out.outdir = cfg.outdir;
  out.model = load_system(cfg.system);

  if (cfg.source == ScenarioSource::Cluster) {
    out.scenarios = build_scenarios(out.model, cfg.k, cfg.extremes, cfg.seed);
  } else {
    out.scenarios = load_scenarios(cfg.scenario_file);
  }
  {
    auto problems = check_scenarios(out.scenarios, out.model.config.tau);
    if (!problems.empty())
      throw ModelError("invalid scenario set: " + problems.front());
  }

  BuildOptions bopt{cfg.mode, cfg.scc};
  out.inst = build_program(out.model, out.scenarios, bopt);

  const double gap = cfg.mip_gap.value_or(out.model.config.mip_gap);
  std::filesystem::create_directories(cfg.outdir);
  if (cfg.backend.empty()) {
    out.sol = solve_milp(out.inst, {gap, cfg.node_limit, cfg.time_limit_sec});
  } else {
    out.sol = backend_solve(out.inst, cfg.backend, cfg.outdir / "backend", gap);
  }
  if (out.sol.status == SolveStatus::Infeasible)
    throw SolverError("the planning problem is infeasible");

  ProgramData data(out.model, out.scenarios, bopt);
  out.replay = replay_check(out.model, out.scenarios, bopt, out.inst, out.sol.values);
  if (!out.replay.ok())
    throw SolverError("solution failed replay checks: " +
                      (out.replay.problems.empty() ? "?" : out.replay.problems.front()));
  out.costs = evaluate_costs(data, out.inst, out.sol.values);

  // Artifacts.
  save_scenarios(out.scenarios, cfg.outdir / "scenarios.json");
  write_solution(out.inst, out.sol, cfg.outdir / "solution.txt");
  write_cost_table(out.costs, cfg.outdir / "cost_breakdown.csv");
  write_topology_table(data, out.inst, out.sol.values, cfg.outdir / "topology.csv");
  write_capacity_table(data, out.inst, out.sol.values, cfg.outdir / "capacity.csv");
  write_generation_table(data, out.inst, out.sol.values, cfg.outdir / "generation.csv");
  write_emissions_table(data, out.inst, out.sol.values, cfg.outdir / "emissions.csv");

  json manifest;
  manifest["config"] = study_config_to_json(cfg);
  char fp[24];
  std::snprintf(fp, sizeof fp, "%016llx",
                static_cast<unsigned long long>(system_fingerprint(out.model)));
  manifest["system_fingerprint"] = fp;
  manifest["solver"] = {{"status", to_string(out.sol.status)},
                        {"objective", out.sol.objective},
                        {"best_bound", out.sol.best_bound},
                        {"gap", out.sol.gap},
                        {"nodes", out.sol.nodes},
                        {"lp_iterations", out.sol.lp_iterations},
                        {"backend", cfg.backend.empty() ? "built-in" : cfg.backend},
                        {"mip_gap", gap}};
  manifest["replay_worst_residual"] = out.replay.worst();
  double inv = 0.0, op = 0.0, ec = 0.0;
  for (int y = 0; y < out.costs.epochs; ++y) {
    inv += out.costs.ic_generation[y] + out.costs.ic_transmission[y] +
           out.costs.ic_storage[y];
    op += out.costs.oc[y];
    ec += out.costs.ec[y];
  }
  manifest["summary"] = {{"investment_usd", inv},
                         {"operation_usd", op},
                         {"hard_usd", inv + op},
                         {"externality_usd", ec},
                         {"total_social_usd", inv + op + ec},
                         {"co2_mmt", out.costs.co2_tons / 1e6},
                         {"objective", out.sol.objective}};
  std::ofstream mf(cfg.outdir / "manifest.json");
  if (!mf) throw Error("cannot write manifest");
  mf << manifest.dump(1) << '\n';
  return out;
}

// Aligned comparison of several runs; the first directory is the baseline.
inline void compare_studies(const std::vector<std::filesystem::path>& dirs,
                            const std::filesystem::path& out_csv) {
  if (dirs.empty()) throw ModelError("compare: no study directories");
  struct Entry {
    std::string name;
    std::string fingerprint;
    std::map<std::string, double> metrics;
  };
  std::vector<Entry> entries;
  for (const auto& dir : dirs) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw ParseError("missing manifest in " + dir.string());
    json j = json::parse(in);
    Entry e;
    e.name = dir.filename().string();
    e.fingerprint = j.value("system_fingerprint", "");
    for (auto it = j["summary"].begin(); it != j["summary"].end(); ++it)
      e.metrics[it.key()] = it.value().get<double>();
    entries.push_back(std::move(e));
  }
  for (const auto& e : entries)
    if (e.fingerprint != entries.front().fingerprint)
      throw ModelError("compare: study " + e.name + " ran on a different system (" +
                       e.fingerprint + " vs " + entries.front().fingerprint + ")");

  std::ofstream out(out_csv);
  if (!out) throw Error("cannot write " + out_csv.string());
  out << "metric";
  for (const auto& e : entries) out << ',' << e.name;
  for (size_t i = 1; i < entries.size(); ++i)
    out << ",delta_" << entries[i].name;
  out << "\n";
  char buf[40];
  for (const auto& [metric, base] : entries.front().metrics) {
    out << metric;
    for (const auto& e : entries) {
      std::snprintf(buf, sizeof buf, "%.2f", e.metrics.at(metric));
      out << ',' << buf;
    }
    for (size_t i = 1; i < entries.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.2f", entries[i].metrics.at(metric) - base);
      out << ',' << buf;
    }
    out << "\n";
  }
}

}  // namespace gridplan
