#include "oran/sweep.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oran/dqn.hpp"
#include "oran/errors.hpp"
#include "oran/manifest.hpp"
#include "oran/rng.hpp"
#include "oran/ssvae.hpp"
#include "oran/version.hpp"

namespace oran {

namespace {

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

SweepVariable sweep_variable_from_name(const std::string& name) {
  if (name == "num_ues") return SweepVariable::NumUes;
  if (name == "p_ru_max") return SweepVariable::PRuMax;
  if (name == "p_slice_max") return SweepVariable::PSliceMax;
  if (name == "labeled_count") return SweepVariable::LabeledCount;
  throw ConfigError("unknown sweep variable '" + name + "'");
}

const char* sweep_variable_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::NumUes: return "num_ues";
    case SweepVariable::PRuMax: return "p_ru_max";
    case SweepVariable::PSliceMax: return "p_slice_max";
    case SweepVariable::LabeledCount: return "labeled_count";
  }
  return "unknown";
}

NetworkConfig apply_sweep_value(const NetworkConfig& base, SweepVariable var,
                                double value) {
  NetworkConfig cfg = base;
  switch (var) {
    case SweepVariable::NumUes: {
      int total = static_cast<int>(value);
      cfg.num_ues_embb = (total + 1) / 2;
      cfg.num_ues_urllc = total - cfg.num_ues_embb;
      break;
    }
    case SweepVariable::PRuMax:
      cfg.p_ru_max_w = value;
      break;
    case SweepVariable::PSliceMax:
      for (auto& v : cfg.p_slice_max_w) v = value;
      break;
    case SweepVariable::LabeledCount:
      break;
  }
  cfg.validate();
  return cfg;
}

void ScenarioSweep::validate() const {
  base_cfg.validate();
  if (values.empty()) throw ConfigError("sweep: empty value list");
  for (size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1]))
      throw ConfigError("sweep: values must be strictly increasing");
  if (seeds.empty()) throw ConfigError("sweep: at least one seed required");
  for (const auto& s : solvers)
    if (s != "esa" && s != "dqn" && s != "ssvae")
      throw ConfigError("sweep: unknown solver '" + s + "'");
  for (const auto& [solver, paths] : checkpoints)
    if (!paths.empty() && paths.size() != values.size())
      throw ConfigError("sweep: checkpoints for '" + solver +
                        "' must align with the value list");
}

bool ComparisonReport::all_failed() const {
  if (cells.empty()) return false;
  for (const auto& c : cells)
    if (c.ok) return false;
  return true;
}

bool ComparisonReport::any_ok() const {
  for (const auto& c : cells)
    if (c.ok) return true;
  return false;
}

ComparisonReport run_sweep(const ScenarioSweep& sweep) {
  sweep.validate();
  ComparisonReport rep;

  // Cap sweeps keep the base grid: levels stay valid for every swept cap and
  // the feasible sets nest, which is what the monotonicity checks rely on.
  const bool grid_from_base = sweep.variable == SweepVariable::PRuMax ||
                              sweep.variable == SweepVariable::PSliceMax;
  PowerGrid base_grid = PowerGrid::uniform(sweep.base_cfg, sweep.grid_levels);

  for (const auto& solver : sweep.solvers) {
    for (size_t vi = 0; vi < sweep.values.size(); ++vi) {
      double value = sweep.values[vi];
      for (uint64_t seed : sweep.seeds) {
        SweepCell cell;
        cell.solver = solver;
        cell.value = value;
        cell.seed = seed;
        auto t0 = std::chrono::steady_clock::now();
        try {
          NetworkConfig cfg = apply_sweep_value(sweep.base_cfg, sweep.variable, value);
          PowerGrid grid =
              grid_from_base ? base_grid : PowerGrid::uniform(cfg, sweep.grid_levels);
          Rng rng(seed);
          ChannelTensor h = generate_channel(cfg, rng);

          if (solver == "esa") {
            EsaOptions eo;
            eo.budget = sweep.budget;
            SolveResult r = solve_esa(h, cfg, grid, eo);
            cell.objective = r.best_value;
            cell.violations = r.found() ? 0 : 1;
            cell.evaluated = r.evaluated_count;
            cell.feasible = r.feasible_count;
          } else {
            auto it = sweep.checkpoints.find(solver);
            if (it == sweep.checkpoints.end() || it->second.empty())
              throw CheckpointError("sweep: no checkpoints for solver '" + solver + "'");
            const std::string& ckpt = it->second[vi];
            if (solver == "dqn") {
              int gl = 0;
              DenseNet qnet = load_dqn_checkpoint(ckpt, &gl);
              PowerGrid dgrid = PowerGrid::uniform(cfg, gl);
              DqnEnv env(cfg, h, dgrid, RewardWeights{}, sweep.dqn_horizon);
              Allocation a = greedy_rollout(qnet, env);
              cell.objective = objective(h, a, cfg);
              cell.violations = check_feasible(h, a, cfg).size();
            } else {  // ssvae
              SsvaeModel model = load_ssvae_checkpoint(ckpt);
              PredictionRaw raw = predict_allocation(model, h, cfg);
              auto [a, viol] = project_feasible(raw, h, cfg);
              cell.objective = objective(h, a, cfg);
              cell.violations = viol.size();
            }
          }
          cell.ok = true;
        } catch (const std::exception& e) {
          cell.ok = false;
          cell.error = e.what();
        }
        cell.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        rep.cells.push_back(std::move(cell));
      }
    }
  }
  return rep;
}

void write_report_csv(const ComparisonReport& rep, const ScenarioSweep& sweep,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report: " + path);
  out << "# columns: solver,variable,value,seed,ok,objective,violations,"
         "evaluated_count,feasible_count\n";
  for (const auto& c : rep.cells) {
    out << c.solver << "," << sweep_variable_name(sweep.variable) << ","
        << fmt9(c.value) << "," << c.seed << "," << (c.ok ? 1 : 0) << ","
        << fmt9(c.objective) << "," << c.violations << "," << c.evaluated << ","
        << c.feasible << "\n";
  }
  // Aggregates over ok cells, one mean and one stddev row per (solver, value).
  for (const auto& solver : sweep.solvers) {
    for (double value : sweep.values) {
      std::vector<double> objs;
      for (const auto& c : rep.cells)
        if (c.ok && c.solver == solver && c.value == value) objs.push_back(c.objective);
      if (objs.empty()) continue;
      double mean = 0.0;
      for (double v : objs) mean += v;
      mean /= static_cast<double>(objs.size());
      double var = 0.0;
      for (double v : objs) var += (v - mean) * (v - mean);
      var /= static_cast<double>(objs.size());
      out << solver << "," << sweep_variable_name(sweep.variable) << ","
          << fmt9(value) << ",mean," << objs.size() << "," << fmt9(mean) << ",,,\n";
      out << solver << "," << sweep_variable_name(sweep.variable) << ","
          << fmt9(value) << ",stddev," << objs.size() << "," << fmt9(std::sqrt(var))
          << ",,,\n";
    }
  }
  if (!out) throw IoError("failed writing report: " + path);
}

void write_report_provenance(const ComparisonReport& rep, const ScenarioSweep& sweep,
                             const std::string& config_text, const std::string& path) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["variable"] = sweep_variable_name(sweep.variable);
  j["values"] = sweep.values;
  j["seeds"] = sweep.seeds;
  j["solvers"] = sweep.solvers;
  j["grid_levels"] = sweep.grid_levels;
  j["config_hash"] = fnv1a64_hex(config_text);
  nlohmann::json ckpts = nlohmann::json::object();
  for (const auto& [solver, paths] : sweep.checkpoints) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : paths) {
      nlohmann::json e;
      e["path"] = p;
      try {
        e["hash"] = hash_file(p);
      } catch (const std::exception&) {
        e["hash"] = nullptr;
      }
      arr.push_back(e);
    }
    ckpts[solver] = arr;
  }
  j["checkpoints"] = ckpts;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : rep.cells) {
    nlohmann::json e;
    e["solver"] = c.solver;
    e["value"] = c.value;
    e["seed"] = c.seed;
    e["ok"] = c.ok;
    e["wall_time_s"] = c.wall_time_s;
    if (!c.ok) e["error"] = c.error;
    cells.push_back(e);
  }
  j["cells"] = cells;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write provenance: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing provenance: " + path);
}

std::string render_complexity_table(const std::vector<ComplexityRow>& rows) {
  std::ostringstream out;
  out << "solver | instance | measured | predicted | formula | wall_time_s\n";
  for (const auto& r : rows) {
    char tbuf[32];
    std::snprintf(tbuf, sizeof(tbuf), "%.3f", r.wall_time_s);
    out << r.solver << " | " << r.instance << " | " << r.measured << " | "
        << r.predicted << " | " << r.formula << " | " << tbuf << "\n";
  }
  return out.str();
}

}  // namespace oran
