// oranctl - command-line driver for channel/dataset generation, solving,
// training, and evaluation sweeps. stdout carries machine-readable progress
// lines (key=value), stderr carries diagnostics.
//
// Exit codes: 0 ok, 2 parse/config error, 3 enumeration budget exceeded,
// 4 I/O error, 5 missing/bad checkpoint, 6 empty labeled set.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "oran/config.hpp"
#include "oran/dataset.hpp"
#include "oran/dqn.hpp"
#include "oran/errors.hpp"
#include "oran/manifest.hpp"
#include "oran/metrics.hpp"
#include "oran/ssvae.hpp"
#include "oran/sweep.hpp"
#include "oran/version.hpp"

namespace fs = std::filesystem;
using namespace oran;

namespace {

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

fs::path resolve_out(const std::string& out) {
  fs::path p(out);
  if (p.is_relative()) {
    const char* root = std::getenv("ORAN_OUT_ROOT");
    if (root && *root) p = fs::path(root) / p;
  }
  return p;
}

int env_threads() {
  const char* t = std::getenv("ORAN_THREADS");
  if (!t || !*t) return 1;
  int v = std::atoi(t);
  return v < 1 ? 1 : v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_allocation_file(const Allocation& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write allocation file: " + path);
  out << "# oran-allocation schema_version=" << kSchemaVersion << " U=" << a.U
      << " B=" << a.B << " M=" << a.M << " S=" << a.S << "\n";
  out << "alpha";
  for (uint8_t v : a.alpha) out << " " << static_cast<int>(v);
  out << "\nbeta";
  for (uint8_t v : a.beta) out << " " << static_cast<int>(v);
  out << "\np";
  for (double v : a.power) out << " " << fmt9(v);
  out << "\n";
  if (!out) throw IoError("failed writing allocation file: " + path);
}

void write_rate_report_file(const RateReport& rep, const NetworkConfig& cfg,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write rate report: " + path);
  out << "# oran-rate-report schema_version=" << kSchemaVersion << "\n";
  out << "objective " << fmt9(rep.objective) << "\n";
  for (int u = 0; u < rep.U; ++u)
    for (int s = 0; s < rep.S; ++s)
      out << "rate_ue " << u << " " << s << " " << fmt9(rep.rate(u, s)) << "\n";
  for (size_t b = 0; b < rep.ru_power.size(); ++b)
    out << "ru_power " << b << " " << fmt9(rep.ru_power[b]) << "\n";
  for (size_t b = 0; b < rep.fronthaul_rate.size(); ++b)
    out << "fronthaul " << b << " " << fmt9(rep.fronthaul_rate[b]) << "\n";
  for (int u = 0; u < rep.U; ++u) {
    int s = cfg.slice_of_ue(u);
    out << "delay " << u << " " << s << " " << fmt9(rep.delay_us(u, s)) << "\n";
  }
  if (!out) throw IoError("failed writing rate report: " + path);
}

void write_violations_file(const ViolationList& v, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write violations file: " + path);
  out << "# oran-violations schema_version=" << kSchemaVersion << " count=" << v.size()
      << "\n";
  for (const auto& e : v)
    out << constraint_name(e.id) << " " << e.u << " " << e.b << " " << e.m << " "
        << e.s << " " << fmt9(e.measured) << " " << fmt9(e.bound) << "\n";
  if (!out) throw IoError("failed writing violations file: " + path);
}

ChannelTensor load_channel(const std::string& dataset_path, int sample,
                           const NetworkConfig& cfg) {
  Dataset ds = load_dataset(dataset_path);
  if (!ds.labeled.empty()) {
    if (sample < 0 || sample >= static_cast<int>(ds.labeled.size()))
      throw ConfigError("sample index out of range");
    return channel_from_gains(ds.labeled[sample].h_flat, cfg);
  }
  if (sample < 0 || sample >= static_cast<int>(ds.unlabeled.size()))
    throw ConfigError("sample index out of range");
  return channel_from_gains(ds.unlabeled[sample].h_flat, cfg);
}

// --- gen ---

int cmd_gen(const std::string& cfg_path, int samples, uint64_t seed,
            const std::string& out_dir, bool unlabeled, int grid_levels,
            unsigned long long budget) {
  NetworkConfig cfg = load_config(cfg_path);
  fs::path out = resolve_out(out_dir);
  fs::create_directories(out);

  RunManifest man;
  man.command = "gen";
  man.config_path = cfg_path;
  man.config_hash = fnv1a64_hex(config_to_text(cfg));
  man.seed = seed;
  man.status = "started";
  man.write((out / "manifest.json").string());

  Dataset ds;
  if (unlabeled) {
    ds = build_unlabeled_dataset(cfg, samples, seed);
  } else {
    PowerGrid grid = PowerGrid::uniform(cfg, grid_levels);
    DatasetBuildOptions opts;
    opts.budget = budget;
    opts.threads = env_threads();
    ds = build_labeled_dataset(cfg, grid, samples, seed, opts);
  }
  std::string data_path = (out / "dataset.txt").string();
  save_dataset(ds, data_path);

  man.outputs = {data_path, data_path + ".meta"};
  man.extra["samples"] = std::to_string(samples);
  man.extra["dropped"] = std::to_string(ds.dropped);
  man.status = "finished";
  man.write((out / "manifest.json").string());
  std::cout << "event=gen-done samples=" << samples << " dropped=" << ds.dropped
            << " out=" << data_path << "\n";
  return 0;
}

// --- solve ---

int cmd_solve(const std::string& solver, const std::string& cfg_path,
              const std::string& channel_path, int sample, uint64_t seed,
              const std::string& checkpoint, const std::string& out_dir,
              int grid_levels, unsigned long long budget) {
  NetworkConfig cfg = load_config(cfg_path);
  if ((solver == "dqn" || solver == "ssvae") && checkpoint.empty())
    throw CheckpointError("solver '" + solver + "' requires --checkpoint");

  fs::path out = resolve_out(out_dir);
  fs::create_directories(out);

  RunManifest man;
  man.command = "solve";
  man.config_path = cfg_path;
  man.config_hash = fnv1a64_hex(config_to_text(cfg));
  man.seed = seed;
  man.status = "started";
  man.extra["solver"] = solver;
  man.write((out / "manifest.json").string());

  ChannelTensor h;
  if (!channel_path.empty()) {
    h = load_channel(channel_path, sample, cfg);
  } else {
    Rng rng(seed);
    h = generate_channel(cfg, rng);
  }

  Allocation alloc;
  if (solver == "esa") {
    PowerGrid grid = PowerGrid::uniform(cfg, grid_levels);
    EsaOptions eo;
    eo.budget = budget;
    SolveResult r = solve_esa(h, cfg, grid, eo);
    alloc = r.best_alloc;
    man.extra["evaluated_count"] = std::to_string(r.evaluated_count);
    man.extra["feasible_count"] = std::to_string(r.feasible_count);
    StructuralCount sc = structural_count(cfg, grid);
    man.extra["lattice_exact"] = sc.exact_str();
    man.extra["lattice_paper_formula"] = sc.paper_str();
    std::cout << "event=esa-done best_value=" << fmt9(r.best_value)
              << " evaluated=" << r.evaluated_count << " feasible=" << r.feasible_count
              << "\n";
  } else if (solver == "dqn") {
    int gl = 0;
    DenseNet qnet = load_dqn_checkpoint(checkpoint, &gl);
    PowerGrid grid = PowerGrid::uniform(cfg, gl);
    DqnEnv env(cfg, h, grid, RewardWeights{}, 50);
    alloc = greedy_rollout(qnet, env);
    std::cout << "event=dqn-done objective=" << fmt9(objective(h, alloc, cfg)) << "\n";
  } else if (solver == "ssvae") {
    SsvaeModel model = load_ssvae_checkpoint(checkpoint);
    PredictionRaw raw = predict_allocation(model, h, cfg);
    auto [a, viol] = project_feasible(raw, h, cfg);
    alloc = a;
    std::cout << "event=ssvae-done objective=" << fmt9(objective(h, alloc, cfg))
              << " violations=" << viol.size() << "\n";
  } else {
    throw ConfigError("unknown solver '" + solver + "'");
  }

  RateReport rep = compute_report(h, alloc, cfg);
  ViolationList viol = check_feasible(h, alloc, cfg);
  std::string alloc_path = (out / "allocation.txt").string();
  std::string report_path = (out / "rate_report.txt").string();
  std::string viol_path = (out / "violations.txt").string();
  write_allocation_file(alloc, alloc_path);
  write_rate_report_file(rep, cfg, report_path);
  write_violations_file(viol, viol_path);

  man.outputs = {alloc_path, report_path, viol_path};
  man.extra["objective"] = fmt9(rep.objective);
  man.extra["violations"] = std::to_string(viol.size());
  man.status = "finished";
  man.write((out / "manifest.json").string());
  return 0;
}

// --- train ---

int cmd_train(const std::string& model_kind, const std::string& cfg_path,
              const std::string& dataset_path,
              const std::vector<std::string>& hyper_kv, uint64_t seed,
              const std::string& out_dir, int grid_levels) {
  NetworkConfig cfg = load_config(cfg_path);
  fs::path out = resolve_out(out_dir);
  fs::create_directories(out);

  RunManifest man;
  man.command = "train";
  man.config_path = cfg_path;
  man.config_hash = fnv1a64_hex(config_to_text(cfg));
  man.seed = seed;
  man.status = "started";
  man.extra["model"] = model_kind;
  man.write((out / "manifest.json").string());

  auto parse_kv = [&](const std::string& kv, std::string& k, std::string& v) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("hyper override must be key=value, got '" + kv + "'");
    k = kv.substr(0, eq);
    v = kv.substr(eq + 1);
  };

  if (model_kind == "dqn") {
    DqnHyper hyper;
    hyper.seed = seed;
    for (const auto& kv : hyper_kv) {
      std::string k, v;
      parse_kv(kv, k, v);
      hyper.apply_override(k, v);
    }
    man.extra["episodes"] = std::to_string(hyper.episodes);
    man.extra["steps_per_episode"] = std::to_string(hyper.steps_per_episode);
    man.extra["gamma"] = fmt9(hyper.gamma);
    man.extra["eps_final"] = fmt9(hyper.eps_final);
    man.extra["eps_decay"] = fmt9(hyper.eps_decay);
    man.extra["replay_capacity"] = std::to_string(hyper.replay_capacity);
    man.extra["lr"] = fmt9(hyper.lr);

    Rng rng(seed);
    ChannelTensor h = generate_channel(cfg, rng);
    PowerGrid grid = PowerGrid::uniform(cfg, grid_levels);
    DqnTrainResult res = train_dqn(cfg, h, grid, hyper);

    std::string ckpt_path = (out / "dqn.ckpt").string();
    save_dqn_checkpoint(ckpt_path, res.qnet, grid_levels, res.optimizer_steps);
    std::string hist_path = (out / "history.csv").string();
    {
      std::ofstream hist(hist_path);
      if (!hist) throw IoError("cannot write history: " + hist_path);
      hist << "# columns: episode,total_reward,eps,loss_mean\n";
      for (const auto& row : res.history)
        hist << row.episode << "," << fmt9(row.total_reward) << "," << fmt9(row.eps_end)
             << "," << fmt9(row.mean_loss) << "\n";
    }
    man.outputs = {ckpt_path, hist_path};
    man.extra["env_steps"] = std::to_string(res.env_steps);
    man.extra["optimizer_steps"] = std::to_string(res.optimizer_steps);
    man.status = "finished";
    man.write((out / "manifest.json").string());
    std::cout << "event=train-done model=dqn env_steps=" << res.env_steps
              << " checkpoint=" << ckpt_path << "\n";
    return 0;
  }

  if (model_kind == "ssvae") {
    if (dataset_path.empty())
      throw ConfigError("ssvae training requires --dataset");
    SsvaeHyper hyper;
    hyper.seed = seed;
    for (const auto& kv : hyper_kv) {
      std::string k, v;
      parse_kv(kv, k, v);
      hyper.apply_override(k, v);
    }
    man.extra["lr"] = fmt9(hyper.lr);
    man.extra["epochs"] = std::to_string(hyper.epochs_total);
    man.extra["batch_size"] = std::to_string(hyper.batch_size);
    man.extra["dropout"] = fmt9(hyper.dropout);
    man.extra["latent_dim"] = std::to_string(hyper.latent_dim);
    man.extra["tau"] = fmt9(hyper.tau);
    man.extra["beta1"] = fmt9(hyper.adam_beta1);
    man.extra["beta2"] = fmt9(hyper.adam_beta2);
    man.extra["weight_decay"] = fmt9(hyper.weight_decay);
    man.extra["val_split"] = fmt9(hyper.val_split);
    man.extra["lambda_rec"] = fmt9(hyper.lambda_rec);
    man.extra["lambda_kl"] = fmt9(hyper.lambda_kl);
    man.extra["lambda_sup"] = fmt9(hyper.lambda_sup);
    man.extra["lambda_con"] = fmt9(hyper.lambda_con);

    Dataset ds = load_dataset(dataset_path);
    ds.cfg.validate();
    SsvaeTrainResult res = train_ssvae(ds, hyper);

    std::string ckpt_path = (out / "ssvae.ckpt").string();
    save_ssvae_checkpoint(ckpt_path, res.model, res.optimizer_steps);
    std::string hist_path = (out / "history.csv").string();
    {
      std::ofstream hist(hist_path);
      if (!hist) throw IoError("cannot write history: " + hist_path);
      hist << "# columns: epoch,stage,loss_rec,loss_kl,loss_sup,loss_con,val_mae,"
              "val_r2,val_cosine\n";
      for (const auto& row : res.history)
        hist << row.epoch << "," << row.stage << "," << fmt9(row.loss_rec) << ","
             << fmt9(row.loss_kl) << "," << fmt9(row.loss_sup) << ","
             << fmt9(row.loss_con) << "," << fmt9(row.val_mae) << ","
             << fmt9(row.val_r2) << "," << fmt9(row.val_cosine) << "\n";
    }
    man.outputs = {ckpt_path, hist_path};
    man.extra["optimizer_steps"] = std::to_string(res.optimizer_steps);
    man.status = "finished";
    man.write((out / "manifest.json").string());
    std::cout << "event=train-done model=ssvae optimizer_steps=" << res.optimizer_steps
              << " checkpoint=" << ckpt_path << "\n";
    return 0;
  }
  throw ConfigError("unknown model '" + model_kind + "'");
}

// --- eval ---

ScenarioSweep load_sweep_spec(const std::string& path) {
  nlohmann::json j;
  {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open sweep spec: " + path);
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("bad sweep spec json: ") + e.what());
    }
  }
  ScenarioSweep sw;
  if (!j.contains("config")) throw ConfigError("sweep spec: missing 'config'");
  fs::path spec_dir = fs::path(path).parent_path();
  fs::path cfg_path = fs::path(j["config"].get<std::string>());
  if (cfg_path.is_relative()) cfg_path = spec_dir / cfg_path;
  sw.base_cfg = load_config(cfg_path.string());
  sw.variable = sweep_variable_from_name(j.value("variable", "num_ues"));
  if (j.contains("values")) sw.values = j["values"].get<std::vector<double>>();
  if (j.contains("seeds")) sw.seeds = j["seeds"].get<std::vector<uint64_t>>();
  if (j.contains("solvers")) sw.solvers = j["solvers"].get<std::vector<std::string>>();
  sw.grid_levels = j.value("grid_levels", 4);
  sw.budget = j.value("budget", 50000000ULL);
  sw.dqn_horizon = j.value("dqn_horizon", 50);
  if (j.contains("checkpoints"))
    for (auto it = j["checkpoints"].begin(); it != j["checkpoints"].end(); ++it) {
      std::vector<std::string> paths = it.value().get<std::vector<std::string>>();
      for (auto& p : paths) {
        fs::path cp(p);
        if (cp.is_relative()) p = (spec_dir / cp).string();
      }
      sw.checkpoints[it.key()] = paths;
    }
  sw.validate();
  return sw;
}

int cmd_eval(const std::string& spec_path, const std::string& out_dir,
             bool complexity) {
  ScenarioSweep sw = load_sweep_spec(spec_path);
  fs::path out = resolve_out(out_dir);
  fs::create_directories(out);

  RunManifest man;
  man.command = "eval";
  man.config_path = spec_path;
  man.config_hash = fnv1a64_hex(read_file(spec_path));
  man.status = "started";
  man.write((out / "manifest.json").string());

  ComparisonReport rep = run_sweep(sw);
  std::string csv_path = (out / "report.csv").string();
  std::string prov_path = (out / "provenance.json").string();
  write_report_csv(rep, sw, csv_path);
  write_report_provenance(rep, sw, config_to_text(sw.base_cfg), prov_path);
  man.outputs = {csv_path, prov_path};

  if (complexity) {
    std::vector<ComplexityRow> rows;
    for (size_t vi = 0; vi < sw.values.size(); ++vi) {
      NetworkConfig cfg = apply_sweep_value(sw.base_cfg, sw.variable, sw.values[vi]);
      PowerGrid grid = PowerGrid::uniform(cfg, sw.grid_levels);
      StructuralCount sc = structural_count(cfg, grid);
      for (const auto& c : rep.cells) {
        if (c.solver != "esa" || c.value != sw.values[vi] || !c.ok) continue;
        ComplexityRow row;
        row.solver = "esa";
        row.instance = std::string(sweep_variable_name(sw.variable)) + "=" +
                       fmt9(c.value) + " seed=" + std::to_string(c.seed);
        row.measured = std::to_string(c.evaluated);
        row.predicted = sc.exact_str();
        row.formula = "exact lattice; paper (U*B)*(M+1)!*P = " + sc.paper_str();
        row.wall_time_s = c.wall_time_s;
        rows.push_back(row);
      }
    }
    std::string cx_path = (out / "complexity.txt").string();
    std::ofstream cx(cx_path);
    if (!cx) throw IoError("cannot write complexity table: " + cx_path);
    cx << render_complexity_table(rows);
    man.outputs.push_back(cx_path);
  }

  man.status = "finished";
  man.write((out / "manifest.json").string());

  size_t failed = 0;
  for (const auto& c : rep.cells)
    if (!c.ok) {
      ++failed;
      std::cerr << "cell failed: solver=" << c.solver << " value=" << c.value
                << " seed=" << c.seed << " error=" << c.error << "\n";
    }
  std::cout << "event=eval-done cells=" << rep.cells.size() << " failed=" << failed
            << " out=" << csv_path << "\n";
  if (!rep.cells.empty() && rep.all_failed()) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"O-RAN slicing resource-allocation workbench"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate channel datasets");
  std::string gen_cfg, gen_out = "gen-out";
  int gen_samples = 100;
  uint64_t gen_seed = 1;
  bool gen_unlabeled = false;
  int gen_grid = 4;
  unsigned long long gen_budget = 50000000ULL;
  gen->add_option("config", gen_cfg, "scenario config file")->required();
  gen->add_option("--samples", gen_samples, "number of samples");
  gen->add_option("--seed", gen_seed, "base seed");
  gen->add_option("--out", gen_out, "output directory");
  gen->add_flag("--unlabeled", gen_unlabeled, "skip oracle labeling");
  gen->add_option("--grid-levels", gen_grid, "power levels incl. zero");
  gen->add_option("--budget", gen_budget, "enumeration budget per sample");

  // solve
  auto* solve = app.add_subcommand("solve", "Solve one scenario instance");
  std::string so_solver, so_cfg, so_channel, so_ckpt, so_out = "solve-out";
  int so_sample = 0, so_grid = 4;
  uint64_t so_seed = 1;
  unsigned long long so_budget = 50000000ULL;
  solve->add_option("--solver", so_solver, "esa|dqn|ssvae")->required();
  solve->add_option("config", so_cfg, "scenario config file")->required();
  solve->add_option("--channel", so_channel, "dataset file holding the channel");
  solve->add_option("--sample", so_sample, "sample index in the dataset");
  solve->add_option("--seed", so_seed, "seed when generating the channel");
  solve->add_option("--checkpoint", so_ckpt, "model checkpoint (dqn/ssvae)");
  solve->add_option("--out", so_out, "output directory");
  solve->add_option("--grid-levels", so_grid, "power levels incl. zero");
  solve->add_option("--budget", so_budget, "enumeration budget");

  // train
  auto* train = app.add_subcommand("train", "Train a learner");
  std::string tr_model, tr_cfg, tr_dataset, tr_out = "train-out";
  std::vector<std::string> tr_hyper;
  uint64_t tr_seed = 1;
  int tr_grid = 4;
  train->add_option("--model", tr_model, "dqn|ssvae")->required();
  train->add_option("config", tr_cfg, "scenario config file")->required();
  train->add_option("--dataset", tr_dataset, "labeled dataset (ssvae)");
  train->add_option("--hyper", tr_hyper, "hyper override key=value")
      ->take_all();
  train->add_option("--seed", tr_seed, "training seed");
  train->add_option("--out", tr_out, "output directory");
  train->add_option("--grid-levels", tr_grid, "power levels incl. zero");

  // eval
  auto* eval = app.add_subcommand("eval", "Run a comparison sweep");
  std::string ev_spec, ev_out = "eval-out";
  bool ev_complexity = false;
  eval->add_option("spec", ev_spec, "sweep spec json")->required();
  eval->add_option("--out", ev_out, "output directory");
  eval->add_flag("--complexity", ev_complexity, "emit complexity counter table");

  try {
    app.parse(argc, argv);
    if (gen->parsed())
      return cmd_gen(gen_cfg, gen_samples, gen_seed, gen_out, gen_unlabeled, gen_grid,
                     gen_budget);
    if (solve->parsed())
      return cmd_solve(so_solver, so_cfg, so_channel, so_sample, so_seed, so_ckpt,
                       so_out, so_grid, so_budget);
    if (train->parsed())
      return cmd_train(tr_model, tr_cfg, tr_dataset, tr_hyper, tr_seed, tr_out,
                       tr_grid);
    if (eval->parsed()) return cmd_eval(ev_spec, ev_out, ev_complexity);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const BudgetError& e) {
    std::cerr << "budget error: " << e.what() << " (count=" << e.count << ")\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    return 5;
  } catch (const EmptyLabeledError& e) {
    std::cerr << "dataset error: " << e.what() << "\n";
    return 6;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
