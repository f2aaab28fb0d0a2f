#include "oran/dataset.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

#include "oran/errors.hpp"
#include "oran/rng.hpp"
#include "oran/version.hpp"

namespace oran {

namespace {

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

GammaLayout gamma_layout(const NetworkConfig& cfg) {
  GammaLayout gl;
  int U = cfg.num_ues(), B = cfg.num_rus, M = cfg.num_prbs, S = cfg.num_slices();
  gl.p_len = U * B * M * S;
  gl.alpha_len = U * B * S;
  gl.beta_len = U * B * M * S;
  return gl;
}

std::vector<double> flatten_gamma(const Allocation& a, const NetworkConfig& cfg) {
  GammaLayout gl = gamma_layout(cfg);
  std::vector<double> out;
  out.reserve(gl.total());
  for (int u = 0; u < a.U; ++u)
    for (int b = 0; b < a.B; ++b)
      for (int m = 0; m < a.M; ++m)
        for (int s = 0; s < a.S; ++s)
          out.push_back(a.p(u, b, m, s) / cfg.p_slice_max_w[s]);
  for (int u = 0; u < a.U; ++u)
    for (int b = 0; b < a.B; ++b)
      for (int s = 0; s < a.S; ++s) out.push_back(a.a(u, b, s));
  for (int u = 0; u < a.U; ++u)
    for (int b = 0; b < a.B; ++b)
      for (int m = 0; m < a.M; ++m)
        for (int s = 0; s < a.S; ++s) out.push_back(a.bt(u, b, m, s));
  return out;
}

Allocation gamma_to_allocation(const std::vector<double>& gamma,
                               const NetworkConfig& cfg) {
  GammaLayout gl = gamma_layout(cfg);
  if (static_cast<int>(gamma.size()) != gl.total())
    throw ConfigError("gamma length does not match config dims");
  Allocation a = Allocation::zero(cfg);
  size_t i = 0;
  for (int u = 0; u < a.U; ++u)
    for (int b = 0; b < a.B; ++b)
      for (int m = 0; m < a.M; ++m)
        for (int s = 0; s < a.S; ++s)
          a.p(u, b, m, s) = gamma[i++] * cfg.p_slice_max_w[s];
  for (int u = 0; u < a.U; ++u)
    for (int b = 0; b < a.B; ++b)
      for (int s = 0; s < a.S; ++s)
        a.a(u, b, s) = gamma[i++] >= 0.5 ? 1 : 0;
  for (int u = 0; u < a.U; ++u)
    for (int b = 0; b < a.B; ++b)
      for (int m = 0; m < a.M; ++m)
        for (int s = 0; s < a.S; ++s)
          a.bt(u, b, m, s) = gamma[i++] >= 0.5 ? 1 : 0;
  return a;
}

ChannelTensor channel_from_gains(const std::vector<double>& gains,
                                 const NetworkConfig& cfg) {
  ChannelTensor h;
  h.U = cfg.num_ues();
  h.B = cfg.num_rus;
  h.M = cfg.num_prbs;
  h.S = cfg.num_slices();
  size_t n = static_cast<size_t>(h.U) * h.B * h.M * h.S;
  if (gains.size() != n) throw ConfigError("gain vector length does not match config");
  h.gains = gains;
  return h;
}

Dataset build_labeled_dataset(const NetworkConfig& cfg, const PowerGrid& grid,
                              int n_samples, uint64_t base_seed,
                              const DatasetBuildOptions& opts) {
  cfg.validate();
  grid.validate(cfg);
  Dataset ds;
  ds.cfg = cfg;
  ds.grid = grid;
  ds.labeled.resize(n_samples);
  if (n_samples == 0) return ds;

  std::vector<int64_t> dropped_per_sample(n_samples, 0);
  auto work = [&](int i) {
    for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
      uint64_t seed = derive_seed(base_seed,
                                  static_cast<uint64_t>(i) +
                                      static_cast<uint64_t>(attempt) * n_samples);
      Rng rng(seed);
      ChannelTensor h = generate_channel(cfg, rng);
      EsaOptions eo;
      eo.budget = opts.budget;
      SolveResult r = solve_esa(h, cfg, grid, eo);
      if (!r.found()) {
        ++dropped_per_sample[i];
        continue;
      }
      LabeledSample& out = ds.labeled[i];
      out.id = i;
      out.seed = seed;
      out.h_flat = h.gains;
      out.gamma = flatten_gamma(r.best_alloc, cfg);
      out.objective = r.best_value;
      return;
    }
    throw ConfigError("no feasible draw for sample " + std::to_string(i) + " after " +
                      std::to_string(opts.max_attempts) + " attempts");
  };

  int threads = opts.threads < 1 ? 1 : opts.threads;
  if (threads == 1) {
    for (int i = 0; i < n_samples; ++i) work(i);
  } else {
    // Independent samples; results land in id order so the output bytes do
    // not depend on the thread count.
    std::vector<std::future<void>> futs;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
      futs.push_back(std::async(std::launch::async, [&]() {
        while (true) {
          int i = next.fetch_add(1);
          if (i >= n_samples) return;
          work(i);
        }
      }));
    for (auto& f : futs) f.get();
  }
  for (int64_t d : dropped_per_sample) ds.dropped += d;
  return ds;
}

Dataset build_unlabeled_dataset(const NetworkConfig& cfg, int n_samples,
                                uint64_t base_seed) {
  cfg.validate();
  Dataset ds;
  ds.cfg = cfg;
  ds.unlabeled.resize(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    uint64_t seed = derive_seed(base_seed, static_cast<uint64_t>(i));
    Rng rng(seed);
    ChannelTensor h = generate_channel(cfg, rng);
    ds.unlabeled[i] = {i, seed, h.gains};
  }
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  const bool labeled = !ds.labeled.empty() || ds.unlabeled.empty();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset file: " + path);
  GammaLayout gl = gamma_layout(ds.cfg);
  size_t h_len = static_cast<size_t>(ds.cfg.num_ues()) * ds.cfg.num_rus *
                 ds.cfg.num_prbs * ds.cfg.num_slices();
  out << "# oran-dataset schema_version=" << kSchemaVersion
      << " kind=" << (labeled ? "labeled" : "unlabeled") << " h_len=" << h_len
      << " gamma_len=" << (labeled ? gl.total() : 0)
      << " count=" << (labeled ? ds.labeled.size() : ds.unlabeled.size()) << "\n";
  auto write_vec = [&](const std::vector<double>& v) {
    for (double x : v) out << " " << fmt9(x);
  };
  if (labeled) {
    for (const auto& s : ds.labeled) {
      out << s.id << " " << s.seed;
      write_vec(s.h_flat);
      write_vec(s.gamma);
      out << " " << fmt9(s.objective) << "\n";
    }
  } else {
    for (const auto& s : ds.unlabeled) {
      out << s.id << " " << s.seed;
      write_vec(s.h_flat);
      out << "\n";
    }
  }
  if (!out) throw IoError("failed writing dataset file: " + path);

  std::ofstream meta(path + ".meta");
  if (!meta) throw IoError("cannot write dataset meta file: " + path + ".meta");
  meta << "# oran-dataset-meta schema_version=" << kSchemaVersion << "\n";
  meta << "dropped = " << ds.dropped << "\n";
  meta << "grid_levels = " << ds.grid.p_levels << "\n";
  for (size_t s = 0; s < ds.grid.levels.size(); ++s) {
    meta << "grid_slice_" << s << " =";
    for (double v : ds.grid.levels[s]) meta << " " << fmt9(v);
    meta << "\n";
  }
  meta << "[config]\n" << config_to_text(ds.cfg);
  if (!meta) throw IoError("failed writing dataset meta file: " + path + ".meta");
}

Dataset load_dataset(const std::string& path) {
  std::ifstream meta_in(path + ".meta");
  if (!meta_in) throw IoError("cannot open dataset meta file: " + path + ".meta");
  Dataset ds;
  {
    std::string line;
    std::string cfg_text;
    bool in_cfg = false;
    while (std::getline(meta_in, line)) {
      if (line == "[config]") {
        in_cfg = true;
        continue;
      }
      if (in_cfg) {
        cfg_text += line + "\n";
        continue;
      }
      if (line.empty() || line[0] == '#') continue;
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(0, eq);
      while (!key.empty() && key.back() == ' ') key.pop_back();
      std::string val = line.substr(eq + 1);
      std::istringstream vs(val);
      if (key == "dropped") vs >> ds.dropped;
      else if (key == "grid_levels") vs >> ds.grid.p_levels;
      else if (key.rfind("grid_slice_", 0) == 0) {
        std::vector<double> lv;
        double x;
        while (vs >> x) lv.push_back(x);
        ds.grid.levels.push_back(std::move(lv));
      }
    }
    ds.cfg = parse_config_text(cfg_text, path + ".meta");
  }

  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file: " + path);
  std::string header;
  std::getline(in, header);
  bool labeled = header.find("kind=labeled") != std::string::npos;
  if (header.rfind("# oran-dataset ", 0) != 0)
    throw IoError("not a dataset file: " + path);

  size_t h_len = static_cast<size_t>(ds.cfg.num_ues()) * ds.cfg.num_rus *
                 ds.cfg.num_prbs * ds.cfg.num_slices();
  GammaLayout gl = gamma_layout(ds.cfg);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (labeled) {
      LabeledSample s;
      ls >> s.id >> s.seed;
      s.h_flat.resize(h_len);
      for (auto& x : s.h_flat) ls >> x;
      s.gamma.resize(gl.total());
      for (auto& x : s.gamma) ls >> x;
      ls >> s.objective;
      if (!ls) throw IoError("malformed dataset line in " + path);
      ds.labeled.push_back(std::move(s));
    } else {
      UnlabeledSample s;
      ls >> s.id >> s.seed;
      s.h_flat.resize(h_len);
      for (auto& x : s.h_flat) ls >> x;
      if (!ls) throw IoError("malformed dataset line in " + path);
      ds.unlabeled.push_back(std::move(s));
    }
  }
  return ds;
}

}  // namespace oran
