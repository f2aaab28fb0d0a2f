#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oran/allocation.hpp"
#include "oran/esa.hpp"

namespace oran {

// Flattened training target: p block (normalized by the slice power cap),
// then alpha block, then beta block, all u-major.
struct GammaLayout {
  int p_len = 0;      // U*B*M*S
  int alpha_len = 0;  // U*B*S
  int beta_len = 0;   // U*B*M*S
  int total() const { return p_len + alpha_len + beta_len; }
};

GammaLayout gamma_layout(const NetworkConfig& cfg);
std::vector<double> flatten_gamma(const Allocation& a, const NetworkConfig& cfg);
Allocation gamma_to_allocation(const std::vector<double>& gamma,
                               const NetworkConfig& cfg);

struct LabeledSample {
  int64_t id = 0;
  uint64_t seed = 0;
  std::vector<double> h_flat;  // gains, u-major (u, b, m, s)
  std::vector<double> gamma;
  double objective = 0.0;
};

struct UnlabeledSample {
  int64_t id = 0;
  uint64_t seed = 0;
  std::vector<double> h_flat;
};

struct Dataset {
  NetworkConfig cfg;
  PowerGrid grid;       // grid used for labeling (empty levels when unlabeled)
  std::vector<LabeledSample> labeled;
  std::vector<UnlabeledSample> unlabeled;
  int64_t dropped = 0;  // infeasible draws regenerated during labeling
};

// Rebuild a ChannelTensor from stored gains (geometry/fading are not kept in
// dataset files; only the model input matters downstream).
ChannelTensor channel_from_gains(const std::vector<double>& gains,
                                 const NetworkConfig& cfg);

struct DatasetBuildOptions {
  unsigned long long budget = 50'000'000ULL;
  int threads = 1;       // samples are independent; merged in id order
  int max_attempts = 64; // per sample, before giving up
};

// n independent channels labeled by the exhaustive oracle. Sample i uses
// derive_seed(base_seed, i + attempt*n); infeasible draws are dropped and
// regenerated, the drop count lands in Dataset::dropped.
Dataset build_labeled_dataset(const NetworkConfig& cfg, const PowerGrid& grid,
                              int n_samples, uint64_t base_seed,
                              const DatasetBuildOptions& opts = {});

// Unlabeled channels only (no oracle run).
Dataset build_unlabeled_dataset(const NetworkConfig& cfg, int n_samples,
                                uint64_t base_seed);

// Line-oriented dataset file plus a sidecar <path>.meta holding the config,
// the grid, and the drop count. Numbers are written with 9 significant
// digits.
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace oran
