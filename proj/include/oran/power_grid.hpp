#pragma once

#include <vector>

#include "oran/config.hpp"

namespace oran {

// Quantized transmit-power levels, one ladder per slice. Level 0 is always
// 0 W; the remaining levels are strictly increasing and capped by the slice
// power limit. Enumeration and the DQN action space both index into this.
struct PowerGrid {
  int p_levels = 0;                          // levels per slice, including 0
  std::vector<std::vector<double>> levels;   // [slice][level]

  // Uniform ladder {0, 1/(n-1), ..., 1} * P_s^max per slice.
  static PowerGrid uniform(const NetworkConfig& cfg, int n_levels);

  int active_levels() const { return p_levels - 1; }
  double level(int s, int k) const { return levels[s][k]; }

  // Throws ConfigError if the ladder violates its invariants for cfg.
  void validate(const NetworkConfig& cfg) const;
};

}  // namespace oran
