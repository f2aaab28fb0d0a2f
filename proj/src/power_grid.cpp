#include "oran/power_grid.hpp"

#include "oran/errors.hpp"

namespace oran {

PowerGrid PowerGrid::uniform(const NetworkConfig& cfg, int n_levels) {
  if (n_levels < 1) throw ConfigError("power grid needs at least one level");
  PowerGrid g;
  g.p_levels = n_levels;
  g.levels.resize(cfg.num_slices());
  for (int s = 0; s < cfg.num_slices(); ++s) {
    g.levels[s].resize(n_levels);
    g.levels[s][0] = 0.0;
    for (int k = 1; k < n_levels; ++k)
      g.levels[s][k] =
          cfg.p_slice_max_w[s] * static_cast<double>(k) / (n_levels - 1);
  }
  return g;
}

void PowerGrid::validate(const NetworkConfig& cfg) const {
  if (p_levels < 1) throw ConfigError("power grid: p_levels < 1");
  if (static_cast<int>(levels.size()) != cfg.num_slices())
    throw ConfigError("power grid: one ladder per slice required");
  for (int s = 0; s < cfg.num_slices(); ++s) {
    const auto& ls = levels[s];
    if (static_cast<int>(ls.size()) != p_levels)
      throw ConfigError("power grid: ladder length mismatch");
    if (ls[0] != 0.0) throw ConfigError("power grid: first level must be 0");
    for (int k = 1; k < p_levels; ++k)
      if (!(ls[k] > ls[k - 1]))
        throw ConfigError("power grid: levels must be strictly increasing");
    if (ls.back() > cfg.p_slice_max_w[s])
      throw ConfigError("power grid: last level exceeds the slice power cap");
  }
}

}  // namespace oran
