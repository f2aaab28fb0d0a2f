#pragma once

#include <cstdint>
#include <vector>

#include "oran/config.hpp"
#include "oran/rng.hpp"

namespace oran {

// Nonnegative real power gains h[u][b][m][s]. The generator also keeps the
// geometry (per-(u,b) distance and large-scale term) and the complex fading
// coefficients behind each gain, so correlated redraws for contrastive pairs
// can mix on the underlying Gaussians instead of the power values.
struct ChannelTensor {
  int U = 0, B = 0, M = 0, S = 0;
  std::vector<double> gains;       // U*B*M*S, row-major u,b,m,s
  std::vector<double> distance_m;  // U*B
  std::vector<double> large_scale; // U*B, (d/d0)^(-eta)
  std::vector<double> fast_re;     // U*B*M*S, x of g=(x+iy)/sqrt(2)
  std::vector<double> fast_im;     // U*B*M*S

  size_t idx(int u, int b, int m, int s) const {
    return ((static_cast<size_t>(u) * B + b) * M + m) * S + s;
  }
  size_t idx_ub(int u, int b) const { return static_cast<size_t>(u) * B + b; }

  double gain(int u, int b, int m, int s) const { return gains[idx(u, b, m, s)]; }

  bool dims_match(const NetworkConfig& cfg) const {
    return U == cfg.num_ues() && B == cfg.num_rus && M == cfg.num_prbs &&
           S == cfg.num_slices();
  }
};

struct ChannelGenOptions {
  bool unit_fading = false;  // test hook: force |g|^2 = 1
};

// Draws one distance per (UE, RU) uniformly in the configured radius range,
// applies (d/d0)^(-eta) with d0 = min radius, and multiplies by unit-mean
// exponential fading (squared magnitude of a circular complex Gaussian).
// Pure function of (cfg, rng state).
ChannelTensor generate_channel(const NetworkConfig& cfg, Rng& rng,
                               const ChannelGenOptions& opts = {});

// h + iid zero-mean Gaussian noise with the given variance, clamped at 0.
// clamp=false is a test hook for checking the pre-clamp noise variance.
ChannelTensor add_channel_noise(const ChannelTensor& h, double noise_var, Rng& rng,
                                bool clamp = true);

enum class PairMode { Similar, Dissimilar };

// Similar: redraw the fading coefficients with correlation `corr` to the
// original (same geometry). Dissimilar: fresh geometry and fading; corr is
// ignored.
ChannelTensor generate_contrastive_pair(const ChannelTensor& h, const NetworkConfig& cfg,
                                        Rng& rng, PairMode mode, double corr);

}  // namespace oran
