#include "oran/channel.hpp"

#include <cmath>

#include "oran/errors.hpp"

namespace oran {

namespace {

void alloc_tensor(ChannelTensor& h, const NetworkConfig& cfg) {
  h.U = cfg.num_ues();
  h.B = cfg.num_rus;
  h.M = cfg.num_prbs;
  h.S = cfg.num_slices();
  size_t n = static_cast<size_t>(h.U) * h.B * h.M * h.S;
  h.gains.assign(n, 0.0);
  h.distance_m.assign(static_cast<size_t>(h.U) * h.B, 0.0);
  h.large_scale.assign(static_cast<size_t>(h.U) * h.B, 0.0);
  h.fast_re.assign(n, 0.0);
  h.fast_im.assign(n, 0.0);
}

void fill_gains(ChannelTensor& h) {
  for (int u = 0; u < h.U; ++u)
    for (int b = 0; b < h.B; ++b) {
      double ls = h.large_scale[h.idx_ub(u, b)];
      for (int m = 0; m < h.M; ++m)
        for (int s = 0; s < h.S; ++s) {
          size_t i = h.idx(u, b, m, s);
          double fading = 0.5 * (h.fast_re[i] * h.fast_re[i] + h.fast_im[i] * h.fast_im[i]);
          h.gains[i] = ls * fading;
        }
    }
}

}  // namespace

ChannelTensor generate_channel(const NetworkConfig& cfg, Rng& rng,
                               const ChannelGenOptions& opts) {
  cfg.validate();
  ChannelTensor h;
  alloc_tensor(h, cfg);

  const double d0 = cfg.cell_radius_min_m;
  for (int u = 0; u < h.U; ++u)
    for (int b = 0; b < h.B; ++b) {
      double d = rng.uniform(cfg.cell_radius_min_m, cfg.cell_radius_max_m);
      h.distance_m[h.idx_ub(u, b)] = d;
      h.large_scale[h.idx_ub(u, b)] = std::pow(d / d0, -cfg.pathloss_exponent);
    }

  for (size_t i = 0; i < h.gains.size(); ++i) {
    if (opts.unit_fading) {
      // (x^2 + y^2)/2 = 1 exactly
      h.fast_re[i] = 1.0;
      h.fast_im[i] = 1.0;
    } else {
      h.fast_re[i] = rng.normal();
      h.fast_im[i] = rng.normal();
    }
  }
  fill_gains(h);
  return h;
}

ChannelTensor add_channel_noise(const ChannelTensor& h, double noise_var, Rng& rng,
                                bool clamp) {
  if (noise_var < 0.0) throw ConfigError("noise variance must be >= 0");
  ChannelTensor out = h;
  if (noise_var == 0.0) return out;
  double sd = std::sqrt(noise_var);
  for (double& g : out.gains) {
    g += rng.normal(0.0, sd);
    if (clamp && g < 0.0) g = 0.0;
  }
  return out;
}

ChannelTensor generate_contrastive_pair(const ChannelTensor& h, const NetworkConfig& cfg,
                                        Rng& rng, PairMode mode, double corr) {
  if (mode == PairMode::Dissimilar) {
    return generate_channel(cfg, rng);
  }
  if (corr < 0.0 || corr > 1.0) throw ConfigError("corr must be in [0, 1]");
  ChannelTensor out = h;
  const double mix = std::sqrt(1.0 - corr * corr);
  for (size_t i = 0; i < out.gains.size(); ++i) {
    out.fast_re[i] = corr * h.fast_re[i] + mix * rng.normal();
    out.fast_im[i] = corr * h.fast_im[i] + mix * rng.normal();
  }
  fill_gains(out);
  return out;
}

}  // namespace oran
