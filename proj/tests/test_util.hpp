#pragma once

#include "oran/channel.hpp"
#include "oran/config.hpp"
#include "oran/power_grid.hpp"

namespace testutil {

// B=1, U=1+1, M=2, S=1+1. Loose QoS so structural choices dominate.
inline oran::NetworkConfig tiny_cfg() {
  oran::NetworkConfig c;
  c.num_rus = 1;
  c.num_ues_embb = 1;
  c.num_ues_urllc = 1;
  c.num_prbs = 2;
  c.num_slices_embb = 1;
  c.num_slices_urllc = 1;
  c.noise_power_w = 1e-12;
  c.quant_noise_w = 1e-3;
  c.p_ru_max_w = 10.0;
  c.p_slice_max_w = {1.0, 1.0};
  c.r_min = {0.01, 0.01};
  c.c_fh_max = 46.0;
  c.d_max_s = 10.0;
  c.link_length_m = 3000.0;
  c.prop_speed_mps = 2e8;
  c.mean_packet_bits = 0.001;
  c.slice_weights = {1.0, 2.0};
  c.cell_radius_min_m = 200.0;
  c.cell_radius_max_m = 500.0;
  c.pathloss_exponent = 3.0;
  c.seed = 1;
  return c;
}

// Single-link scenario with unit noise for hand-computable SINR values.
inline oran::NetworkConfig unit_cfg() {
  oran::NetworkConfig c = tiny_cfg();
  c.num_ues_urllc = 0;
  c.num_slices_urllc = 0;
  c.num_prbs = 1;
  c.noise_power_w = 1.0;
  c.p_slice_max_w = {1.0};
  c.r_min = {0.01};
  c.slice_weights = {1.0};
  return c;
}

// All gains exactly 1 (flat geometry, fading forced to 1).
inline oran::ChannelTensor unit_channel(const oran::NetworkConfig& cfg) {
  oran::NetworkConfig flat = cfg;
  flat.pathloss_exponent = 0.0;
  oran::Rng rng(cfg.seed);
  oran::ChannelGenOptions opts;
  opts.unit_fading = true;
  return oran::generate_channel(flat, rng, opts);
}

// Desk-scale scenario used across solver comparisons:
// B=2, U=2+2, M=3, S=2.
inline oran::NetworkConfig desk_cfg() {
  oran::NetworkConfig c = tiny_cfg();
  c.num_rus = 2;
  c.num_ues_embb = 2;
  c.num_ues_urllc = 2;
  c.num_prbs = 3;
  return c;
}

}  // namespace testutil
