#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace oran {

// All physical and constraint parameters of one scenario. The scenario file
// on disk mirrors these fields one-to-one (see load_config/save_config).
struct NetworkConfig {
  int schema_version = 1;

  int num_rus = 1;         // B
  int num_ues_embb = 1;    // U_e
  int num_ues_urllc = 1;   // U_u
  int num_prbs = 1;        // M, per RU
  int num_slices_embb = 1; // S_e
  int num_slices_urllc = 1;// S_u

  double prb_bandwidth_hz = 180e3;
  double noise_power_w = 3.9810717055349565e-21;  // -174 dBm
  double quant_noise_w = 1e-3;                    // sigma_1^2

  double p_ru_max_w = 10.0;                 // 40 dBm
  std::vector<double> p_slice_max_w{1.0, 1.0};  // per slice, 30 dBm
  std::vector<double> r_min{0.1, 0.05};     // per slice, normalized rate
  double c_fh_max = 46.0;                   // fronthaul cap, normalized rate
  double d_max_s = 10.0;                    // delay cap, seconds

  double link_length_m = 10e3;   // aggregate fronthaul+midhaul+backhaul
  double prop_speed_mps = 2e8;
  double mean_packet_bits = 0.01;

  std::vector<double> slice_weights{1.0, 2.0};  // w_s

  double cell_radius_min_m = 200.0;
  double cell_radius_max_m = 500.0;
  double pathloss_exponent = 3.0;

  uint64_t seed = 1;

  int num_ues() const { return num_ues_embb + num_ues_urllc; }
  int num_slices() const { return num_slices_embb + num_slices_urllc; }

  // Fixed UE -> slice membership: eMBB UEs come first and cycle through the
  // eMBB slices, URLLC UEs follow and cycle through the URLLC slices.
  int slice_of_ue(int u) const {
    if (u < num_ues_embb) return u % num_slices_embb;
    return num_slices_embb + (u - num_ues_embb) % num_slices_urllc;
  }

  bool ue_is_urllc(int u) const { return u >= num_ues_embb; }

  // Throws ConfigError with every problem listed.
  void validate() const;
};

// Flat key/value scenario file, '#' comments, vectors comma-separated.
NetworkConfig load_config(const std::string& path);
void save_config(const NetworkConfig& cfg, const std::string& path);

// Parse from in-memory text (used by load_config and tests).
NetworkConfig parse_config_text(const std::string& text, const std::string& origin);
std::string config_to_text(const NetworkConfig& cfg);

}  // namespace oran
