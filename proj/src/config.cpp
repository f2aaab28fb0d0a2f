#include "oran/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "oran/errors.hpp"

namespace oran {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<double> parse_vec(const std::string& v, const std::string& key,
                              const std::string& origin) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(origin + ": bad numeric value '" + item + "' for key '" + key + "'");
    }
  }
  if (out.empty())
    throw ConfigError(origin + ": empty value for key '" + key + "'");
  return out;
}

double parse_scalar(const std::string& v, const std::string& key,
                    const std::string& origin) {
  auto vec = parse_vec(v, key, origin);
  if (vec.size() != 1)
    throw ConfigError(origin + ": key '" + key + "' expects a single value");
  return vec[0];
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string fmt_vec(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt(v[i]);
  }
  return out;
}

}  // namespace

void NetworkConfig::validate() const {
  std::vector<std::string> issues;
  auto req = [&](bool ok, const std::string& msg) {
    if (!ok) issues.push_back(msg);
  };

  req(num_rus >= 1, "num_rus must be >= 1");
  req(num_prbs >= 1, "num_prbs must be >= 1");
  req(num_ues_embb >= 0 && num_ues_urllc >= 0, "UE counts must be >= 0");
  req(num_ues() >= 1, "total UE count must be >= 1");
  req(num_slices_embb >= 0 && num_slices_urllc >= 0, "slice counts must be >= 0");
  req(num_slices() >= 1, "total slice count must be >= 1");
  req(num_ues_embb == 0 || num_slices_embb >= 1,
      "eMBB UEs present but num_slices_embb == 0");
  req(num_ues_urllc == 0 || num_slices_urllc >= 1,
      "URLLC UEs present but num_slices_urllc == 0");

  req(prb_bandwidth_hz > 0, "prb_bandwidth_hz must be > 0");
  req(noise_power_w > 0, "noise_power_w must be > 0");
  req(quant_noise_w > 0, "quant_noise_w must be > 0");
  req(p_ru_max_w > 0, "p_ru_max_w must be > 0");
  req(c_fh_max > 0, "c_fh_max must be > 0");
  req(d_max_s > 0, "d_max_s must be > 0");
  req(link_length_m >= 0, "link_length_m must be >= 0");
  req(prop_speed_mps > 0, "prop_speed_mps must be > 0");
  req(mean_packet_bits >= 0, "mean_packet_bits must be >= 0");

  req(static_cast<int>(p_slice_max_w.size()) == num_slices(),
      "p_slice_max_w needs one entry per slice");
  req(static_cast<int>(r_min.size()) == num_slices(),
      "r_min needs one entry per slice");
  req(static_cast<int>(slice_weights.size()) == num_slices(),
      "slice_weights needs one entry per slice");
  for (double v : p_slice_max_w) req(v > 0, "p_slice_max_w entries must be > 0");
  for (double v : r_min) req(v > 0, "r_min entries must be > 0");
  for (double v : slice_weights) req(v > 0, "slice_weights entries must be > 0");

  req(cell_radius_min_m > 0, "cell_radius_min_m must be > 0");
  req(cell_radius_min_m < cell_radius_max_m,
      "cell_radius_min_m must be < cell_radius_max_m");

  if (!issues.empty()) {
    std::string msg = "invalid config:";
    for (const auto& s : issues) msg += "\n  - " + s;
    throw ConfigError(msg);
  }
}

NetworkConfig parse_config_text(const std::string& text, const std::string& origin) {
  NetworkConfig cfg;
  // Vectors are replaced wholesale when their key appears.
  std::map<std::string, bool> seen;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key or value");
    seen[key] = true;

    auto as_int = [&](int& dst) { dst = static_cast<int>(parse_scalar(val, key, origin)); };
    if (key == "schema_version") as_int(cfg.schema_version);
    else if (key == "num_rus") as_int(cfg.num_rus);
    else if (key == "num_ues_embb") as_int(cfg.num_ues_embb);
    else if (key == "num_ues_urllc") as_int(cfg.num_ues_urllc);
    else if (key == "num_prbs") as_int(cfg.num_prbs);
    else if (key == "num_slices_embb") as_int(cfg.num_slices_embb);
    else if (key == "num_slices_urllc") as_int(cfg.num_slices_urllc);
    else if (key == "prb_bandwidth_hz") cfg.prb_bandwidth_hz = parse_scalar(val, key, origin);
    else if (key == "noise_power_w") cfg.noise_power_w = parse_scalar(val, key, origin);
    else if (key == "quant_noise_w") cfg.quant_noise_w = parse_scalar(val, key, origin);
    else if (key == "p_ru_max_w") cfg.p_ru_max_w = parse_scalar(val, key, origin);
    else if (key == "p_slice_max_w") cfg.p_slice_max_w = parse_vec(val, key, origin);
    else if (key == "r_min") cfg.r_min = parse_vec(val, key, origin);
    else if (key == "c_fh_max") cfg.c_fh_max = parse_scalar(val, key, origin);
    else if (key == "d_max_s") cfg.d_max_s = parse_scalar(val, key, origin);
    else if (key == "link_length_m") cfg.link_length_m = parse_scalar(val, key, origin);
    else if (key == "prop_speed_mps") cfg.prop_speed_mps = parse_scalar(val, key, origin);
    else if (key == "mean_packet_bits") cfg.mean_packet_bits = parse_scalar(val, key, origin);
    else if (key == "slice_weights") cfg.slice_weights = parse_vec(val, key, origin);
    else if (key == "cell_radius_min_m") cfg.cell_radius_min_m = parse_scalar(val, key, origin);
    else if (key == "cell_radius_max_m") cfg.cell_radius_max_m = parse_scalar(val, key, origin);
    else if (key == "pathloss_exponent") cfg.pathloss_exponent = parse_scalar(val, key, origin);
    else if (key == "seed") cfg.seed = static_cast<uint64_t>(parse_scalar(val, key, origin));
    else throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  if (cfg.schema_version != 1)
    throw ConfigError(origin + ": unsupported schema_version " +
                      std::to_string(cfg.schema_version));
  cfg.validate();
  return cfg;
}

std::string config_to_text(const NetworkConfig& cfg) {
  std::ostringstream out;
  out << "# Scenario configuration\n";
  out << "schema_version = " << cfg.schema_version << "\n";
  out << "num_rus = " << cfg.num_rus << "              # B\n";
  out << "num_ues_embb = " << cfg.num_ues_embb << "         # U_e\n";
  out << "num_ues_urllc = " << cfg.num_ues_urllc << "        # U_u\n";
  out << "num_prbs = " << cfg.num_prbs << "             # M, per RU\n";
  out << "num_slices_embb = " << cfg.num_slices_embb << "\n";
  out << "num_slices_urllc = " << cfg.num_slices_urllc << "\n";
  out << "prb_bandwidth_hz = " << fmt(cfg.prb_bandwidth_hz) << "   # Hz\n";
  out << "noise_power_w = " << fmt(cfg.noise_power_w)
      << "   # watts, linear (-174 dBm default)\n";
  out << "quant_noise_w = " << fmt(cfg.quant_noise_w) << "   # watts\n";
  out << "p_ru_max_w = " << fmt(cfg.p_ru_max_w) << "   # watts per RU\n";
  out << "p_slice_max_w = " << fmt_vec(cfg.p_slice_max_w) << "   # watts per slice\n";
  out << "r_min = " << fmt_vec(cfg.r_min) << "   # normalized rate per slice\n";
  out << "c_fh_max = " << fmt(cfg.c_fh_max) << "   # normalized fronthaul rate cap\n";
  out << "d_max_s = " << fmt(cfg.d_max_s) << "   # seconds\n";
  out << "link_length_m = " << fmt(cfg.link_length_m)
      << "   # meters, fronthaul+midhaul+backhaul total\n";
  out << "prop_speed_mps = " << fmt(cfg.prop_speed_mps) << "   # m/s\n";
  out << "mean_packet_bits = " << fmt(cfg.mean_packet_bits) << "   # normalized\n";
  out << "slice_weights = " << fmt_vec(cfg.slice_weights) << "   # w_s priorities\n";
  out << "cell_radius_min_m = " << fmt(cfg.cell_radius_min_m) << "   # meters\n";
  out << "cell_radius_max_m = " << fmt(cfg.cell_radius_max_m) << "   # meters\n";
  out << "pathloss_exponent = " << fmt(cfg.pathloss_exponent) << "\n";
  out << "seed = " << cfg.seed << "\n";
  return out.str();
}

NetworkConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

void save_config(const NetworkConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config file: " + path);
  out << config_to_text(cfg);
  if (!out) throw IoError("failed writing config file: " + path);
}

}  // namespace oran
