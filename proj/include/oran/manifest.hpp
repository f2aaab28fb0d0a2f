#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace oran {

// FNV-1a 64-bit, hex-encoded. Used to tag configs and checkpoints in
// manifests and provenance sidecars.
uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);
std::string hash_file(const std::string& path);

// Self-describing run record written next to every command's outputs.
// Written atomically (tmp + rename) with status "started" before the work
// and finalized with status "finished" after.
struct RunManifest {
  std::string command;
  std::string config_path;
  std::string config_hash;
  uint64_t seed = 0;
  std::vector<std::string> outputs;
  std::string status;  // started | finished | failed
  std::map<std::string, std::string> extra;  // hyper echo, counters

  void write(const std::string& path) const;
};

}  // namespace oran
