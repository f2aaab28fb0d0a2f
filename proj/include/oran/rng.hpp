#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace oran {

// Deterministic RNG used everywhere generation happens. All draws go through
// explicit transforms of mt19937_64 output (never std::*_distribution, whose
// sequences are implementation-defined), so a seed pins the byte stream of
// every artifact this tool writes.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be > 0.
  uint64_t uniform_int(uint64_t n) {
    uint64_t v = static_cast<uint64_t>(uniform() * static_cast<double>(n));
    return v >= n ? n - 1 : v;
  }

  // Standard normal via Box-Muller. No spare caching: exactly two engine
  // draws per call, which keeps consumption counts predictable.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Unit-mean exponential (Rayleigh fading power).
  double exponential() {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return -std::log(u);
  }

 private:
  std::mt19937_64 engine_;
};

// Per-task seed derivation used by parallel generation: seed XOR task index.
inline uint64_t derive_seed(uint64_t base, uint64_t task_index) {
  return base ^ task_index;
}

}  // namespace oran
