// Deliberately plain brute force over the same decision lattice as the
// exhaustive solver, written independently of the library's search code:
// full odometer enumeration, every quantity recomputed from scratch with
// direct loops over the published formulas. Slow on purpose; it exists to
// cross-check solve_esa values and feasibility flags.
#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "oran/channel.hpp"
#include "oran/config.hpp"
#include "oran/power_grid.hpp"

namespace naive {

struct Result {
  bool feasible = false;
  double best = -std::numeric_limits<double>::infinity();
  unsigned long long count = 0;
  unsigned long long feasible_count = 0;
};

inline Result solve(const oran::ChannelTensor& h, const oran::NetworkConfig& cfg,
                    const oran::PowerGrid& grid) {
  const int U = cfg.num_ues();
  const int B = cfg.num_rus;
  const int M = cfg.num_prbs;
  const int S = cfg.num_slices();
  const int P = grid.p_levels;

  auto hidx = [&](int u, int b, int m, int s) {
    return ((static_cast<size_t>(u) * B + b) * M + m) * S + s;
  };

  std::vector<int> slice_of(U);
  for (int u = 0; u < U; ++u) slice_of[u] = cfg.slice_of_ue(u);

  Result res;
  std::vector<int> assoc(U, 0);

  while (true) {
    // Slot option tables for this association.
    struct Option {
      int u;      // -1 = slot unused
      double p;
    };
    std::vector<std::vector<Option>> slot_opts;
    std::vector<int> slot_b, slot_m, slot_s;
    for (int b = 0; b < B; ++b)
      for (int m = 0; m < M; ++m)
        for (int s = 0; s < S; ++s) {
          std::vector<Option> opts;
          opts.push_back({-1, 0.0});
          for (int u = 0; u < U; ++u)
            if (assoc[u] == b && slice_of[u] == s)
              for (int lvl = 1; lvl < P; ++lvl)
                opts.push_back({u, grid.levels[s][lvl]});
          slot_opts.push_back(opts);
          slot_b.push_back(b);
          slot_m.push_back(m);
          slot_s.push_back(s);
        }
    const size_t K = slot_opts.size();
    std::vector<size_t> pick(K, 0);

    while (true) {
      // Materialize alpha/beta/p.
      std::vector<int> alpha(static_cast<size_t>(U) * B * S, 0);
      std::vector<int> beta(static_cast<size_t>(U) * B * M * S, 0);
      std::vector<double> p(static_cast<size_t>(U) * B * M * S, 0.0);
      for (int u = 0; u < U; ++u)
        alpha[(static_cast<size_t>(u) * B + assoc[u]) * S + slice_of[u]] = 1;
      for (size_t k = 0; k < K; ++k) {
        const Option& o = slot_opts[k][pick[k]];
        if (o.u < 0) continue;
        beta[hidx(o.u, slot_b[k], slot_m[k], slot_s[k])] = 1;
        p[hidx(o.u, slot_b[k], slot_m[k], slot_s[k])] = o.p;
      }

      // Rates per served (u, s) straight from the SINR definition.
      std::vector<double> rate(U, 0.0);
      for (int u = 0; u < U; ++u) {
        int s = slice_of[u];
        for (int b = 0; b < B; ++b) {
          if (!alpha[(static_cast<size_t>(u) * B + b) * S + s]) continue;
          for (int m = 0; m < M; ++m) {
            if (!beta[hidx(u, b, m, s)]) continue;
            double num = h.gains[hidx(u, b, m, s)] * p[hidx(u, b, m, s)];
            double den = cfg.noise_power_w;
            for (int j = 0; j < B; ++j) {
              if (j == b) continue;
              for (int l = 0; l < S; ++l) {
                if (l == s) continue;
                for (int i = 0; i < U; ++i) {
                  if (i == u) continue;
                  if (!alpha[(static_cast<size_t>(i) * B + j) * S + l]) continue;
                  den += h.gains[hidx(i, j, m, l)] * p[hidx(i, j, m, l)];
                }
              }
            }
            rate[u] += std::log2(1.0 + num / den);
          }
        }
      }

      // Constraints.
      bool ok = true;
      for (int b = 0; b < B && ok; ++b) {
        double pb = cfg.quant_noise_w;
        for (int u = 0; u < U; ++u)
          for (int m = 0; m < M; ++m)
            for (int s = 0; s < S; ++s)
              if (alpha[(static_cast<size_t>(u) * B + b) * S + s])
                pb += h.gains[hidx(u, b, m, s)] * p[hidx(u, b, m, s)];
        if (pb > cfg.p_ru_max_w) ok = false;
        if (std::log2(pb / cfg.quant_noise_w) > cfg.c_fh_max) ok = false;
      }
      for (int u = 0; u < U && ok; ++u) {
        int s = slice_of[u];
        if (rate[u] < cfg.r_min[s]) ok = false;
        double d = rate[u] > 0.0
                       ? cfg.link_length_m / cfg.prop_speed_mps +
                             cfg.mean_packet_bits / rate[u]
                       : std::numeric_limits<double>::infinity();
        if (!(d <= cfg.d_max_s)) ok = false;
      }

      ++res.count;
      if (ok) {
        ++res.feasible_count;
        double value = 0.0;
        for (int u = 0; u < U; ++u) value += cfg.slice_weights[slice_of[u]] * rate[u];
        if (!res.feasible || value > res.best) {
          res.feasible = true;
          res.best = value;
        }
      }

      // Next slot combination.
      size_t k = K;
      while (k > 0) {
        --k;
        if (++pick[k] < slot_opts[k].size()) break;
        pick[k] = 0;
        if (k == 0) {
          k = SIZE_MAX;
          break;
        }
      }
      if (K == 0 || k == SIZE_MAX) break;
    }

    // Next association.
    int u = U - 1;
    while (u >= 0) {
      if (++assoc[u] < B) break;
      assoc[u] = 0;
      --u;
    }
    if (u < 0) break;
  }
  return res;
}

}  // namespace naive
