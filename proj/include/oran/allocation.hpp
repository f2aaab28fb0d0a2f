#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "oran/channel.hpp"
#include "oran/config.hpp"

namespace oran {

// Decision variables of one scenario: UE association alpha[u][b][s],
// PRB grants beta[u][b][m][s], transmit power p[u][b][m][s] in watts.
struct Allocation {
  int U = 0, B = 0, M = 0, S = 0;
  std::vector<uint8_t> alpha;  // U*B*S
  std::vector<uint8_t> beta;   // U*B*M*S
  std::vector<double> power;   // U*B*M*S

  static Allocation zero(const NetworkConfig& cfg);

  size_t aidx(int u, int b, int s) const {
    return (static_cast<size_t>(u) * B + b) * S + s;
  }
  size_t bidx(int u, int b, int m, int s) const {
    return ((static_cast<size_t>(u) * B + b) * M + m) * S + s;
  }

  uint8_t& a(int u, int b, int s) { return alpha[aidx(u, b, s)]; }
  uint8_t a(int u, int b, int s) const { return alpha[aidx(u, b, s)]; }
  uint8_t& bt(int u, int b, int m, int s) { return beta[bidx(u, b, m, s)]; }
  uint8_t bt(int u, int b, int m, int s) const { return beta[bidx(u, b, m, s)]; }
  double& p(int u, int b, int m, int s) { return power[bidx(u, b, m, s)]; }
  double p(int u, int b, int m, int s) const { return power[bidx(u, b, m, s)]; }

  bool dims_match(const NetworkConfig& cfg) const {
    return U == cfg.num_ues() && B == cfg.num_rus && M == cfg.num_prbs &&
           S == cfg.num_slices();
  }
};

inline constexpr double kInfiniteDelay = std::numeric_limits<double>::infinity();

// Per-scenario rate/power/delay summary and the weighted-throughput objective.
struct RateReport {
  std::vector<double> rate_ue;        // U*S, R_{u,s}
  std::vector<double> rate_total_ue;  // U, sum over s
  std::vector<double> ru_power;       // B, P_b (includes quantization noise)
  std::vector<double> fronthaul_rate; // B, C_b
  std::vector<double> delay;          // U*S, +inf sentinel where rate is 0
  double objective = 0.0;

  int U = 0, S = 0;
  double rate(int u, int s) const { return rate_ue[static_cast<size_t>(u) * S + s]; }
  double delay_us(int u, int s) const { return delay[static_cast<size_t>(u) * S + s]; }
};

enum class ConstraintId {
  RuPowerCap,       // P_b <= P_b^max
  PowerNegative,    // p >= 0
  PowerSliceCap,    // p <= P_s^max
  MinRate,          // R_{u,s} >= R_s^min
  FronthaulCap,     // C_b <= C_b^max
  DelayCap,         // D_{u,s} <= D^max
  AlphaBinarity,    // alpha in {0,1}
  BetaBinarity,     // beta in {0,1}
  Association,      // sum_b alpha = 1 per served (u,s)
  BetaWithoutAlpha, // beta <= alpha
  PrbConflict,      // sum_u alpha*beta <= 1 per (b,m,s)
  PowerWithoutBeta, // p > 0 only where beta = 1
  SliceMembership,  // alpha/beta/p zero outside the UE's own slice
};

const char* constraint_name(ConstraintId id);

struct Violation {
  ConstraintId id;
  int u = -1, b = -1, m = -1, s = -1;  // -1 where the index does not apply
  double measured = 0.0;
  double bound = 0.0;
};

using ViolationList = std::vector<Violation>;

// SINR of (u,b,m,s) exactly as the system model defines it: the interference
// sum runs over j != b, l != s, i != u on the same PRB m.
double sinr(const ChannelTensor& h, const Allocation& a, const NetworkConfig& cfg,
            int u, int b, int m, int s);

// R_{u,s} = sum_b sum_m alpha*beta*log2(1 + SINR).
double rate_ue(const ChannelTensor& h, const Allocation& a, const NetworkConfig& cfg,
               int u, int s);

// P_b = sum alpha*h*p + sigma1^2 and C_b = log2(P_b / sigma1^2).
struct RuPowerFronthaul {
  double p_b;
  double c_b;
};
RuPowerFronthaul ru_power_and_fronthaul(const ChannelTensor& h, const Allocation& a,
                                        const NetworkConfig& cfg, int b);

// D = L/C + mu/R; returns +inf for R <= 0 so infeasible candidates stay
// comparable during search.
double delay(const NetworkConfig& cfg, double rate_us);

RateReport compute_report(const ChannelTensor& h, const Allocation& a,
                          const NetworkConfig& cfg);

// Every constraint of the optimization problem, evaluated on the given
// allocation. Infeasibility is data: the list is empty iff feasible.
ViolationList check_feasible(const ChannelTensor& h, const Allocation& a,
                             const NetworkConfig& cfg);

// sum_s sum_u w_s * R_{u,s}
double objective(const ChannelTensor& h, const Allocation& a, const NetworkConfig& cfg);

}  // namespace oran
