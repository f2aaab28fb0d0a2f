#include "oran/allocation.hpp"

#include <cmath>

namespace oran {

Allocation Allocation::zero(const NetworkConfig& cfg) {
  Allocation a;
  a.U = cfg.num_ues();
  a.B = cfg.num_rus;
  a.M = cfg.num_prbs;
  a.S = cfg.num_slices();
  a.alpha.assign(static_cast<size_t>(a.U) * a.B * a.S, 0);
  a.beta.assign(static_cast<size_t>(a.U) * a.B * a.M * a.S, 0);
  a.power.assign(static_cast<size_t>(a.U) * a.B * a.M * a.S, 0.0);
  return a;
}

const char* constraint_name(ConstraintId id) {
  switch (id) {
    case ConstraintId::RuPowerCap: return "ru_power_cap";
    case ConstraintId::PowerNegative: return "power_negative";
    case ConstraintId::PowerSliceCap: return "power_slice_cap";
    case ConstraintId::MinRate: return "min_rate";
    case ConstraintId::FronthaulCap: return "fronthaul_cap";
    case ConstraintId::DelayCap: return "delay_cap";
    case ConstraintId::AlphaBinarity: return "alpha_binarity";
    case ConstraintId::BetaBinarity: return "beta_binarity";
    case ConstraintId::Association: return "association";
    case ConstraintId::BetaWithoutAlpha: return "beta_without_alpha";
    case ConstraintId::PrbConflict: return "prb_conflict";
    case ConstraintId::PowerWithoutBeta: return "power_without_beta";
    case ConstraintId::SliceMembership: return "slice_membership";
  }
  return "unknown";
}

double sinr(const ChannelTensor& h, const Allocation& a, const NetworkConfig& cfg,
            int u, int b, int m, int s) {
  double desired = a.a(u, b, s) * h.gain(u, b, m, s) * a.p(u, b, m, s);
  double interference = 0.0;
  for (int j = 0; j < a.B; ++j) {
    if (j == b) continue;
    for (int l = 0; l < a.S; ++l) {
      if (l == s) continue;
      for (int i = 0; i < a.U; ++i) {
        if (i == u) continue;
        if (!a.a(i, j, l)) continue;
        interference += h.gain(i, j, m, l) * a.p(i, j, m, l);
      }
    }
  }
  return desired / (interference + cfg.noise_power_w);
}

double rate_ue(const ChannelTensor& h, const Allocation& a, const NetworkConfig& cfg,
               int u, int s) {
  double r = 0.0;
  for (int b = 0; b < a.B; ++b)
    for (int m = 0; m < a.M; ++m) {
      if (!a.a(u, b, s) || !a.bt(u, b, m, s)) continue;
      r += std::log2(1.0 + sinr(h, a, cfg, u, b, m, s));
    }
  return r;
}

RuPowerFronthaul ru_power_and_fronthaul(const ChannelTensor& h, const Allocation& a,
                                        const NetworkConfig& cfg, int b) {
  double sum = 0.0;
  for (int u = 0; u < a.U; ++u)
    for (int m = 0; m < a.M; ++m)
      for (int s = 0; s < a.S; ++s) {
        if (!a.a(u, b, s)) continue;
        sum += h.gain(u, b, m, s) * a.p(u, b, m, s);
      }
  double p_b = sum + cfg.quant_noise_w;
  return {p_b, std::log2(p_b / cfg.quant_noise_w)};
}

double delay(const NetworkConfig& cfg, double rate_us) {
  if (rate_us <= 0.0) return kInfiniteDelay;
  return cfg.link_length_m / cfg.prop_speed_mps + cfg.mean_packet_bits / rate_us;
}

RateReport compute_report(const ChannelTensor& h, const Allocation& a,
                          const NetworkConfig& cfg) {
  RateReport rep;
  rep.U = a.U;
  rep.S = a.S;
  rep.rate_ue.assign(static_cast<size_t>(a.U) * a.S, 0.0);
  rep.rate_total_ue.assign(a.U, 0.0);
  rep.ru_power.assign(a.B, 0.0);
  rep.fronthaul_rate.assign(a.B, 0.0);
  rep.delay.assign(static_cast<size_t>(a.U) * a.S, kInfiniteDelay);

  for (int u = 0; u < a.U; ++u)
    for (int s = 0; s < a.S; ++s) {
      double r = rate_ue(h, a, cfg, u, s);
      rep.rate_ue[static_cast<size_t>(u) * a.S + s] = r;
      rep.rate_total_ue[u] += r;
      rep.delay[static_cast<size_t>(u) * a.S + s] = delay(cfg, r);
      rep.objective += cfg.slice_weights[s] * r;
    }
  for (int b = 0; b < a.B; ++b) {
    auto pf = ru_power_and_fronthaul(h, a, cfg, b);
    rep.ru_power[b] = pf.p_b;
    rep.fronthaul_rate[b] = pf.c_b;
  }
  return rep;
}

ViolationList check_feasible(const ChannelTensor& h, const Allocation& a,
                             const NetworkConfig& cfg) {
  ViolationList out;
  auto add = [&](ConstraintId id, int u, int b, int m, int s, double measured,
                 double bound) {
    out.push_back({id, u, b, m, s, measured, bound});
  };

  // Binarity and slice membership over the raw arrays.
  for (int u = 0; u < a.U; ++u) {
    int su = cfg.slice_of_ue(u);
    for (int b = 0; b < a.B; ++b)
      for (int s = 0; s < a.S; ++s) {
        uint8_t av = a.a(u, b, s);
        if (av > 1) add(ConstraintId::AlphaBinarity, u, b, -1, s, av, 1);
        if (s != su && av != 0)
          add(ConstraintId::SliceMembership, u, b, -1, s, av, 0);
        for (int m = 0; m < a.M; ++m) {
          uint8_t bv = a.bt(u, b, m, s);
          double pv = a.p(u, b, m, s);
          if (bv > 1) add(ConstraintId::BetaBinarity, u, b, m, s, bv, 1);
          if (s != su && (bv != 0 || pv != 0.0))
            add(ConstraintId::SliceMembership, u, b, m, s, bv != 0 ? bv : pv, 0);
          if (pv < 0.0) add(ConstraintId::PowerNegative, u, b, m, s, pv, 0.0);
          if (pv > cfg.p_slice_max_w[s])
            add(ConstraintId::PowerSliceCap, u, b, m, s, pv, cfg.p_slice_max_w[s]);
          if (bv != 0 && av == 0)
            add(ConstraintId::BetaWithoutAlpha, u, b, m, s, bv, av);
          if (pv > 0.0 && bv == 0)
            add(ConstraintId::PowerWithoutBeta, u, b, m, s, pv, 0.0);
        }
      }
  }

  // Single association per served (u, s).
  for (int u = 0; u < a.U; ++u) {
    int su = cfg.slice_of_ue(u);
    int count = 0;
    for (int b = 0; b < a.B; ++b) count += a.a(u, b, su) ? 1 : 0;
    if (count != 1) add(ConstraintId::Association, u, -1, -1, su, count, 1);
  }

  // One UE per (b, m, s) slot.
  for (int b = 0; b < a.B; ++b)
    for (int m = 0; m < a.M; ++m)
      for (int s = 0; s < a.S; ++s) {
        int count = 0;
        for (int u = 0; u < a.U; ++u)
          count += (a.a(u, b, s) && a.bt(u, b, m, s)) ? 1 : 0;
        if (count > 1) add(ConstraintId::PrbConflict, -1, b, m, s, count, 1);
      }

  // Rates, delays, RU power, fronthaul.
  RateReport rep = compute_report(h, a, cfg);
  for (int u = 0; u < a.U; ++u) {
    int su = cfg.slice_of_ue(u);
    double r = rep.rate(u, su);
    if (r < cfg.r_min[su])
      add(ConstraintId::MinRate, u, -1, -1, su, r, cfg.r_min[su]);
    double d = rep.delay_us(u, su);
    if (!(d <= cfg.d_max_s)) add(ConstraintId::DelayCap, u, -1, -1, su, d, cfg.d_max_s);
  }
  for (int b = 0; b < a.B; ++b) {
    if (rep.ru_power[b] > cfg.p_ru_max_w)
      add(ConstraintId::RuPowerCap, -1, b, -1, -1, rep.ru_power[b], cfg.p_ru_max_w);
    if (rep.fronthaul_rate[b] > cfg.c_fh_max)
      add(ConstraintId::FronthaulCap, -1, b, -1, -1, rep.fronthaul_rate[b], cfg.c_fh_max);
  }
  return out;
}

double objective(const ChannelTensor& h, const Allocation& a, const NetworkConfig& cfg) {
  double total = 0.0;
  for (int s = 0; s < a.S; ++s)
    for (int u = 0; u < a.U; ++u)
      total += cfg.slice_weights[s] * rate_ue(h, a, cfg, u, s);
  return total;
}

}  // namespace oran
