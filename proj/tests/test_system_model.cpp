#include <cmath>
#include <doctest.h>

#include "oran/allocation.hpp"
#include "oran/errors.hpp"
#include "test_util.hpp"

using namespace oran;

namespace {

// Single served link with chosen gain/power and everything else off.
struct SingleLink {
  NetworkConfig cfg;
  ChannelTensor h;
  Allocation a;
};

SingleLink make_single_link(double gain, double power, double noise) {
  SingleLink s;
  s.cfg = testutil::unit_cfg();
  s.cfg.noise_power_w = noise;
  s.h = testutil::unit_channel(s.cfg);
  for (double& g : s.h.gains) g = gain;
  s.a = Allocation::zero(s.cfg);
  s.a.a(0, 0, 0) = 1;
  s.a.bt(0, 0, 0, 0) = 1;
  s.a.p(0, 0, 0, 0) = power;
  return s;
}

}  // namespace

TEST_CASE("sinr is zero at zero power") {
  SingleLink s = make_single_link(1.0, 0.0, 1.0);
  CHECK(sinr(s.h, s.a, s.cfg, 0, 0, 0, 0) == 0.0);
}

TEST_CASE("sinr hand case: h=p=sigma2=1 with no interferers") {
  SingleLink s = make_single_link(1.0, 1.0, 1.0);
  CHECK(std::fabs(sinr(s.h, s.a, s.cfg, 0, 0, 0, 0) - 1.0) <= 1e-12);
  CHECK(std::fabs(rate_ue(s.h, s.a, s.cfg, 0, 0) - 1.0) <= 1e-12);
}

TEST_CASE("sinr hand case: desired 4 over interference 1 plus noise 1") {
  // Interferer must differ in RU, slice, and UE to count (the interference
  // sum excludes matching indices).
  NetworkConfig cfg = testutil::desk_cfg();
  cfg.num_ues_embb = 1;
  cfg.num_ues_urllc = 1;
  cfg.num_prbs = 1;
  cfg.noise_power_w = 1.0;
  ChannelTensor h = testutil::unit_channel(cfg);
  Allocation a = Allocation::zero(cfg);
  // victim: UE0 (eMBB, slice 0) on RU0, gain*power = 4
  a.a(0, 0, 0) = 1;
  a.bt(0, 0, 0, 0) = 1;
  a.p(0, 0, 0, 0) = 1.0;
  h.gains[h.idx(0, 0, 0, 0)] = 4.0;
  // interferer: UE1 (URLLC, slice 1) on RU1, gain*power = 1
  a.a(1, 1, 1) = 1;
  a.bt(1, 1, 0, 1) = 1;
  a.p(1, 1, 0, 1) = 1.0;
  h.gains[h.idx(1, 1, 0, 1)] = 1.0;

  CHECK(std::fabs(sinr(h, a, cfg, 0, 0, 0, 0) - 2.0) <= 1e-12);
  CHECK(std::fabs(rate_ue(h, a, cfg, 0, 0) - std::log2(3.0)) <= 1e-12);
}

TEST_CASE("rates match an independent scalar recomputation on B=1 U=2 M=2") {
  NetworkConfig cfg = testutil::tiny_cfg();
  Rng rng(17);
  ChannelTensor h = generate_channel(cfg, rng);
  Allocation a = Allocation::zero(cfg);
  a.a(0, 0, 0) = 1;
  a.a(1, 0, 1) = 1;
  a.bt(0, 0, 0, 0) = 1;
  a.p(0, 0, 0, 0) = 0.7;
  a.bt(0, 0, 1, 0) = 1;
  a.p(0, 0, 1, 0) = 0.3;
  a.bt(1, 0, 0, 1) = 1;
  a.p(1, 0, 0, 1) = 1.0;

  // B=1: the interference sum over j != b is empty by construction.
  for (int u = 0; u < 2; ++u) {
    int s = cfg.slice_of_ue(u);
    double expect = 0.0;
    for (int m = 0; m < cfg.num_prbs; ++m) {
      if (!a.bt(u, 0, m, s)) continue;
      expect += std::log2(1.0 + h.gain(u, 0, m, s) * a.p(u, 0, m, s) /
                                    cfg.noise_power_w);
    }
    CHECK(rate_ue(h, a, cfg, u, s) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("ru power and fronthaul hand cases") {
  SingleLink s = make_single_link(1.0, 0.0, 1.0);
  auto pf = ru_power_and_fronthaul(s.h, s.a, s.cfg, 0);
  CHECK(pf.p_b == doctest::Approx(s.cfg.quant_noise_w).epsilon(1e-12));
  CHECK(pf.c_b == doctest::Approx(0.0).epsilon(1e-12));

  // alpha*h*p equal to the quantization noise doubles P_b: C_b = 1.
  SingleLink t = make_single_link(1.0, 0.0, 1.0);
  t.a.p(0, 0, 0, 0) = t.cfg.quant_noise_w;
  auto pf2 = ru_power_and_fronthaul(t.h, t.a, t.cfg, 0);
  CHECK(pf2.c_b == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ru power equals a brute-force summation on a random instance") {
  NetworkConfig cfg = testutil::desk_cfg();
  Rng rng(31);
  ChannelTensor h = generate_channel(cfg, rng);
  Allocation a = Allocation::zero(cfg);
  for (int u = 0; u < a.U; ++u) {
    int s = cfg.slice_of_ue(u);
    int b = u % cfg.num_rus;
    a.a(u, b, s) = 1;
    for (int m = 0; m < cfg.num_prbs; ++m) {
      a.bt(u, b, m, s) = 1;
      a.p(u, b, m, s) = 0.1 + 0.05 * u + 0.01 * m;
    }
  }
  for (int b = 0; b < cfg.num_rus; ++b) {
    double sum = cfg.quant_noise_w;
    for (int u = 0; u < a.U; ++u)
      for (int m = 0; m < a.M; ++m)
        for (int s = 0; s < a.S; ++s)
          if (a.a(u, b, s)) sum += h.gain(u, b, m, s) * a.p(u, b, m, s);
    auto pf = ru_power_and_fronthaul(h, a, cfg, b);
    CHECK(pf.p_b == doctest::Approx(sum).epsilon(1e-12));
  }
}

TEST_CASE("delay model") {
  NetworkConfig cfg = testutil::tiny_cfg();
  cfg.link_length_m = 0.0;
  cfg.mean_packet_bits = 0.0;
  CHECK(delay(cfg, 1.0) == 0.0);

  cfg.link_length_m = 3e8;
  cfg.prop_speed_mps = 3e8;
  cfg.mean_packet_bits = 1e-12;
  CHECK(delay(cfg, 1.0) == doctest::Approx(1.0).epsilon(1e-9));

  CHECK(std::isinf(delay(cfg, 0.0)));
}

TEST_CASE("zero allocation violates the minimum rate for every served pair") {
  NetworkConfig cfg = testutil::desk_cfg();
  ChannelTensor h = testutil::unit_channel(cfg);
  Allocation a = Allocation::zero(cfg);
  // associate everyone so only rate/delay constraints fire
  for (int u = 0; u < a.U; ++u) a.a(u, 0, cfg.slice_of_ue(u)) = 1;
  ViolationList v = check_feasible(h, a, cfg);
  int min_rate = 0, delay_cap = 0;
  for (const auto& e : v) {
    if (e.id == ConstraintId::MinRate) ++min_rate;
    if (e.id == ConstraintId::DelayCap) ++delay_cap;
    bool rate_or_delay =
        e.id == ConstraintId::MinRate || e.id == ConstraintId::DelayCap;
    CHECK(rate_or_delay);
  }
  CHECK(min_rate == cfg.num_ues());
  CHECK(delay_cap == cfg.num_ues());  // zero rate -> infinite delay sentinel
}

TEST_CASE("double association is a single violation") {
  NetworkConfig cfg = testutil::tiny_cfg();
  cfg.num_rus = 2;
  ChannelTensor h = testutil::unit_channel(cfg);
  Allocation a = Allocation::zero(cfg);
  a.a(0, 0, 0) = 1;
  a.a(0, 1, 0) = 1;  // UE0 on both RUs
  a.a(1, 0, 1) = 1;
  // give everyone rate so only the association constraint fires
  a.bt(0, 0, 0, 0) = 1;
  a.p(0, 0, 0, 0) = 1.0;
  a.bt(0, 0, 1, 0) = 1;
  a.p(0, 0, 1, 0) = 1.0;
  a.bt(1, 0, 0, 1) = 1;
  a.p(1, 0, 0, 1) = 1.0;
  ViolationList v = check_feasible(h, a, cfg);
  int assoc = 0;
  for (const auto& e : v)
    if (e.id == ConstraintId::Association) {
      ++assoc;
      CHECK(e.u == 0);
      CHECK(e.measured == 2);
    }
  CHECK(assoc == 1);
}

TEST_CASE("objective is the weighted rate sum") {
  SingleLink s = make_single_link(1.0, 1.0, 1.0);  // rate exactly 1
  s.cfg.slice_weights = {2.0};
  CHECK(objective(s.h, s.a, s.cfg) == doctest::Approx(2.0).epsilon(1e-12));

  Allocation zero = Allocation::zero(s.cfg);
  CHECK(objective(s.h, zero, s.cfg) == 0.0);
}

TEST_CASE("objective is linear in the slice weights") {
  NetworkConfig cfg = testutil::desk_cfg();
  Rng rng(41);
  ChannelTensor h = generate_channel(cfg, rng);
  Allocation a = Allocation::zero(cfg);
  for (int u = 0; u < a.U; ++u) {
    int s = cfg.slice_of_ue(u);
    a.a(u, u % cfg.num_rus, s) = 1;
    a.bt(u, u % cfg.num_rus, u % cfg.num_prbs, s) = 1;
    a.p(u, u % cfg.num_rus, u % cfg.num_prbs, s) = 0.5;
  }
  double base = objective(h, a, cfg);
  NetworkConfig scaled = cfg;
  for (double& w : scaled.slice_weights) w *= 3.0;
  CHECK(objective(h, a, scaled) == doctest::Approx(3.0 * base).epsilon(1e-12));
}

TEST_CASE("own power raises own rate, interferer power lowers victim sinr") {
  NetworkConfig cfg = testutil::desk_cfg();
  Rng rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    ChannelTensor h = generate_channel(cfg, rng);
    Allocation a = Allocation::zero(cfg);
    for (int u = 0; u < a.U; ++u) {
      int s = cfg.slice_of_ue(u);
      int b = static_cast<int>(rng.uniform_int(cfg.num_rus));
      a.a(u, b, s) = 1;
      for (int m = 0; m < cfg.num_prbs; ++m) {
        if (rng.uniform() < 0.5) continue;
        bool taken = false;
        for (int u2 = 0; u2 < a.U; ++u2)
          if (u2 != u && a.a(u2, b, s) && a.bt(u2, b, m, s)) taken = true;
        if (taken) continue;
        a.bt(u, b, m, s) = 1;
        a.p(u, b, m, s) = 0.2 + 0.6 * rng.uniform();
      }
    }
    // bump one active grant's power
    for (int u = 0; u < a.U; ++u) {
      int s = cfg.slice_of_ue(u);
      for (int b = 0; b < a.B; ++b)
        for (int m = 0; m < a.M; ++m) {
          if (!a.bt(u, b, m, s)) continue;
          double before = rate_ue(h, a, cfg, u, s);
          Allocation bumped = a;
          bumped.p(u, b, m, s) = std::min(1.0, a.p(u, b, m, s) * 1.5);
          CHECK(rate_ue(h, bumped, cfg, u, s) >= before - 1e-12);

          // victim on the same PRB at another RU and other slice
          for (int v = 0; v < a.U; ++v) {
            int sv = cfg.slice_of_ue(v);
            if (v == u || sv == s) continue;
            for (int bv = 0; bv < a.B; ++bv) {
              if (bv == b || !a.bt(v, bv, m, sv)) continue;
              double sv_before = sinr(h, a, cfg, v, bv, m, sv);
              double sv_after = sinr(h, bumped, cfg, v, bv, m, sv);
              CHECK(sv_after <= sv_before + 1e-15);
            }
          }
        }
    }
  }
}
