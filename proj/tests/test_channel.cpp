#include <cmath>
#include <doctest.h>

#include "oran/channel.hpp"
#include "oran/errors.hpp"
#include "test_util.hpp"

using namespace oran;

TEST_CASE("flat geometry with forced fading gives all-ones gains") {
  NetworkConfig cfg = testutil::desk_cfg();
  cfg.pathloss_exponent = 0.0;
  Rng rng(3);
  ChannelGenOptions opts;
  opts.unit_fading = true;
  ChannelTensor h = generate_channel(cfg, rng, opts);
  for (double g : h.gains) CHECK(g == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("generation is a pure function of the seed") {
  NetworkConfig cfg = testutil::desk_cfg();
  Rng a(99), b(99);
  ChannelTensor ha = generate_channel(cfg, a);
  ChannelTensor hb = generate_channel(cfg, b);
  CHECK(ha.gains == hb.gains);
  CHECK(ha.distance_m == hb.distance_m);
  Rng c(100);
  ChannelTensor hc = generate_channel(cfg, c);
  CHECK(ha.gains != hc.gains);
}

TEST_CASE("fading power is unit-mean exponential") {
  // pathloss off, so each gain is the raw fading draw
  NetworkConfig cfg = testutil::tiny_cfg();
  cfg.pathloss_exponent = 0.0;
  cfg.num_prbs = 25;
  Rng rng(7);
  double acc = 0.0;
  size_t n = 0;
  while (n < 100000) {
    ChannelTensor h = generate_channel(cfg, rng);
    for (double g : h.gains) acc += g;
    n += h.gains.size();
  }
  CHECK(acc / static_cast<double>(n) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("zero augmentation noise is the identity") {
  NetworkConfig cfg = testutil::tiny_cfg();
  Rng rng(5);
  ChannelTensor h = generate_channel(cfg, rng);
  ChannelTensor out = add_channel_noise(h, 0.0, rng);
  CHECK(out.gains == h.gains);
}

TEST_CASE("augmentation noise clamps at zero") {
  NetworkConfig cfg = testutil::tiny_cfg();
  Rng rng(5);
  ChannelTensor h = generate_channel(cfg, rng);
  for (double& g : h.gains) g = 0.001;
  ChannelTensor out = add_channel_noise(h, 100.0, rng);
  bool any_zero = false;
  for (double g : out.gains) {
    CHECK(g >= 0.0);
    if (g == 0.0) any_zero = true;
  }
  CHECK(any_zero);  // huge variance must push some entries negative pre-clamp
}

TEST_CASE("pre-clamp noise matches the requested variance") {
  NetworkConfig cfg = testutil::tiny_cfg();
  cfg.num_prbs = 25;
  Rng rng(11);
  ChannelTensor h = generate_channel(cfg, rng);
  const double var = 0.35;
  double acc = 0.0, acc2 = 0.0;
  size_t n = 0;
  while (n < 100000) {
    ChannelTensor out = add_channel_noise(h, var, rng, /*clamp=*/false);
    for (size_t i = 0; i < h.gains.size(); ++i) {
      double d = out.gains[i] - h.gains[i];
      acc += d;
      acc2 += d * d;
    }
    n += h.gains.size();
  }
  double mean = acc / n;
  double sample_var = acc2 / n - mean * mean;
  CHECK(sample_var == doctest::Approx(var).epsilon(0.05));
  CHECK(std::fabs(mean) < 0.05);
}

namespace {

double entry_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  double ma = 0, mb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  double cov = 0, va = 0, vb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

}  // namespace

TEST_CASE("similar pair with corr=1 reproduces the input") {
  NetworkConfig cfg = testutil::desk_cfg();
  Rng rng(21);
  ChannelTensor h = generate_channel(cfg, rng);
  ChannelTensor pair = generate_contrastive_pair(h, cfg, rng, PairMode::Similar, 1.0);
  for (size_t i = 0; i < h.gains.size(); ++i)
    CHECK(pair.gains[i] == doctest::Approx(h.gains[i]).epsilon(1e-12));
}

TEST_CASE("similar pair with corr=0 decorrelates the fading") {
  NetworkConfig cfg = testutil::tiny_cfg();
  cfg.num_prbs = 25;
  Rng rng(22);
  std::vector<double> orig, redrawn;
  while (orig.size() < 100000) {
    ChannelTensor h = generate_channel(cfg, rng);
    ChannelTensor pair = generate_contrastive_pair(h, cfg, rng, PairMode::Similar, 0.0);
    // compare fading only: divide out the shared geometry
    for (int u = 0; u < h.U; ++u)
      for (int b = 0; b < h.B; ++b) {
        double ls = h.large_scale[h.idx_ub(u, b)];
        for (int m = 0; m < h.M; ++m)
          for (int s = 0; s < h.S; ++s) {
            orig.push_back(h.gain(u, b, m, s) / ls);
            redrawn.push_back(pair.gain(u, b, m, s) / ls);
          }
      }
  }
  CHECK(std::fabs(entry_correlation(orig, redrawn)) < 0.02);
}

TEST_CASE("dissimilar pairs stay uncorrelated with the original") {
  NetworkConfig cfg = testutil::desk_cfg();
  Rng rng(23);
  double corr_sum = 0.0;
  const int pairs = 1000;
  for (int i = 0; i < pairs; ++i) {
    ChannelTensor h = generate_channel(cfg, rng);
    ChannelTensor d = generate_contrastive_pair(h, cfg, rng, PairMode::Dissimilar, 0.9);
    corr_sum += entry_correlation(h.gains, d.gains);
  }
  CHECK(std::fabs(corr_sum / pairs) < 0.1);
}

TEST_CASE("intermediate correlation interpolates on the complex coefficients") {
  NetworkConfig cfg = testutil::tiny_cfg();
  cfg.num_prbs = 25;
  Rng rng(24);
  const double corr = 0.8;
  std::vector<double> a, b;
  while (a.size() < 100000) {
    ChannelTensor h = generate_channel(cfg, rng);
    ChannelTensor pair = generate_contrastive_pair(h, cfg, rng, PairMode::Similar, corr);
    for (size_t i = 0; i < h.fast_re.size(); ++i) {
      a.push_back(h.fast_re[i]);
      b.push_back(pair.fast_re[i]);
    }
  }
  CHECK(entry_correlation(a, b) == doctest::Approx(corr).epsilon(0.02));
}
