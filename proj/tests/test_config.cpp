#include <doctest.h>

#include "oran/config.hpp"
#include "oran/errors.hpp"
#include "test_util.hpp"

using namespace oran;

TEST_CASE("config round-trips through its text form") {
  NetworkConfig cfg = testutil::desk_cfg();
  cfg.seed = 1234;
  cfg.r_min = {0.25, 0.125};
  NetworkConfig back = parse_config_text(config_to_text(cfg), "mem");
  CHECK(back.num_rus == cfg.num_rus);
  CHECK(back.num_ues_embb == cfg.num_ues_embb);
  CHECK(back.num_ues_urllc == cfg.num_ues_urllc);
  CHECK(back.num_prbs == cfg.num_prbs);
  CHECK(back.noise_power_w == doctest::Approx(cfg.noise_power_w).epsilon(1e-9));
  CHECK(back.r_min == cfg.r_min);
  CHECK(back.slice_weights == cfg.slice_weights);
  CHECK(back.seed == cfg.seed);
}

TEST_CASE("unknown keys are rejected with the key name") {
  CHECK_THROWS_WITH_AS(parse_config_text("num_rus = 1\nbogus_key = 3\n", "mem"),
                       doctest::Contains("bogus_key"), ConfigError);
}

TEST_CASE("validation catches structural problems") {
  NetworkConfig cfg = testutil::tiny_cfg();
  cfg.cell_radius_min_m = 500;
  cfg.cell_radius_max_m = 200;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = testutil::tiny_cfg();
  cfg.r_min = {0.1};  // needs one entry per slice
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = testutil::tiny_cfg();
  cfg.slice_weights = {1.0, 0.0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = testutil::tiny_cfg();
  cfg.num_ues_embb = 2;
  cfg.num_slices_embb = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("slice membership map cycles within the service type") {
  NetworkConfig cfg = testutil::tiny_cfg();
  cfg.num_ues_embb = 3;
  cfg.num_ues_urllc = 2;
  cfg.num_slices_embb = 2;
  cfg.num_slices_urllc = 1;
  cfg.p_slice_max_w = {1, 1, 1};
  cfg.r_min = {0.01, 0.01, 0.01};
  cfg.slice_weights = {1, 1, 2};
  cfg.validate();
  CHECK(cfg.slice_of_ue(0) == 0);
  CHECK(cfg.slice_of_ue(1) == 1);
  CHECK(cfg.slice_of_ue(2) == 0);
  CHECK(cfg.slice_of_ue(3) == 2);
  CHECK(cfg.slice_of_ue(4) == 2);
}

TEST_CASE("missing config file raises ConfigError naming the path") {
  CHECK_THROWS_WITH_AS(load_config("/nonexistent/path.cfg"),
                       doctest::Contains("/nonexistent/path.cfg"), ConfigError);
}
