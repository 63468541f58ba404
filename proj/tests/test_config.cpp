#include "aos/config.hpp"

#include "doctest.h"

using namespace aos;

TEST_CASE("defaults validate and hash stably") {
  RunConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  std::string h = config_hash_hex(cfg);
  CHECK(h.size() == 16);
  CHECK(h == config_hash_hex(cfg));
  cfg.gamma = 0.95;
  CHECK(h != config_hash_hex(cfg));
}

TEST_CASE("dump and parse round trip") {
  RunConfig cfg;
  cfg.seed = 77;
  cfg.process.chi = 0.3;
  cfg.topo.irs_elements = 25;
  RunConfig back = parse_run_config(dump_run_config(cfg));
  CHECK(dump_run_config(back) == dump_run_config(cfg));
  CHECK(back.seed == 77);
  CHECK(back.process.chi == 0.3);
  CHECK(back.topo.irs_elements == 25);
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_AS(parse_run_config("{\"radioo\": {}}"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("{\"radio\": {\"bandwidth_hzz\": 1}}"),
                  ConfigError);
}

TEST_CASE("domain violations are rejected") {
  CHECK_THROWS_AS(parse_run_config("{\"gamma\": 1.5}"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("{\"gamma\": 0}"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("{\"process\": {\"chi\": -0.1}}"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("{\"topology\": {\"irs_elements\": -1}}"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config("{\"radio\": {\"bandwidth_hz\": -1}}"),
                  ConfigError);
}

TEST_CASE("power fields enter in dBm and land in watts") {
  RunConfig cfg = parse_run_config(
      "{\"radio\": {\"noise_psd_dbm_hz\": -174, \"max_power_dbm\": 30}}");
  CHECK(cfg.radio.noise_psd_w_hz ==
        doctest::Approx(3.9810717055349565e-21).epsilon(1e-12));
  CHECK(cfg.radio.max_power_w == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("relay distance lists must agree with the relay count") {
  CHECK_THROWS_AS(
      parse_run_config("{\"topology\": {\"relays\": 3, \"sn_rs_m\": [1, 2]}}"),
      ConfigError);
}

TEST_CASE("full scale raises the budgets") {
  RunConfig cfg;
  cfg.apply_full_scale();
  CHECK(cfg.online.slots == 200000);
  CHECK(cfg.a2c.slots == 200000);
  CHECK(cfg.offline.iters == 5000);
  CHECK(cfg.cql.iters == 5000);
  CHECK(cfg.experiment.dataset_size == 200000);
  CHECK(cfg.experiment.eval_horizon == 100000);
  CHECK_NOTHROW(cfg.validate());
}
