#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "edgesync/config.hpp"

using namespace edgesync;

TEST_CASE("defaults validate as documented") {
  SimConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.classes == 6);
  CHECK(cfg.feature_dim == 32);
  CHECK(cfg.filter.upload_fraction == 0.7);
  CHECK(cfg.filter.alpha == 1.0);
  CHECK(cfg.filter.beta == 1.0);
  CHECK(cfg.bank_capacity == 90);
  CHECK(cfg.bank_segments == 10);
  CHECK(cfg.budget.patience == 5);
  CHECK(cfg.costs.label_cost_s == 0.06);
  CHECK(cfg.cameras == 7);
  CHECK(cfg.policy.ekya_profile_cost_s == 7.84);
  CHECK(cfg.policy.one_time_window_s == 100.0);
  CHECK(cfg.policy.ekya_window_s == 200.0);
  CHECK(cfg.bho.init_points == 8);
  CHECK(cfg.bho.candidate_count == 1000);
  CHECK(cfg.bho.improvement_threshold == 0.002);
}

TEST_CASE("config files parse and apply in order") {
  const std::string path = "test_config_file.conf";
  {
    std::ofstream out(path);
    out << "# a comment line\n";
    out << "patience = 9\n";
    out << "upload_fraction = 0.5   # trailing comment\n";
    out << "policy = ams_like\n";
    out << "patience = 11\n";  // later entries win
  }
  SimConfig cfg;
  apply_config_overrides(cfg, parse_config_file(path));
  CHECK(cfg.budget.patience == 11);
  CHECK(cfg.filter.upload_fraction == 0.5);
  CHECK(cfg.policy.kind == PolicyKind::ams_like);
  std::remove(path.c_str());
}

TEST_CASE("unknown keys and malformed values are rejected") {
  SimConfig cfg;
  CHECK_THROWS_AS(apply_config_override(cfg, "no_such_key", "1"),
                  ValidationError);
  CHECK_THROWS_AS(apply_config_override(cfg, "patience", "five"),
                  ValidationError);
  CHECK_THROWS_AS(apply_config_override(cfg, "learning_rate", "0.1x"),
                  ValidationError);
  CHECK_THROWS_AS(apply_config_override(cfg, "policy", "bogus"),
                  ValidationError);

  const std::string path = "test_config_bad.conf";
  {
    std::ofstream out(path);
    out << "patience 9\n";  // missing '='
  }
  CHECK_THROWS_AS(parse_config_file(path), ParseError);
  std::remove(path.c_str());
}

TEST_CASE("validation gates run before any work starts") {
  SimConfig cfg;
  cfg.bank_capacity = 91;  // not divisible by segments
  CHECK_THROWS_AS(cfg.validate(), ValidationError);

  cfg = SimConfig{};
  cfg.filter.upload_fraction = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);

  cfg = SimConfig{};
  cfg.teacher_error_rate = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);

  cfg = SimConfig{};
  cfg.net.rtt_s = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("every advertised key has a setter") {
  SimConfig cfg;
  for (const std::string& key : config_keys()) {
    if (key == "policy") {
      CHECK_NOTHROW(apply_config_override(cfg, key, "edgesync"));
    } else if (key == "timeliness_mode") {
      CHECK_NOTHROW(apply_config_override(cfg, key, "recency"));
    } else if (key == "stream_source") {
      CHECK_NOTHROW(apply_config_override(cfg, key, "mixed"));
    } else {
      CHECK_NOTHROW(apply_config_override(cfg, key, "1"));
    }
  }
}

TEST_CASE("policy names round-trip") {
  for (const char* name :
       {"no_adapt", "one_time", "ams_like", "ekya_like", "edgesync",
        "edgesync_f", "edgesync_tf", "edgesync_stf", "edgesync_star"}) {
    CHECK(std::string(to_string(parse_policy(name))) == name);
  }
}
