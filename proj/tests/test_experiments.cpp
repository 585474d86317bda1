#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "edgesync/experiments.hpp"

using namespace edgesync;

namespace {

SimConfig tiny_config() {
  SimConfig cfg;
  cfg.duration_s = 250.0;
  cfg.cameras = 2;
  return cfg;
}

ExperimentSpec tiny_spec() {
  ExperimentSpec spec;
  spec.name = "tiny";
  spec.policies = {"no_adapt", "edgesync"};
  spec.seeds = {1, 2};
  spec.streams = "mixed";
  spec.verdicts = {"greater:edgesync:no_adapt"};
  return spec;
}

}  // namespace

TEST_CASE("experiment specs parse from files") {
  const std::string path = "test_exp_spec.txt";
  {
    std::ofstream out(path);
    out << "# comment\n";
    out << "name = demo\n";
    out << "policies = no_adapt,edgesync\n";
    out << "cameras = 2\n";
    out << "seeds = 1,2,3\n";
    out << "streams = mixed\n";
    out << "verdict = greater:edgesync:no_adapt\n";
  }
  const ExperimentSpec spec = parse_experiment_spec(path);
  CHECK(spec.name == "demo");
  CHECK(spec.policies.size() == 2);
  CHECK(spec.seeds.size() == 3);
  CHECK(spec.verdicts.size() == 1);
  std::remove(path.c_str());
}

TEST_CASE("spec validation rejects bad inputs") {
  ExperimentSpec spec = tiny_spec();
  spec.seeds.clear();
  CHECK_THROWS_AS(spec.validate(), ValidationError);

  spec = tiny_spec();
  spec.policies = {"nonsense"};
  CHECK_THROWS_AS(spec.validate(), ValidationError);

  spec = tiny_spec();
  spec.verdicts = {"greater:only_one_part"};
  CHECK_THROWS_AS(spec.validate(), ValidationError);

  spec = tiny_spec();
  spec.seeds = {1};
  CHECK_THROWS_AS(spec.validate(), ValidationError);  // claims need >=2 seeds

  const std::string path = "test_exp_badkey.txt";
  {
    std::ofstream out(path);
    out << "name = x\nbogus_key = 1\n";
  }
  CHECK_THROWS_AS(parse_experiment_spec(path), ValidationError);
  std::remove(path.c_str());
}

TEST_CASE("comparison orders the adaptive policy above the frozen one") {
  const ComparisonTable table = run_comparison(tiny_spec(), tiny_config(), 4);
  REQUIRE(table.groups.size() == 2);
  REQUIRE(table.verdicts.size() == 1);
  CHECK(table.verdicts[0].pass);
  CHECK(table.groups[1].label == "edgesync");
  CHECK(table.groups[1].mean_accuracy > table.groups[0].mean_accuracy);
  for (const GroupStats& g : table.groups) CHECK(g.per_seed.size() == 2);
}

TEST_CASE("verdicts are recomputable from the emitted per-seed csv") {
  const ComparisonTable table = run_comparison(tiny_spec(), tiny_config(), 4);
  const std::string csv = results_csv(table);

  // independent recomputation from the CSV text alone
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  double acc[2][2] = {{0, 0}, {0, 0}};
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string label, policy, cameras, fraction, seed, accuracy;
    std::getline(ls, label, ',');
    std::getline(ls, policy, ',');
    std::getline(ls, cameras, ',');
    std::getline(ls, fraction, ',');
    std::getline(ls, seed, ',');
    std::getline(ls, accuracy, ',');
    const int p = label == "no_adapt" ? 0 : 1;
    const int s = std::stoull(seed) == 1 ? 0 : 1;
    acc[p][s] = std::stod(accuracy);
  }
  int wins = 0;
  for (int s = 0; s < 2; ++s)
    if (acc[1][s] > acc[0][s]) ++wins;
  const double gap =
      ((acc[1][0] + acc[1][1]) - (acc[0][0] + acc[0][1])) / 2.0 * 100.0;
  const bool expect_pass = 2 * wins > 2 && gap >= 1.0;
  CHECK(table.verdicts[0].pass == expect_pass);
}

TEST_CASE("rerunning a spec reproduces the table byte for byte") {
  const ComparisonTable a = run_comparison(tiny_spec(), tiny_config(), 4);
  const ComparisonTable b = run_comparison(tiny_spec(), tiny_config(), 2);
  CHECK(results_csv(a) == results_csv(b));
  CHECK(table_text(a) == table_text(b));
  CHECK(verdicts_text(a) == verdicts_text(b));
}

TEST_CASE("single-policy specs build a table with no verdicts") {
  ExperimentSpec spec = tiny_spec();
  spec.policies = {"no_adapt"};
  spec.verdicts.clear();
  const ComparisonTable table = run_comparison(spec, tiny_config(), 2);
  CHECK(table.groups.size() == 1);
  CHECK(table.verdicts.empty());
}

TEST_CASE("camera sweeps label conditions per count") {
  ExperimentSpec spec = tiny_spec();
  spec.policies = {"no_adapt"};
  spec.camera_counts = {1, 2};
  spec.verdicts = {"flat:no_adapt:50"};
  const ComparisonTable table = run_comparison(spec, tiny_config(), 4);
  REQUIRE(table.groups.size() == 2);
  CHECK(table.groups[0].label == "no_adapt@1");
  CHECK(table.groups[1].label == "no_adapt@2");
  CHECK(table.verdicts[0].pass);
}

TEST_CASE("fraction sweeps carry the swept k into the filter") {
  ExperimentSpec spec;
  spec.name = "ktiny";
  spec.upload_fractions = {0.5, 1.0};
  spec.sweep_policy = "edgesync_star";
  spec.seeds = {1, 2};
  spec.streams = "mixed";
  spec.cadence_s = 50.0;
  const ComparisonTable table = run_comparison(spec, tiny_config(), 4);
  REQUIRE(table.groups.size() == 2);
  CHECK(table.groups[0].label == "k=0.5");
  CHECK(table.groups[0].fraction == 0.5);
  // fewer uploads at k=0.5 means lower upload rate
  CHECK(table.groups[0].per_seed[0].upload_kbps <
        table.groups[1].per_seed[0].upload_kbps);
}

TEST_CASE("ablation requires the edgesync calibration condition") {
  ExperimentSpec spec = tiny_spec();
  spec.mode = "ablation";
  spec.policies = {"edgesync_stf", "edgesync_tf"};
  spec.verdicts.clear();
  CHECK_THROWS_AS(run_ablation(spec, tiny_config(), 2), ValidationError);
}

TEST_CASE("ablation injects the measured cycle time into edgesync_stf") {
  ExperimentSpec spec = tiny_spec();
  spec.mode = "ablation";
  spec.policies = {"edgesync", "edgesync_stf"};
  spec.verdicts.clear();
  const ComparisonTable table = run_ablation(spec, tiny_config(), 4);
  REQUIRE(table.groups.size() == 2);

  // cadence pins the stf cycle starts at or above edgesync's measured mean
  const GroupStats& es = table.groups[0];
  const GroupStats& stf = table.groups[1];
  for (std::size_t s = 0; s < es.per_seed.size(); ++s) {
    CHECK(stf.per_seed[s].mean_cycle_s >= 0.0);
    CHECK(stf.per_seed[s].cycles > 0);
  }
}

TEST_CASE("comparison outputs land atomically in the out dir") {
  namespace fs = std::filesystem;
  const std::string dir = "test_exp_outputs";
  const ComparisonTable table = run_comparison(tiny_spec(), tiny_config(), 4);
  write_comparison_outputs(table, dir);
  CHECK(fs::exists(dir + "/results.csv"));
  CHECK(fs::exists(dir + "/table.txt"));
  CHECK(fs::exists(dir + "/verdicts.txt"));
  CHECK(!fs::exists(dir + "/results.csv.tmp"));
  fs::remove_all(dir);
}
