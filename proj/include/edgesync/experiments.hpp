#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edgesync/config.hpp"
#include "edgesync/sim_kernel.hpp"

namespace edgesync {

// One comparative study: which policies (or camera counts, or upload
// fractions) to run over which seeds, plus the ordering claims to check.
struct ExperimentSpec {
  std::string name;
  std::string mode = "comparison";  // "comparison" | "ablation"
  std::vector<std::string> policies;
  std::vector<int> camera_counts;      // empty -> config default
  std::vector<double> upload_fractions;  // non-empty switches to a k sweep
  std::string sweep_policy;            // policy used for the k sweep
  std::vector<std::uint64_t> seeds;
  std::string streams = "mixed";
  double cadence_s = 0.0;  // forced cycle start period, 0 = free-running
  std::vector<std::string> verdicts;

  void validate() const;
};

ExperimentSpec parse_experiment_spec(const std::string& path);

struct RunOutcome {
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double mean_cycle_s = 0.0;
  double upload_kbps = 0.0;
  double download_kbps = 0.0;
  long cycles = 0;
};

// One experimental condition (policy x cameras x fraction) across all seeds.
struct GroupStats {
  std::string label;
  std::string policy;
  int cameras = 0;
  double fraction = 0.0;  // 0 when not a k sweep
  std::vector<RunOutcome> per_seed;
  double mean_accuracy = 0.0;
  double sd_accuracy = 0.0;
  double mean_cycle_s = 0.0;
};

struct Verdict {
  std::string claim;
  bool pass = false;
  std::string detail;
};

struct ComparisonTable {
  ExperimentSpec spec;
  std::vector<GroupStats> groups;
  std::vector<Verdict> verdicts;
};

// Runs every (condition, seed) simulation, independent runs in parallel up
// to `jobs`, and evaluates the verdicts from the per-seed results alone.
// Ordering claims use the majority + mean-gap rule (gap in accuracy points
// from cfg.ordering_gap_points).
ComparisonTable run_comparison(const ExperimentSpec& spec, const SimConfig& cfg,
                               int jobs = 1);

// The ablation study: requires the edgesync calibration condition, injects
// edgesync's measured mean cycle time into edgesync_stf per seed, then
// delegates to the comparison engine.
ComparisonTable run_ablation(const ExperimentSpec& spec, const SimConfig& cfg,
                             int jobs = 1);

std::string results_csv(const ComparisonTable& table);
std::string table_text(const ComparisonTable& table);
std::string verdicts_text(const ComparisonTable& table);
void write_comparison_outputs(const ComparisonTable& table,
                              const std::string& out_dir);

}  // namespace edgesync
