#pragma once

#include <string>
#include <vector>

#include "edgesync/bho.hpp"
#include "edgesync/network.hpp"
#include "edgesync/sample_filter.hpp"
#include "edgesync/trainer.hpp"
#include "edgesync/types.hpp"

namespace edgesync {

// Every tunable constant in the artifact, grouped by the module it feeds.
// Defaults match the documented values; parse_config_file and
// apply_config_overrides layer a config file and command-line overrides on
// top (defaults < file < flags). Unknown keys are rejected.
struct SimConfig {
  // core
  int classes = 6;
  int feature_dim = 32;

  // sample filter
  FilterConfig filter;

  // urgency
  int bank_capacity = 90;
  int bank_segments = 10;
  double urgency_decay = 0.0;  // sigmoid horizon; 0 selects the segment count

  // trainer
  TrainBudget budget;
  int mini_batch = 32;

  // student hyperparameters (overridden by a profile file when given)
  HyperParams hyper;

  // teacher oracle
  double teacher_error_rate = 0.02;

  // network + compute cost models
  NetworkModel net;
  CostModel costs;

  // simulation shape
  int cameras = 7;
  double duration_s = 1200.0;
  double rate_hz = 2.0;
  std::string stream_source = "mixed";  // "mixed" | "catalog" | directory
  double inference_fps_cap = 30.0;
  double pretrain_s = 40.0;
  int pretrain_epochs = 3;
  int min_window_samples = 40;
  double idle_step_s = 5.0;
  double accuracy_series_resolution_s = 30.0;

  // policy
  PolicyConfig policy;

  // offline profiling / BHO
  EiConfig bho;
  SearchBox box;
  int profile_window_samples = 200;
  int profile_mix_rounds = 3;

  // experiments
  double ordering_gap_points = 1.0;

  void validate() const;
};

// Plain-text "key = value" lines; '#' starts a comment. Returns the pairs in
// file order so overrides apply deterministically.
std::vector<std::pair<std::string, std::string>> parse_config_file(
    const std::string& path);

// Applies one key=value override. Throws ValidationError on unknown keys or
// unparseable values.
void apply_config_override(SimConfig& cfg, const std::string& key,
                           const std::string& value);

void apply_config_overrides(
    SimConfig& cfg,
    const std::vector<std::pair<std::string, std::string>>& pairs);

// All recognized keys (for --help and the annotated default config).
const std::vector<std::string>& config_keys();

}  // namespace edgesync
