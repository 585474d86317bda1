#pragma once

#include <string>

#include "edgesync/types.hpp"

namespace edgesync {

// Analytic link model: transfers cost payload/bandwidth plus one round trip.
// No sockets anywhere; these formulas are the network.
struct NetworkModel {
  double uplink_bps = 2e6;
  double downlink_bps = 1e7;
  double rtt_s = 0.05;
  double bytes_per_sample = 144.0;  // features + prediction + index record
  double bytes_per_param = 4.0;

  void validate() const;
  double upload_time(std::size_t samples) const;
  double download_time(std::size_t params) const;
};

// Simulated compute costs. Wall-clock of the host never enters results.
struct CostModel {
  double label_cost_s = 0.06;            // teacher inference per sample
  double epoch_cost_base_s = 0.1;        // per-epoch overhead
  double epoch_cost_per_sample_s = 2e-4; // per train-split sample per epoch
  double filter_cost_per_sample_s = 0.0; // edge-side scoring
  double profile_cost_urgency_s = 0.001; // urgency comparison per cycle
  double profile_cost_fixed_s = 0.0001;  // fixed-policy bookkeeping per cycle

  void validate() const;
  double epoch_cost(std::size_t train_samples) const {
    return epoch_cost_base_s +
           epoch_cost_per_sample_s * static_cast<double>(train_samples);
  }
};

enum class PolicyKind {
  no_adapt,      // frozen pre-trained model
  one_time,      // single fine-tune on the first seconds of each stream
  ams_like,      // round robin, full uploads, fixed epochs
  ekya_like,     // fixed windows, online profiling cost, random search
  edgesync,      // filter + urgency + early stop
  edgesync_f,    // ablation: no filter
  edgesync_tf,   // ablation: no dynamic stop, no filter
  edgesync_stf,  // ablation: fixed cadence, round robin, no stop, no filter
  edgesync_star, // fixed epochs but filter on (the no-training-manager variant)
};

PolicyKind parse_policy(const std::string& name);
const char* to_string(PolicyKind kind);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::edgesync;
  int fixed_epochs = 30;
  // edgesync_stf's fixed update period, normally injected from a measured
  // edgesync run's mean cycle time. 0 leaves the policy free-running.
  double stf_cycle_s = 0.0;
  double ekya_window_s = 200.0;
  double ekya_profile_cost_s = 7.84;
  int ekya_profile_trials = 4;
  double one_time_window_s = 100.0;
  double cadence_override_s = 0.0;  // forces a fixed cycle start period

  bool adapts() const { return kind != PolicyKind::no_adapt; }
  bool urgency_selection() const {
    return kind == PolicyKind::edgesync || kind == PolicyKind::edgesync_f ||
           kind == PolicyKind::edgesync_tf;
  }
  bool filters() const {
    return kind == PolicyKind::edgesync || kind == PolicyKind::edgesync_star;
  }
  bool dynamic_stop() const {
    return kind == PolicyKind::edgesync || kind == PolicyKind::edgesync_f ||
           kind == PolicyKind::ekya_like;
  }
  double cadence_s() const {
    if (cadence_override_s > 0.0) return cadence_override_s;
    if (kind == PolicyKind::edgesync_stf) return stf_cycle_s;
    return 0.0;
  }
};

}  // namespace edgesync
