#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edgesync/config.hpp"
#include "edgesync/drift_stream.hpp"
#include "edgesync/student_model.hpp"

namespace edgesync {

// Timing/bandwidth breakdown of one cloud update cycle. total() must equal
// the sum of the parts.
struct CycleRecord {
  long cycle_index = 0;
  int edge_id = 0;
  double t_start = 0.0;
  double t_filter = 0.0;
  double t_upload = 0.0;
  double t_label = 0.0;
  double t_profile = 0.0;
  double t_train = 0.0;
  double t_download = 0.0;
  long samples_uploaded = 0;
  long window_size = 0;
  double upload_bytes = 0.0;
  double download_bytes = 0.0;
  int epochs_run = 0;
  std::string stop_reason;
  double d_at_selection = 0.0;        // NaN when urgency played no part
  std::vector<double> urgency_all;    // per-edge degree at selection, NaN if not ready

  double total() const {
    return t_filter + t_upload + t_label + t_profile + t_train + t_download;
  }
  double end_time() const { return t_start + total(); }
};

// One inferred sample: enough to recompute every reported metric from file.
struct SampleTraceRow {
  double time = 0.0;  // arrival time
  int edge_id = 0;
  std::uint64_t seq = 0;
  int true_label = 0;
  int predicted = 0;
  std::uint8_t correct = 0;
};

struct MetricsReport {
  double duration_s = 0.0;
  long total_samples = 0;
  double overall_accuracy = 0.0;
  std::vector<double> per_edge_accuracy;
  std::vector<long> per_edge_samples;

  long cycles = 0;
  double mean_cycle_time = 0.0;
  double mean_t_filter = 0.0;
  double mean_t_upload = 0.0;
  double mean_t_label = 0.0;
  double mean_t_profile = 0.0;
  double mean_t_train = 0.0;
  double mean_t_download = 0.0;
  double mean_epochs = 0.0;

  double upload_bytes = 0.0;
  double download_bytes = 0.0;
  double upload_kbps = 0.0;
  double download_kbps = 0.0;

  // (bucket end time, accuracy over the bucket)
  std::vector<std::pair<double, double>> accuracy_series;
};

struct SimResult {
  MetricsReport report;
  std::vector<CycleRecord> cycles;
  std::vector<SampleTraceRow> trace;
  std::vector<StudentModel> final_models;
};

// Deterministic event simulation of K edges and one serial cloud. Edges infer
// every arriving sample with whatever model they currently hold; the cloud
// repeatedly picks an edge (per policy), pulls its filtered window, labels it
// with the noisy teacher, retrains, and installs the parameter delta at the
// cycle completion time. Identical (streams, config, seed) replay
// bit-identically.
SimResult run_simulation(const std::vector<FeatureStream>& streams,
                         const SimConfig& cfg, RngSeed seed);

// Pure recomputation of the report from the raw traces, so emitted files can
// be audited against it.
MetricsReport metrics_report(const std::vector<SampleTraceRow>& trace,
                             const std::vector<CycleRecord>& cycles,
                             double duration_s, int num_edges,
                             double series_resolution_s);

// CSV / text emitters. All writes go through a temp file and rename.
void write_metrics_csv(const std::vector<CycleRecord>& cycles, int num_edges,
                       const std::string& path);
void write_trace_csv(const std::vector<SampleTraceRow>& trace,
                     const std::string& path);
void write_series_csv(const MetricsReport& report, const std::string& path);
void write_summary(const MetricsReport& report, const SimConfig& cfg,
                   std::uint64_t seed, const std::string& path);
std::string summary_text(const MetricsReport& report, const SimConfig& cfg,
                         std::uint64_t seed);

}  // namespace edgesync
