#include "edgesync/sim_kernel.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "edgesync/sample_filter.hpp"
#include "edgesync/trainer.hpp"
#include "edgesync/urgency.hpp"

namespace edgesync {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct EdgeState {
  const FeatureStream* stream = nullptr;
  StudentModel model;
  std::size_t cursor = 0;        // next stream index to infer
  double last_pred_time = -1e18; // throughput throttle state
  std::vector<Sample> cache;     // predicted, not yet consumed by a cycle
  long last_trained = -1;        // cycle index of the last update
  AccuracyBank bank;

  EdgeState(const FeatureStream* s, int bank_capacity, int bank_segments)
      : stream(s), bank(bank_capacity, bank_segments) {}
};

class Simulation {
 public:
  Simulation(const std::vector<FeatureStream>& streams, const SimConfig& cfg,
             RngSeed seed)
      : cfg_(cfg), seed_(seed), teacher_rng_(split_seed(seed, "teacher")) {
    cfg_.validate();
    if (static_cast<int>(streams.size()) != cfg_.cameras)
      throw ValidationError(
          "stream count (" + std::to_string(streams.size()) +
          ") does not match configured cameras (" + std::to_string(cfg_.cameras) +
          ")");
    sim_end_ = cfg_.duration_s;
    for (const FeatureStream& s : streams) {
      s.validate();
      if (s.classes != cfg_.classes || s.dim != cfg_.feature_dim)
        throw ValidationError("stream classes/dim do not match the config");
      sim_end_ = std::min(sim_end_, s.duration());
    }
    edges_.reserve(streams.size());
    for (const FeatureStream& s : streams)
      edges_.emplace_back(&s, cfg_.bank_capacity, cfg_.bank_segments);
  }

  SimResult run() {
    pretrain_edges();
    cloud_loop();
    for (std::size_t e = 0; e < edges_.size(); ++e)
      advance_edge(static_cast<int>(e), sim_end_);

    SimResult result;
    result.cycles = std::move(cycles_);
    result.trace = std::move(trace_);
    result.report =
        metrics_report(result.trace, result.cycles, sim_end_,
                       static_cast<int>(edges_.size()),
                       cfg_.accuracy_series_resolution_s);
    for (EdgeState& e : edges_) result.final_models.push_back(std::move(e.model));
    return result;
  }

 private:
  // --- edge side ---------------------------------------------------------

  void pretrain_edges() {
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      EdgeState& edge = edges_[e];
      edge.model = StudentModel(cfg_.classes, cfg_.feature_dim);
      const FeatureStream& s = *edge.stream;
      std::size_t n = 0;
      while (n < s.size() && s.times[n] <= cfg_.pretrain_s) ++n;
      if (n < 5 || cfg_.pretrain_epochs == 0) continue;
      LabeledBatch batch;
      batch.features = s.features.topRows(static_cast<Eigen::Index>(n));
      batch.labels.assign(s.labels.begin(),
                          s.labels.begin() + static_cast<std::ptrdiff_t>(n));
      const TrainOutcome out = fixed_epoch_train(
          edge.model, batch, cfg_.hyper, cfg_.pretrain_epochs,
          [](std::size_t) { return 0.0; },
          split_seed(seed_, "pretrain/" + std::to_string(e)), cfg_.mini_batch);
      if (out.stop_reason != StopReason::divergence)
        edge.model = out.final_model;
    }
  }

  // Infer every sample whose (throttled) prediction time is <= until.
  void advance_edge(int e, double until) {
    EdgeState& edge = edges_[static_cast<std::size_t>(e)];
    const FeatureStream& s = *edge.stream;
    const double min_gap = 1.0 / cfg_.inference_fps_cap;
    while (edge.cursor < s.size()) {
      const double arrival = s.times[edge.cursor];
      if (arrival > sim_end_) break;
      const double pred_time = std::max(arrival, edge.last_pred_time + min_gap);
      if (pred_time > until) break;

      const auto row = static_cast<Eigen::Index>(edge.cursor);
      Sample sample;
      sample.edge_id = e;
      sample.seq = edge.cursor;
      sample.arrival_time = arrival;
      sample.features = s.features.row(row).transpose();
      sample.true_label = s.labels[edge.cursor];
      sample.probs = forward(edge.model, sample.features);
      sample.predicted_label = argmax_lowest(*sample.probs);

      trace_.push_back({arrival, e, sample.seq, sample.true_label,
                        *sample.predicted_label,
                        static_cast<std::uint8_t>(
                            *sample.predicted_label == sample.true_label ? 1 : 0)});
      edge.cache.push_back(std::move(sample));
      edge.last_pred_time = pred_time;
      ++edge.cursor;
    }
  }

  // --- cloud side ---------------------------------------------------------

  bool eligible(int e) const {
    return edges_[static_cast<std::size_t>(e)].cache.size() >=
           static_cast<std::size_t>(cfg_.min_window_samples);
  }

  std::vector<long> last_trained_vector() const {
    std::vector<long> v;
    v.reserve(edges_.size());
    for (const EdgeState& e : edges_) v.push_back(e.last_trained);
    return v;
  }

  // Degrees for the metrics row: every edge's d, NaN while its bank fills.
  std::vector<double> all_degrees() const {
    std::vector<double> d;
    d.reserve(edges_.size());
    for (const EdgeState& e : edges_)
      d.push_back(e.bank.full() ? urgency_degree(e.bank, cfg_.urgency_decay)
                                : kNaN);
    return d;
  }

  int pick_round_robin(std::vector<bool>& served) {
    const int k = static_cast<int>(edges_.size());
    for (int step = 0; step < k; ++step) {
      const int e = (rr_next_ + step) % k;
      if (!served.empty() && served[static_cast<std::size_t>(e)]) continue;
      if (eligible(e)) {
        rr_next_ = (e + 1) % k;
        return e;
      }
    }
    return -1;
  }

  int teacher_label(int true_label) {
    if (cfg_.teacher_error_rate > 0.0 &&
        teacher_rng_.uniform() < cfg_.teacher_error_rate) {
      const int wrong = static_cast<int>(
          teacher_rng_.uniform_int(static_cast<std::uint64_t>(cfg_.classes - 1)));
      return wrong >= true_label ? wrong + 1 : wrong;
    }
    return true_label;
  }

  void cloud_loop() {
    const PolicyConfig& pol = cfg_.policy;
    if (!pol.adapts()) return;

    double t_now = 0.0;
    double last_cycle_start = -std::numeric_limits<double>::infinity();
    long cycle_index = 0;

    // one_time bookkeeping: each edge adapts exactly once
    std::vector<int> one_time_pending;
    if (pol.kind == PolicyKind::one_time)
      for (std::size_t e = 0; e < edges_.size(); ++e)
        one_time_pending.push_back(static_cast<int>(e));

    // ekya bookkeeping: one pass over the fleet per fixed window
    long ekya_window = 0;
    std::vector<bool> ekya_served(edges_.size(), false);

    while (true) {
      // ---- where may the next cycle start?
      double t0 = t_now;
      if (pol.kind == PolicyKind::one_time) {
        if (one_time_pending.empty()) break;
        t0 = std::max(t_now, pol.one_time_window_s);
      } else if (pol.kind == PolicyKind::ekya_like) {
        if (std::all_of(ekya_served.begin(), ekya_served.end(),
                        [](bool b) { return b; })) {
          // next window: the one holding t_now when the fleet pass overran
          // the boundary, else the upcoming one
          const long holding = static_cast<long>(
              std::floor(t_now / pol.ekya_window_s + 1e-12));
          ekya_window = std::max(ekya_window + 1, holding);
          std::fill(ekya_served.begin(), ekya_served.end(), false);
        }
        t0 = std::max(t_now, static_cast<double>(ekya_window) * pol.ekya_window_s);
      } else if (pol.cadence_s() > 0.0) {
        t0 = std::max(t_now, last_cycle_start + pol.cadence_s());
      }
      if (t0 >= sim_end_) break;

      for (std::size_t e = 0; e < edges_.size(); ++e)
        advance_edge(static_cast<int>(e), t0);

      // ---- pick the edge to serve
      int selected = -1;
      double d_selected = kNaN;
      std::vector<double> degrees(edges_.size(), kNaN);

      if (pol.kind == PolicyKind::one_time) {
        selected = one_time_pending.front();
      } else if (pol.urgency_selection()) {
        degrees = all_degrees();
        std::vector<bool> mask(edges_.size());
        bool any = false;
        bool any_unscored = false;
        for (std::size_t e = 0; e < edges_.size(); ++e) {
          mask[e] = eligible(static_cast<int>(e));
          any = any || mask[e];
          any_unscored = any_unscored || (mask[e] && !edges_[e].bank.full());
        }
        if (any_unscored) {
          // bootstrap: an edge with a never-filled bank cannot be scored, and
          // under one-upload-per-cycle it would starve behind ready edges;
          // serve those by staleness until every bank holds n bits
          std::vector<bool> unscored_mask(edges_.size());
          for (std::size_t e = 0; e < edges_.size(); ++e)
            unscored_mask[e] = mask[e] && !edges_[e].bank.full();
          selected = select_edge({}, last_trained_vector(), unscored_mask);
        } else if (any) {
          std::vector<UrgencyReport> ready;
          for (std::size_t e = 0; e < edges_.size(); ++e) {
            if (auto r = urgency_report(static_cast<int>(e), edges_[e].bank,
                                        cfg_.urgency_decay))
              ready.push_back(std::move(*r));
          }
          selected = select_edge(ready, last_trained_vector(), mask);
          d_selected = degrees[static_cast<std::size_t>(selected)];
        }
      } else {
        if (pol.kind == PolicyKind::ekya_like) {
          selected = pick_round_robin(ekya_served);
          if (selected < 0) {
            // nothing trainable left in this window; move to the next one
            std::fill(ekya_served.begin(), ekya_served.end(), true);
            t_now = t0 + cfg_.idle_step_s;
            continue;
          }
          ekya_served[static_cast<std::size_t>(selected)] = true;
        } else {
          std::vector<bool> no_mask;
          selected = pick_round_robin(no_mask);
        }
      }
      if (selected < 0) {
        t_now = t0 + cfg_.idle_step_s;  // no edge has a window yet
        continue;
      }

      EdgeState& edge = edges_[static_cast<std::size_t>(selected)];

      // ---- freeze the window at the cycle start
      std::size_t window_count = edge.cache.size();
      std::size_t window_begin = 0;
      if (pol.kind == PolicyKind::one_time) {
        window_count = 0;
        while (window_count < edge.cache.size() &&
               edge.cache[window_count].arrival_time <= pol.one_time_window_s)
          ++window_count;
      } else if (pol.kind == PolicyKind::ekya_like) {
        // Ekya's window is a fixed time span, not everything since the last
        // update; anything older than the span never trains
        while (window_begin < edge.cache.size() &&
               edge.cache[window_begin].arrival_time < t0 - pol.ekya_window_s)
          ++window_begin;
        window_count = edge.cache.size() - window_begin;
      }
      if (window_count == 0) {
        t_now = t0 + cfg_.idle_step_s;
        continue;
      }
      const std::vector<Sample> window(
          edge.cache.begin() + static_cast<std::ptrdiff_t>(window_begin),
          edge.cache.begin() +
              static_cast<std::ptrdiff_t>(window_begin + window_count));

      // ---- filter / upload set (positions into `window`, arrival order)
      std::vector<std::size_t> upload;
      double t_filter = 0.0;
      if (pol.filters() && cfg_.filter.upload_fraction < 1.0) {
        for (const ScoredSample& s : filter_window(window, cfg_.filter))
          upload.push_back(s.cache_pos);
        std::sort(upload.begin(), upload.end());
        t_filter = cfg_.costs.filter_cost_per_sample_s *
                   static_cast<double>(window.size());
      } else {
        upload.resize(window.size());
        for (std::size_t i = 0; i < upload.size(); ++i) upload[i] = i;
      }
      const std::size_t uploaded = upload.size();

      double t_profile = cfg_.costs.profile_cost_fixed_s;
      if (pol.urgency_selection()) t_profile = cfg_.costs.profile_cost_urgency_s;
      if (pol.kind == PolicyKind::ekya_like) t_profile = pol.ekya_profile_cost_s;

      const double t_upload = cfg_.net.upload_time(uploaded);
      const double t_label =
          cfg_.costs.label_cost_s * static_cast<double>(uploaded);

      // ---- teacher labeling + accuracy bank
      LabeledBatch batch;
      batch.features.resize(static_cast<Eigen::Index>(uploaded), cfg_.feature_dim);
      batch.labels.resize(uploaded);
      for (std::size_t i = 0; i < uploaded; ++i) {
        const Sample& s = window[upload[i]];
        const int teacher = teacher_label(s.true_label);
        batch.features.row(static_cast<Eigen::Index>(i)) = s.features.transpose();
        batch.labels[i] = teacher;
        edge.bank.record(*s.predicted_label, teacher);
      }

      const auto params =
          static_cast<std::size_t>(cfg_.classes * cfg_.feature_dim + cfg_.classes);
      const double t_download = cfg_.net.download_time(params);

      // ---- retrain
      const RngSeed session =
          split_seed(seed_, "cycle/" + std::to_string(cycle_index));
      const EpochCostFn epoch_cost = [this](std::size_t n) {
        return cfg_.costs.epoch_cost(n);
      };
      TrainOutcome outcome;
      switch (pol.kind) {
        case PolicyKind::edgesync:
        case PolicyKind::edgesync_f:
        case PolicyKind::one_time:
          outcome = retrain(edge.model, batch, cfg_.hyper, cfg_.budget,
                            epoch_cost, session, cfg_.mini_batch);
          break;
        case PolicyKind::ekya_like:
          outcome = ekya_cycle(edge, batch, session, epoch_cost);
          break;
        default:  // fixed-epoch training (ams, stf, tf, star)
          outcome = fixed_epoch_train(edge.model, batch, cfg_.hyper,
                                      pol.fixed_epochs, epoch_cost, session,
                                      cfg_.mini_batch);
          break;
      }

      CycleRecord rec;
      rec.cycle_index = cycle_index;
      rec.edge_id = selected;
      rec.t_start = t0;
      rec.t_filter = t_filter;
      rec.t_upload = t_upload;
      rec.t_label = t_label;
      rec.t_profile = t_profile;
      rec.t_train = outcome.train_duration_s;
      rec.t_download = t_download;
      rec.samples_uploaded = static_cast<long>(uploaded);
      rec.window_size = static_cast<long>(window.size());
      rec.upload_bytes =
          static_cast<double>(uploaded) * cfg_.net.bytes_per_sample;
      rec.download_bytes =
          static_cast<double>(params) * cfg_.net.bytes_per_param;
      rec.epochs_run = outcome.epochs_run;
      rec.stop_reason = to_string(outcome.stop_reason);
      rec.d_at_selection = d_selected;
      rec.urgency_all = degrees;
      const double t_end = rec.end_time();

      assert(cycles_.empty() || t0 >= cycles_.back().end_time());

      // old parameters keep serving until the delta lands
      advance_edge(selected, t_end);
      if (outcome.stop_reason != StopReason::skipped &&
          outcome.stop_reason != StopReason::divergence)
        edge.model = outcome.final_model;
      edge.cache.erase(edge.cache.begin(),
                       edge.cache.begin() + static_cast<std::ptrdiff_t>(
                                                window_begin + window_count));
      edge.last_trained = cycle_index;
      cycles_.push_back(std::move(rec));

      if (pol.kind == PolicyKind::one_time)
        one_time_pending.erase(one_time_pending.begin());

      ++cycle_index;
      last_cycle_start = t0;
      t_now = t_end;
    }
  }

  // Ekya-style cycle: flat profiling charge already accounted by the caller;
  // a small random search picks this window's hyperparameters, then an
  // early-terminated retrain runs with them.
  TrainOutcome ekya_cycle(EdgeState& edge, const LabeledBatch& batch,
                          RngSeed session, const EpochCostFn& epoch_cost) {
    Rng trial_rng(split_seed(session, "ekya-trials"));
    const auto zero_cost = [](std::size_t) { return 0.0; };

    // probe on the configured fraction (20%) of the window, few epochs
    const Eigen::Index probe_n =
        std::max<Eigen::Index>(5, batch.size() / 5);
    TrainBudget probe_budget;
    probe_budget.patience = 5;
    probe_budget.max_time_s = cfg_.budget.max_time_s;
    probe_budget.max_epochs = 5;

    HyperParams best_h = cfg_.hyper;
    double best_probe = -1.0;
    if (batch.size() >= 10) {
      const LabeledBatch probe = batch.rows(batch.size() - probe_n, probe_n);
      for (int j = 0; j < cfg_.policy.ekya_profile_trials; ++j) {
        const Eigen::Vector3d u(trial_rng.uniform(), trial_rng.uniform(),
                                trial_rng.uniform());
        const HyperParams h = cfg_.box.to_params(u);
        const double score =
            retrain(edge.model, probe, h, probe_budget, zero_cost,
                    split_seed(session, "probe/" + std::to_string(j)),
                    cfg_.mini_batch)
                .best_eval;
        if (score > best_probe) {
          best_probe = score;
          best_h = h;
        }
      }
    }

    TrainBudget ekya_budget = cfg_.budget;
    ekya_budget.patience = 5;  // Ekya's early-termination setting
    return retrain(edge.model, batch, best_h, ekya_budget, epoch_cost, session,
                   cfg_.mini_batch);
  }

  SimConfig cfg_;
  RngSeed seed_;
  Rng teacher_rng_;
  double sim_end_ = 0.0;
  std::vector<EdgeState> edges_;
  std::vector<CycleRecord> cycles_;
  std::vector<SampleTraceRow> trace_;
  int rr_next_ = 0;
};

}  // namespace

SimResult run_simulation(const std::vector<FeatureStream>& streams,
                         const SimConfig& cfg, RngSeed seed) {
  Simulation sim(streams, cfg, seed);
  return sim.run();
}

MetricsReport metrics_report(const std::vector<SampleTraceRow>& trace,
                             const std::vector<CycleRecord>& cycles,
                             double duration_s, int num_edges,
                             double series_resolution_s) {
  MetricsReport r;
  r.duration_s = duration_s;
  r.per_edge_accuracy.assign(static_cast<std::size_t>(num_edges), 0.0);
  r.per_edge_samples.assign(static_cast<std::size_t>(num_edges), 0);

  std::vector<long> edge_correct(static_cast<std::size_t>(num_edges), 0);
  long correct = 0;
  const auto buckets = static_cast<std::size_t>(
      std::ceil(duration_s / series_resolution_s - 1e-12));
  std::vector<long> bucket_total(buckets, 0), bucket_correct(buckets, 0);

  for (const SampleTraceRow& row : trace) {
    const auto e = static_cast<std::size_t>(row.edge_id);
    ++r.per_edge_samples[e];
    edge_correct[e] += row.correct;
    correct += row.correct;
    if (!bucket_total.empty()) {
      auto b = static_cast<std::size_t>(row.time / series_resolution_s);
      if (b >= buckets) b = buckets - 1;
      ++bucket_total[b];
      bucket_correct[b] += row.correct;
    }
  }
  r.total_samples = static_cast<long>(trace.size());
  r.overall_accuracy =
      r.total_samples ? static_cast<double>(correct) / r.total_samples : 0.0;
  for (int e = 0; e < num_edges; ++e) {
    const auto idx = static_cast<std::size_t>(e);
    r.per_edge_accuracy[idx] =
        r.per_edge_samples[idx]
            ? static_cast<double>(edge_correct[idx]) / r.per_edge_samples[idx]
            : 0.0;
  }
  for (std::size_t b = 0; b < buckets; ++b) {
    if (bucket_total[b] == 0) continue;
    r.accuracy_series.emplace_back(
        std::min(duration_s, (static_cast<double>(b) + 1.0) * series_resolution_s),
        static_cast<double>(bucket_correct[b]) / bucket_total[b]);
  }

  r.cycles = static_cast<long>(cycles.size());
  for (const CycleRecord& c : cycles) {
    r.mean_cycle_time += c.total();
    r.mean_t_filter += c.t_filter;
    r.mean_t_upload += c.t_upload;
    r.mean_t_label += c.t_label;
    r.mean_t_profile += c.t_profile;
    r.mean_t_train += c.t_train;
    r.mean_t_download += c.t_download;
    r.mean_epochs += c.epochs_run;
    r.upload_bytes += c.upload_bytes;
    r.download_bytes += c.download_bytes;
  }
  if (duration_s > 0) {
    r.upload_kbps = r.upload_bytes * 8.0 / duration_s / 1000.0;
    r.download_kbps = r.download_bytes * 8.0 / duration_s / 1000.0;
  }
  if (r.cycles > 0) {
    const auto n = static_cast<double>(r.cycles);
    r.mean_cycle_time /= n;
    r.mean_t_filter /= n;
    r.mean_t_upload /= n;
    r.mean_t_label /= n;
    r.mean_t_profile /= n;
    r.mean_t_train /= n;
    r.mean_t_download /= n;
    r.mean_epochs /= n;
  }
  return r;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void atomic_write(const std::string& path, const std::string& body) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ValidationError("cannot open " + tmp + " for writing");
    out << body;
    if (!out) throw ValidationError("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void write_metrics_csv(const std::vector<CycleRecord>& cycles, int num_edges,
                       const std::string& path) {
  std::ostringstream out;
  out << "cycle,edge,t_start,t_filter,t_upload,t_label,t_profile,t_train,"
         "t_download,t_total,samples_uploaded,window_size,upload_bytes,"
         "download_bytes,epochs,stop_reason,d_selected";
  for (int e = 0; e < num_edges; ++e) out << ",urgency_" << e;
  out << "\n";
  for (const CycleRecord& c : cycles) {
    out << c.cycle_index << ',' << c.edge_id << ',' << fmt(c.t_start) << ','
        << fmt(c.t_filter) << ',' << fmt(c.t_upload) << ',' << fmt(c.t_label)
        << ',' << fmt(c.t_profile) << ',' << fmt(c.t_train) << ','
        << fmt(c.t_download) << ',' << fmt(c.total()) << ','
        << c.samples_uploaded << ',' << c.window_size << ','
        << fmt(c.upload_bytes) << ',' << fmt(c.download_bytes) << ','
        << c.epochs_run << ',' << c.stop_reason << ',' << fmt(c.d_at_selection);
    for (int e = 0; e < num_edges; ++e)
      out << ',' << fmt(c.urgency_all.empty()
                            ? kNaN
                            : c.urgency_all[static_cast<std::size_t>(e)]);
    out << "\n";
  }
  atomic_write(path, out.str());
}

void write_trace_csv(const std::vector<SampleTraceRow>& trace,
                     const std::string& path) {
  std::ostringstream out;
  out << "time,edge,seq,true_label,predicted,correct\n";
  for (const SampleTraceRow& row : trace) {
    out << fmt(row.time) << ',' << row.edge_id << ',' << row.seq << ','
        << row.true_label << ',' << row.predicted << ','
        << static_cast<int>(row.correct) << "\n";
  }
  atomic_write(path, out.str());
}

void write_series_csv(const MetricsReport& report, const std::string& path) {
  std::ostringstream out;
  out << "bucket_end_s,accuracy\n";
  for (const auto& [t, acc] : report.accuracy_series)
    out << fmt(t) << ',' << fmt(acc) << "\n";
  atomic_write(path, out.str());
}

std::string summary_text(const MetricsReport& r, const SimConfig& cfg,
                         std::uint64_t seed) {
  std::ostringstream out;
  char buf[128];
  auto line = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%-26s %.6f\n", key, v);
    out << buf;
  };
  out << "policy                     " << to_string(cfg.policy.kind) << "\n";
  out << "seed                       " << seed << "\n";
  out << "cameras                    " << cfg.cameras << "\n";
  line("duration_s", r.duration_s);
  out << "samples                    " << r.total_samples << "\n";
  line("overall_accuracy", r.overall_accuracy);
  for (std::size_t e = 0; e < r.per_edge_accuracy.size(); ++e) {
    char key[64];
    std::snprintf(key, sizeof key, "edge_%zu_accuracy", e);
    line(key, r.per_edge_accuracy[e]);
  }
  out << "cycles                     " << r.cycles << "\n";
  line("mean_cycle_time_s", r.mean_cycle_time);
  line("mean_filter_time_s", r.mean_t_filter);
  line("mean_upload_time_s", r.mean_t_upload);
  line("mean_label_time_s", r.mean_t_label);
  line("mean_profile_time_s", r.mean_t_profile);
  line("mean_train_time_s", r.mean_t_train);
  line("mean_download_time_s", r.mean_t_download);
  line("mean_epochs", r.mean_epochs);
  line("upload_kbps", r.upload_kbps);
  line("download_kbps", r.download_kbps);
  line("upload_bytes", r.upload_bytes);
  line("download_bytes", r.download_bytes);
  return out.str();
}

void write_summary(const MetricsReport& report, const SimConfig& cfg,
                   std::uint64_t seed, const std::string& path) {
  atomic_write(path, summary_text(report, cfg, seed));
}

}  // namespace edgesync
