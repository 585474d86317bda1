#include "edgesync/offline_profile.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "edgesync/trainer.hpp"

namespace edgesync {

ProfileResult offline_profile_with_objectives(
    const std::vector<std::function<double(const HyperParams&)>>& per_stream,
    const std::function<double(const HyperParams&)>& combined,
    const SearchBox& box, const EiConfig& cfg, RngSeed seed) {
  if (per_stream.size() < 2)
    throw ValidationError("offline profiling needs at least two streams");

  ProfileResult out;
  Eigen::Vector3d unit_sum = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < per_stream.size(); ++i) {
    const OptimizeResult r =
        optimize(per_stream[i], box, cfg,
                 split_seed(seed, "stage1/" + std::to_string(i)));
    out.stage1_optima.push_back(r.best);
    unit_sum += box.to_unit(r.best);
  }
  out.h0 = box.to_params(unit_sum / static_cast<double>(per_stream.size()));

  const OptimizeResult stage2 =
      optimize(combined, box, cfg, split_seed(seed, "stage2"), {out.h0});
  out.best = stage2.best;
  out.best_value = stage2.best_value;
  out.stage2_history = stage2.history;
  return out;
}

namespace {

LabeledBatch stream_window(const FeatureStream& s, std::size_t begin,
                           std::size_t count) {
  LabeledBatch b;
  b.features = s.features.middleRows(static_cast<Eigen::Index>(begin),
                                     static_cast<Eigen::Index>(count));
  b.labels.assign(s.labels.begin() + static_cast<std::ptrdiff_t>(begin),
                  s.labels.begin() + static_cast<std::ptrdiff_t>(begin + count));
  return b;
}

}  // namespace

ProfileResult offline_profile(const std::vector<FeatureStream>& streams,
                              const SimConfig& cfg, RngSeed seed) {
  if (streams.size() < 2)
    throw ValidationError("offline profiling needs at least two streams");
  const auto window = static_cast<std::size_t>(cfg.profile_window_samples);
  for (std::size_t i = 0; i < streams.size(); ++i) {
    if (streams[i].size() < window)
      throw ValidationError("stream " + std::to_string(i) +
                            " is shorter than one profiling window");
    if (streams[i].classes != cfg.classes || streams[i].dim != cfg.feature_dim)
      throw ValidationError("stream " + std::to_string(i) +
                            " does not match the configured classes/dim");
  }

  const auto zero_cost = [](std::size_t) { return 0.0; };

  std::vector<std::function<double(const HyperParams&)>> per_stream;
  for (std::size_t i = 0; i < streams.size(); ++i) {
    const LabeledBatch batch = stream_window(streams[i], 0, window);
    const RngSeed session = split_seed(seed, "stage1-eval/" + std::to_string(i));
    per_stream.push_back([batch, session, &cfg, zero_cost](const HyperParams& h) {
      const StudentModel fresh(cfg.classes, cfg.feature_dim);
      return retrain(fresh, batch, h, cfg.budget, zero_cost, session,
                     cfg.mini_batch)
          .best_eval;
    });
  }

  // stage 2: windows stitched from one random segment per stream, rows
  // shuffled so the validation split mixes all sources
  std::vector<LabeledBatch> mixes;
  {
    Rng rng(split_seed(seed, "stage2-mix"));
    const std::size_t seg =
        std::max<std::size_t>(10, window / streams.size());
    for (int r = 0; r < cfg.profile_mix_rounds; ++r) {
      std::vector<std::size_t> rows;
      LabeledBatch combined;
      combined.features.resize(
          static_cast<Eigen::Index>(seg * streams.size()), cfg.feature_dim);
      combined.labels.resize(seg * streams.size());
      std::size_t at = 0;
      for (const FeatureStream& s : streams) {
        const std::size_t max_begin = s.size() - seg;
        const std::size_t begin =
            static_cast<std::size_t>(rng.uniform_int(max_begin + 1));
        for (std::size_t j = 0; j < seg; ++j, ++at) {
          combined.features.row(static_cast<Eigen::Index>(at)) =
              s.features.row(static_cast<Eigen::Index>(begin + j));
          combined.labels[at] = s.labels[begin + j];
        }
      }
      std::vector<std::size_t> order(combined.labels.size());
      std::iota(order.begin(), order.end(), 0);
      rng.shuffle(order);
      LabeledBatch shuffled;
      shuffled.features.resize(combined.features.rows(), cfg.feature_dim);
      shuffled.labels.resize(combined.labels.size());
      for (std::size_t j = 0; j < order.size(); ++j) {
        shuffled.features.row(static_cast<Eigen::Index>(j)) =
            combined.features.row(static_cast<Eigen::Index>(order[j]));
        shuffled.labels[j] = combined.labels[order[j]];
      }
      mixes.push_back(std::move(shuffled));
    }
  }
  const RngSeed stage2_session = split_seed(seed, "stage2-eval");
  const auto combined_objective = [&mixes, stage2_session, &cfg,
                                   zero_cost](const HyperParams& h) {
    double sum = 0.0;
    for (std::size_t r = 0; r < mixes.size(); ++r) {
      const StudentModel fresh(cfg.classes, cfg.feature_dim);
      sum += retrain(fresh, mixes[r], h, cfg.budget, zero_cost,
                     split_seed(stage2_session, std::to_string(r)),
                     cfg.mini_batch)
                 .best_eval;
    }
    return sum / static_cast<double>(mixes.size());
  };

  return offline_profile_with_objectives(per_stream, combined_objective,
                                          cfg.box, cfg.bho, seed);
}

namespace {

void write_params(std::ofstream& out, const char* prefix,
                  const HyperParams& h) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s %.17g %.17g %.17g", prefix,
                h.learning_rate, h.momentum, h.weight_decay);
  out << buf << "\n";
}

}  // namespace

void save_profile(const ProfileResult& result, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ValidationError("cannot open " + tmp + " for writing");
    char buf[160];
    out << "EDGESYNC-PROFILE v1\n";
    std::snprintf(buf, sizeof buf, "learning_rate = %.17g",
                  result.best.learning_rate);
    out << buf << "\n";
    std::snprintf(buf, sizeof buf, "momentum = %.17g", result.best.momentum);
    out << buf << "\n";
    std::snprintf(buf, sizeof buf, "weight_decay = %.17g",
                  result.best.weight_decay);
    out << buf << "\n";
    std::snprintf(buf, sizeof buf, "best_value = %.17g", result.best_value);
    out << buf << "\n";
    write_params(out, "h0", result.h0);
    for (const HyperParams& h : result.stage1_optima)
      write_params(out, "stage1_optimum", h);
    for (const Observation& o : result.stage2_history) {
      std::snprintf(buf, sizeof buf, "history %.17g %.17g %.17g %.17g %d",
                    o.params.learning_rate, o.params.momentum,
                    o.params.weight_decay, o.value, o.finite ? 1 : 0);
      out << buf << "\n";
    }
    if (!out) throw ValidationError("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

HyperParams load_profile_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open profile file " + path);
  std::string line;
  if (!std::getline(in, line) || line != "EDGESYNC-PROFILE v1")
    throw ParseError(path + ": bad profile header");
  HyperParams h;
  bool have_lr = false, have_mom = false, have_wd = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key, eq;
    double value = 0.0;
    if (!(ls >> key)) continue;
    if (key == "learning_rate" && (ls >> eq >> value) && eq == "=") {
      h.learning_rate = value;
      have_lr = true;
    } else if (key == "momentum" && (ls >> eq >> value) && eq == "=") {
      h.momentum = value;
      have_mom = true;
    } else if (key == "weight_decay" && (ls >> eq >> value) && eq == "=") {
      h.weight_decay = value;
      have_wd = true;
    }
  }
  if (!have_lr || !have_mom || !have_wd)
    throw ParseError(path + ": profile missing hyperparameter triple");
  h.validate();
  return h;
}

}  // namespace edgesync
