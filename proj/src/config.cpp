#include "edgesync/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

namespace edgesync {

void NetworkModel::validate() const {
  if (!(uplink_bps > 0) || !(downlink_bps > 0) || !(rtt_s > 0) ||
      !(bytes_per_sample > 0) || !(bytes_per_param > 0))
    throw ValidationError("network model fields must all be positive");
}

double NetworkModel::upload_time(std::size_t samples) const {
  return static_cast<double>(samples) * bytes_per_sample * 8.0 / uplink_bps +
         rtt_s;
}

double NetworkModel::download_time(std::size_t params) const {
  return static_cast<double>(params) * bytes_per_param * 8.0 / downlink_bps +
         rtt_s;
}

void CostModel::validate() const {
  if (label_cost_s < 0 || epoch_cost_base_s < 0 || epoch_cost_per_sample_s < 0 ||
      filter_cost_per_sample_s < 0 || profile_cost_urgency_s < 0 ||
      profile_cost_fixed_s < 0)
    throw ValidationError("cost model fields must be non-negative");
}

PolicyKind parse_policy(const std::string& name) {
  static const std::map<std::string, PolicyKind> kinds{
      {"no_adapt", PolicyKind::no_adapt},
      {"one_time", PolicyKind::one_time},
      {"ams_like", PolicyKind::ams_like},
      {"ekya_like", PolicyKind::ekya_like},
      {"edgesync", PolicyKind::edgesync},
      {"edgesync_f", PolicyKind::edgesync_f},
      {"edgesync_tf", PolicyKind::edgesync_tf},
      {"edgesync_stf", PolicyKind::edgesync_stf},
      {"edgesync_star", PolicyKind::edgesync_star},
  };
  const auto it = kinds.find(name);
  if (it == kinds.end()) throw ValidationError("unknown policy: " + name);
  return it->second;
}

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::no_adapt: return "no_adapt";
    case PolicyKind::one_time: return "one_time";
    case PolicyKind::ams_like: return "ams_like";
    case PolicyKind::ekya_like: return "ekya_like";
    case PolicyKind::edgesync: return "edgesync";
    case PolicyKind::edgesync_f: return "edgesync_f";
    case PolicyKind::edgesync_tf: return "edgesync_tf";
    case PolicyKind::edgesync_stf: return "edgesync_stf";
    case PolicyKind::edgesync_star: return "edgesync_star";
  }
  return "unknown";
}

void SimConfig::validate() const {
  if (classes < 2) throw ValidationError("classes must be >= 2");
  if (feature_dim < 1) throw ValidationError("feature_dim must be >= 1");
  filter.validate();
  if (bank_capacity < 1 || bank_segments < 1 ||
      bank_capacity % bank_segments != 0)
    throw ValidationError("bank_capacity must be a positive multiple of bank_segments");
  if (urgency_decay < 0) throw ValidationError("urgency_decay must be >= 0");
  budget.validate();
  if (mini_batch < 1) throw ValidationError("mini_batch must be >= 1");
  hyper.validate();
  if (!(teacher_error_rate >= 0.0 && teacher_error_rate < 1.0))
    throw ValidationError("teacher_error_rate must lie in [0,1)");
  net.validate();
  costs.validate();
  if (cameras < 1) throw ValidationError("cameras must be >= 1");
  if (!(duration_s > 0)) throw ValidationError("duration_s must be > 0");
  if (!(rate_hz > 0)) throw ValidationError("rate_hz must be > 0");
  if (!(inference_fps_cap > 0))
    throw ValidationError("inference_fps_cap must be > 0");
  if (pretrain_s < 0) throw ValidationError("pretrain_s must be >= 0");
  if (pretrain_epochs < 0) throw ValidationError("pretrain_epochs must be >= 0");
  if (min_window_samples < 1)
    throw ValidationError("min_window_samples must be >= 1");
  if (!(idle_step_s > 0)) throw ValidationError("idle_step_s must be > 0");
  if (!(accuracy_series_resolution_s > 0))
    throw ValidationError("accuracy_series_resolution_s must be > 0");
  if (policy.fixed_epochs < 1)
    throw ValidationError("fixed_epochs must be >= 1");
  if (policy.stf_cycle_s < 0 || policy.cadence_override_s < 0)
    throw ValidationError("cycle cadences must be >= 0");
  if (!(policy.ekya_window_s > 0) || policy.ekya_profile_cost_s < 0 ||
      policy.ekya_profile_trials < 1)
    throw ValidationError("ekya policy constants out of range");
  if (!(policy.one_time_window_s > 0))
    throw ValidationError("one_time_window_s must be > 0");
  bho.validate();
  box.validate();
  if (profile_window_samples < 10)
    throw ValidationError("profile_window_samples must be >= 10");
  if (profile_mix_rounds < 1)
    throw ValidationError("profile_mix_rounds must be >= 1");
  if (!(ordering_gap_points >= 0))
    throw ValidationError("ordering_gap_points must be >= 0");
}

namespace {

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config key " + key + ": not a number: " + value);
  }
}

int to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing");
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ValidationError("config key " + key + ": not an integer: " + value);
  }
}

using Setter = std::function<void(SimConfig&, const std::string& key,
                                  const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  auto d = [](double SimConfig::*field) {
    return [field](SimConfig& c, const std::string& k, const std::string& v) {
      c.*field = to_double(k, v);
    };
  };
  auto i = [](int SimConfig::*field) {
    return [field](SimConfig& c, const std::string& k, const std::string& v) {
      c.*field = to_int(k, v);
    };
  };

  static const std::map<std::string, Setter> table{
      {"classes", i(&SimConfig::classes)},
      {"feature_dim", i(&SimConfig::feature_dim)},

      {"upload_fraction",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.filter.upload_fraction = to_double(k, v);
       }},
      {"alpha",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.filter.alpha = to_double(k, v);
       }},
      {"beta",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.filter.beta = to_double(k, v);
       }},
      {"timeliness_mode",
       [](SimConfig& c, const std::string&, const std::string& v) {
         c.filter.mode = parse_timeliness_mode(v);
       }},

      {"bank_capacity", i(&SimConfig::bank_capacity)},
      {"bank_segments", i(&SimConfig::bank_segments)},
      {"urgency_decay", d(&SimConfig::urgency_decay)},

      {"patience",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.budget.patience = to_int(k, v);
       }},
      {"max_train_time_s",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.budget.max_time_s = to_double(k, v);
       }},
      {"max_epochs",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.budget.max_epochs = to_int(k, v);
       }},
      {"mini_batch", i(&SimConfig::mini_batch)},

      {"learning_rate",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.hyper.learning_rate = to_double(k, v);
       }},
      {"momentum",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.hyper.momentum = to_double(k, v);
       }},
      {"weight_decay",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.hyper.weight_decay = to_double(k, v);
       }},

      {"teacher_error_rate", d(&SimConfig::teacher_error_rate)},

      {"uplink_bps",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.net.uplink_bps = to_double(k, v);
       }},
      {"downlink_bps",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.net.downlink_bps = to_double(k, v);
       }},
      {"rtt_s",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.net.rtt_s = to_double(k, v);
       }},
      {"bytes_per_sample",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.net.bytes_per_sample = to_double(k, v);
       }},
      {"bytes_per_param",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.net.bytes_per_param = to_double(k, v);
       }},

      {"label_cost_s",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.costs.label_cost_s = to_double(k, v);
       }},
      {"epoch_cost_base_s",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.costs.epoch_cost_base_s = to_double(k, v);
       }},
      {"epoch_cost_per_sample_s",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.costs.epoch_cost_per_sample_s = to_double(k, v);
       }},
      {"filter_cost_per_sample_s",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.costs.filter_cost_per_sample_s = to_double(k, v);
       }},
      {"profile_cost_urgency_s",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.costs.profile_cost_urgency_s = to_double(k, v);
       }},
      {"profile_cost_fixed_s",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.costs.profile_cost_fixed_s = to_double(k, v);
       }},

      {"cameras", i(&SimConfig::cameras)},
      {"duration_s", d(&SimConfig::duration_s)},
      {"rate_hz", d(&SimConfig::rate_hz)},
      {"stream_source",
       [](SimConfig& c, const std::string&, const std::string& v) {
         c.stream_source = v;
       }},
      {"inference_fps_cap", d(&SimConfig::inference_fps_cap)},
      {"pretrain_s", d(&SimConfig::pretrain_s)},
      {"pretrain_epochs", i(&SimConfig::pretrain_epochs)},
      {"min_window_samples", i(&SimConfig::min_window_samples)},
      {"idle_step_s", d(&SimConfig::idle_step_s)},
      {"accuracy_series_resolution_s",
       d(&SimConfig::accuracy_series_resolution_s)},

      {"policy",
       [](SimConfig& c, const std::string&, const std::string& v) {
         c.policy.kind = parse_policy(v);
       }},
      {"fixed_epochs",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.policy.fixed_epochs = to_int(k, v);
       }},
      {"stf_cycle_s",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.policy.stf_cycle_s = to_double(k, v);
       }},
      {"cadence_override_s",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.policy.cadence_override_s = to_double(k, v);
       }},
      {"ekya_window_s",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.policy.ekya_window_s = to_double(k, v);
       }},
      {"ekya_profile_cost_s",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.policy.ekya_profile_cost_s = to_double(k, v);
       }},
      {"ekya_profile_trials",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.policy.ekya_profile_trials = to_int(k, v);
       }},
      {"one_time_window_s",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.policy.one_time_window_s = to_double(k, v);
       }},

      {"bho_xi",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.bho.xi = to_double(k, v);
       }},
      {"bho_candidates",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.bho.candidate_count = to_int(k, v);
       }},
      {"bho_init_points",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.bho.init_points = to_int(k, v);
       }},
      {"bho_max_iters",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.bho.max_iters = to_int(k, v);
       }},
      {"bho_improvement_threshold",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.bho.improvement_threshold = to_double(k, v);
       }},
      {"gp_length_scale",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.bho.gp_length_scale = to_double(k, v);
       }},
      {"gp_noise",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.bho.gp_noise = to_double(k, v);
       }},
      {"box_log_lr_lo",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.box.lo[0] = to_double(k, v);
       }},
      {"box_log_lr_hi",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.box.hi[0] = to_double(k, v);
       }},
      {"box_momentum_lo",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.box.lo[1] = to_double(k, v);
       }},
      {"box_momentum_hi",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.box.hi[1] = to_double(k, v);
       }},
      {"box_log_wd_lo",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.box.lo[2] = to_double(k, v);
       }},
      {"box_log_wd_hi",
       [](SimConfig& c, const std::string& k, const std::string& v) {
         c.box.hi[2] = to_double(k, v);
       }},
      {"profile_window_samples", i(&SimConfig::profile_window_samples)},
      {"profile_mix_rounds", i(&SimConfig::profile_mix_rounds)},

      {"ordering_gap_points", d(&SimConfig::ordering_gap_points)},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": empty key or value");
    pairs.emplace_back(key, value);
  }
  return pairs;
}

void apply_config_override(SimConfig& cfg, const std::string& key,
                           const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end())
    throw ValidationError("unknown config key: " + key);
  it->second(cfg, key, value);
}

void apply_config_overrides(
    SimConfig& cfg,
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  for (const auto& [key, value] : pairs) apply_config_override(cfg, key, value);
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [key, _] : setters()) k.push_back(key);
    return k;
  }();
  return keys;
}

}  // namespace edgesync
