#include "edgesync/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "edgesync/drift_stream.hpp"

namespace edgesync {

namespace {

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fraction_label(double k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "k=%g", k);
  return buf;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (name.empty()) throw ValidationError("experiment spec needs a name");
  if (mode != "comparison" && mode != "ablation")
    throw ValidationError("experiment mode must be comparison or ablation");
  if (seeds.empty()) throw ValidationError("experiment spec needs seeds");
  if (!upload_fractions.empty()) {
    if (sweep_policy.empty())
      throw ValidationError("a fraction sweep needs sweep_policy");
    parse_policy(sweep_policy);
    for (double k : upload_fractions)
      if (!(k > 0.0 && k <= 1.0))
        throw ValidationError("sweep fractions must lie in (0,1]");
  } else if (policies.empty()) {
    throw ValidationError("experiment spec needs policies or fractions");
  }
  for (const std::string& p : policies) parse_policy(p);
  for (int c : camera_counts)
    if (c < 1) throw ValidationError("camera counts must be >= 1");
  if (cadence_s < 0) throw ValidationError("cadence_s must be >= 0");
  for (const std::string& v : verdicts) {
    const auto parts = split_list(v, ':');
    if (parts.empty()) throw ValidationError("empty verdict");
    const std::string& kind = parts[0];
    const std::size_t n = parts.size();
    const bool ok = (kind == "greater" && n == 3) ||
                    (kind == "between" && n == 4) ||
                    (kind == "noninc" && n == 2) ||
                    (kind == "flat" && n == 3) ||
                    (kind == "interior_max" && n == 1) ||
                    (kind == "below_max" && n == 3);
    if (!ok) throw ValidationError("malformed verdict: " + v);
  }
  if (verdicts.size() >= 1 && seeds.size() < 2)
    throw ValidationError("ordering claims need at least 2 seeds");
}

ExperimentSpec parse_experiment_spec(const std::string& path) {
  ExperimentSpec spec;
  for (const auto& [key, value] : parse_config_file(path)) {
    if (key == "name") {
      spec.name = value;
    } else if (key == "mode") {
      spec.mode = value;
    } else if (key == "policies") {
      spec.policies = split_list(value);
    } else if (key == "cameras") {
      for (const std::string& c : split_list(value))
        spec.camera_counts.push_back(std::stoi(c));
    } else if (key == "fractions") {
      for (const std::string& f : split_list(value))
        spec.upload_fractions.push_back(std::stod(f));
    } else if (key == "sweep_policy") {
      spec.sweep_policy = value;
    } else if (key == "seeds") {
      for (const std::string& s : split_list(value))
        spec.seeds.push_back(std::stoull(s));
    } else if (key == "streams") {
      spec.streams = value;
    } else if (key == "cadence_s") {
      spec.cadence_s = std::stod(value);
    } else if (key == "verdict") {
      spec.verdicts.push_back(value);
    } else {
      throw ValidationError(path + ": unknown experiment key: " + key);
    }
  }
  spec.validate();
  return spec;
}

namespace {

struct Condition {
  std::string label;
  std::string policy;
  int cameras = 0;
  double fraction = 0.0;
};

std::vector<Condition> build_conditions(const ExperimentSpec& spec,
                                        const SimConfig& cfg) {
  std::vector<int> counts =
      spec.camera_counts.empty() ? std::vector<int>{cfg.cameras}
                                 : spec.camera_counts;
  std::vector<Condition> conds;
  if (!spec.upload_fractions.empty()) {
    if (counts.size() != 1)
      throw ValidationError("fraction sweeps use a single camera count");
    for (double k : spec.upload_fractions)
      conds.push_back({fraction_label(k), spec.sweep_policy, counts[0], k});
    return conds;
  }
  for (const std::string& p : spec.policies) {
    for (int c : counts) {
      std::string label = p;
      if (counts.size() > 1) label += "@" + std::to_string(c);
      conds.push_back({label, p, c, 0.0});
    }
  }
  return conds;
}

RunOutcome execute_run(const ExperimentSpec& spec, const SimConfig& base,
                       const Condition& cond, std::uint64_t seed,
                       double stf_cycle_s) {
  SimConfig cfg = base;
  cfg.cameras = cond.cameras;
  cfg.stream_source = spec.streams;
  cfg.policy.kind = parse_policy(cond.policy);
  if (cond.fraction > 0.0) cfg.filter.upload_fraction = cond.fraction;
  if (spec.cadence_s > 0.0) cfg.policy.cadence_override_s = spec.cadence_s;
  if (stf_cycle_s > 0.0) cfg.policy.stf_cycle_s = stf_cycle_s;
  cfg.validate();

  const std::vector<FeatureStream> streams =
      build_streams(cfg.stream_source, cfg.cameras, RngSeed{seed},
                    cfg.duration_s, cfg.classes, cfg.feature_dim);
  const SimResult result = run_simulation(streams, cfg, RngSeed{seed});

  RunOutcome out;
  out.seed = seed;
  out.accuracy = result.report.overall_accuracy;
  out.mean_cycle_s = result.report.mean_cycle_time;
  out.upload_kbps = result.report.upload_kbps;
  out.download_kbps = result.report.download_kbps;
  out.cycles = result.report.cycles;
  return out;
}

void run_parallel(std::vector<std::function<void()>>& tasks, int jobs) {
  if (tasks.empty()) return;
  const int workers = std::max(
      1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  if (workers == 1) {
    for (auto& t : tasks) t();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(tasks.size());
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        tasks[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

GroupStats summarize(const Condition& cond,
                     const std::vector<RunOutcome>& per_seed) {
  GroupStats g;
  g.label = cond.label;
  g.policy = cond.policy;
  g.cameras = cond.cameras;
  g.fraction = cond.fraction;
  g.per_seed = per_seed;
  double sum = 0.0, cyc = 0.0;
  for (const RunOutcome& r : per_seed) {
    sum += r.accuracy;
    cyc += r.mean_cycle_s;
  }
  const auto n = static_cast<double>(per_seed.size());
  g.mean_accuracy = sum / n;
  g.mean_cycle_s = cyc / n;
  if (per_seed.size() > 1) {
    double ss = 0.0;
    for (const RunOutcome& r : per_seed) {
      const double d = r.accuracy - g.mean_accuracy;
      ss += d * d;
    }
    g.sd_accuracy = std::sqrt(ss / (n - 1.0));
  }
  return g;
}

const GroupStats& find_group(const ComparisonTable& table,
                             const std::string& label) {
  for (const GroupStats& g : table.groups)
    if (g.label == label) return g;
  throw ValidationError("verdict references unknown condition: " + label);
}

Verdict evaluate_verdict(const ComparisonTable& table, const SimConfig& cfg,
                         const std::string& claim) {
  const auto parts = split_list(claim, ':');
  const std::string& kind = parts[0];
  char buf[256];
  Verdict v;
  v.claim = claim;

  if (kind == "greater") {
    const GroupStats& a = find_group(table, parts[1]);
    const GroupStats& b = find_group(table, parts[2]);
    int wins = 0;
    for (std::size_t i = 0; i < a.per_seed.size(); ++i)
      if (a.per_seed[i].accuracy > b.per_seed[i].accuracy) ++wins;
    const double gap_pts = (a.mean_accuracy - b.mean_accuracy) * 100.0;
    v.pass = (2 * wins > static_cast<int>(a.per_seed.size())) &&
             gap_pts >= cfg.ordering_gap_points;
    std::snprintf(buf, sizeof buf,
                  "mean %.2f%% vs %.2f%%, gap=%.2fpts (need >=%.2f), wins=%d/%zu",
                  a.mean_accuracy * 100.0, b.mean_accuracy * 100.0, gap_pts,
                  cfg.ordering_gap_points, wins, a.per_seed.size());
    v.detail = buf;
    return v;
  }

  if (kind == "between") {
    const GroupStats& x = find_group(table, parts[1]);
    const GroupStats& lo = find_group(table, parts[2]);
    const GroupStats& hi = find_group(table, parts[3]);
    v.pass = lo.mean_accuracy <= x.mean_accuracy &&
             x.mean_accuracy <= hi.mean_accuracy;
    std::snprintf(buf, sizeof buf, "%.2f%% <= %.2f%% <= %.2f%%",
                  lo.mean_accuracy * 100.0, x.mean_accuracy * 100.0,
                  hi.mean_accuracy * 100.0);
    v.detail = buf;
    return v;
  }

  if (kind == "noninc" || kind == "flat") {
    // per-camera-count means for one policy, in spec order
    std::vector<const GroupStats*> series;
    for (const GroupStats& g : table.groups)
      if (g.policy == parts[1]) series.push_back(&g);
    if (series.size() < 2)
      throw ValidationError("verdict " + claim + " needs a camera sweep");
    std::ostringstream detail;
    double lo = 1.0, hi = 0.0;
    bool monotone = true;
    for (std::size_t i = 0; i < series.size(); ++i) {
      const double m = series[i]->mean_accuracy;
      lo = std::min(lo, m);
      hi = std::max(hi, m);
      if (i > 0 && m > series[i - 1]->mean_accuracy + 1e-12) monotone = false;
      if (i) detail << " -> ";
      detail << series[i]->label << "=" << std::fixed;
      std::snprintf(buf, sizeof buf, "%.2f%%", m * 100.0);
      detail << buf;
    }
    if (kind == "noninc") {
      v.pass = monotone;
    } else {
      const double range_limit = std::stod(parts[2]);
      const double range_pts = (hi - lo) * 100.0;
      v.pass = range_pts < range_limit;
      std::snprintf(buf, sizeof buf, " (range %.2fpts, limit %.2f)", range_pts,
                    range_limit);
      detail << buf;
    }
    v.detail = detail.str();
    return v;
  }

  if (kind == "interior_max" || kind == "below_max") {
    std::vector<const GroupStats*> ks;
    for (const GroupStats& g : table.groups)
      if (g.fraction > 0.0) ks.push_back(&g);
    if (ks.size() < 2)
      throw ValidationError("verdict " + claim + " needs a fraction sweep");
    const GroupStats* best = ks[0];
    double max_fraction = 0.0;
    for (const GroupStats* g : ks) {
      if (g->mean_accuracy > best->mean_accuracy) best = g;
      max_fraction = std::max(max_fraction, g->fraction);
    }
    if (kind == "interior_max") {
      v.pass = best->fraction < max_fraction;
      std::snprintf(buf, sizeof buf, "max accuracy %.2f%% at %s (largest k=%g)",
                    best->mean_accuracy * 100.0, best->label.c_str(),
                    max_fraction);
      v.detail = buf;
      return v;
    }
    const double k_ref = std::stod(parts[1]);
    const double need_pts = std::stod(parts[2]);
    const GroupStats* ref = nullptr;
    for (const GroupStats* g : ks)
      if (std::abs(g->fraction - k_ref) < 1e-9) ref = g;
    if (!ref)
      throw ValidationError("verdict references missing fraction: " + parts[1]);
    const double gap_pts = (best->mean_accuracy - ref->mean_accuracy) * 100.0;
    v.pass = gap_pts >= need_pts;
    std::snprintf(buf, sizeof buf,
                  "k=%g at %.2f%% vs max %.2f%%, gap=%.2fpts (need >=%.2f)",
                  k_ref, ref->mean_accuracy * 100.0,
                  best->mean_accuracy * 100.0, gap_pts, need_pts);
    v.detail = buf;
    return v;
  }

  throw ValidationError("unknown verdict kind: " + kind);
}

ComparisonTable run_matrix(const ExperimentSpec& spec, const SimConfig& cfg,
                           int jobs,
                           const std::map<std::uint64_t, double>& stf_cycles) {
  spec.validate();
  const std::vector<Condition> conds = build_conditions(spec, cfg);

  std::vector<std::vector<RunOutcome>> results(
      conds.size(), std::vector<RunOutcome>(spec.seeds.size()));
  std::vector<std::function<void()>> tasks;
  for (std::size_t c = 0; c < conds.size(); ++c) {
    for (std::size_t s = 0; s < spec.seeds.size(); ++s) {
      tasks.push_back([&, c, s] {
        double stf = 0.0;
        if (conds[c].policy == "edgesync_stf") {
          const auto it = stf_cycles.find(spec.seeds[s]);
          if (it != stf_cycles.end()) stf = it->second;
        }
        results[c][s] = execute_run(spec, cfg, conds[c], spec.seeds[s], stf);
      });
    }
  }
  run_parallel(tasks, jobs);

  ComparisonTable table;
  table.spec = spec;
  for (std::size_t c = 0; c < conds.size(); ++c)
    table.groups.push_back(summarize(conds[c], results[c]));
  for (const std::string& claim : spec.verdicts)
    table.verdicts.push_back(evaluate_verdict(table, cfg, claim));
  return table;
}

}  // namespace

ComparisonTable run_comparison(const ExperimentSpec& spec, const SimConfig& cfg,
                               int jobs) {
  if (spec.mode == "ablation") return run_ablation(spec, cfg, jobs);
  bool needs_stf = false;
  for (const std::string& p : spec.policies)
    if (p == "edgesync_stf") needs_stf = true;
  if (!needs_stf) return run_matrix(spec, cfg, jobs, {});
  return run_ablation(spec, cfg, jobs);
}

ComparisonTable run_ablation(const ExperimentSpec& spec, const SimConfig& cfg,
                             int jobs) {
  bool has_edgesync = false;
  for (const std::string& p : spec.policies)
    if (p == "edgesync") has_edgesync = true;
  if (!has_edgesync)
    throw ValidationError(
        "ablation runs need the edgesync condition to calibrate edgesync_stf");

  // measure edgesync's mean cycle time per seed, then feed it to the
  // fixed-cycle ablation
  ExperimentSpec probe = spec;
  probe.mode = "comparison";
  probe.policies = {"edgesync"};
  probe.verdicts.clear();
  const ComparisonTable probe_table = run_matrix(probe, cfg, jobs, {});
  std::map<std::uint64_t, double> stf_cycles;
  for (const RunOutcome& r : probe_table.groups.at(0).per_seed)
    stf_cycles[r.seed] = r.mean_cycle_s;

  ExperimentSpec full = spec;
  full.mode = "comparison";
  return run_matrix(full, cfg, jobs, stf_cycles);
}

std::string results_csv(const ComparisonTable& table) {
  std::ostringstream out;
  out << "label,policy,cameras,fraction,seed,accuracy,mean_cycle_s,"
         "upload_kbps,download_kbps,cycles\n";
  char buf[256];
  for (const GroupStats& g : table.groups) {
    for (const RunOutcome& r : g.per_seed) {
      std::snprintf(buf, sizeof buf, "%s,%s,%d,%.17g,%llu,%.17g,%.17g,%.17g,%.17g,%ld\n",
                    g.label.c_str(), g.policy.c_str(), g.cameras, g.fraction,
                    static_cast<unsigned long long>(r.seed), r.accuracy,
                    r.mean_cycle_s, r.upload_kbps, r.download_kbps, r.cycles);
      out << buf;
    }
  }
  return out.str();
}

std::string table_text(const ComparisonTable& table) {
  std::ostringstream out;
  out << "experiment " << table.spec.name << "\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-18s %10s %8s %12s %8s\n", "condition",
                "accuracy", "sd", "cycle_s", "seeds");
  out << buf;
  for (const GroupStats& g : table.groups) {
    std::snprintf(buf, sizeof buf, "%-18s %9.2f%% %8.2f %12.3f %8zu\n",
                  g.label.c_str(), g.mean_accuracy * 100.0,
                  g.sd_accuracy * 100.0, g.mean_cycle_s, g.per_seed.size());
    out << buf;
  }
  return out.str();
}

std::string verdicts_text(const ComparisonTable& table) {
  std::ostringstream out;
  for (const Verdict& v : table.verdicts)
    out << (v.pass ? "PASS " : "FAIL ") << v.claim << " -- " << v.detail << "\n";
  return out.str();
}

void write_comparison_outputs(const ComparisonTable& table,
                              const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto emit = [&](const std::string& name, const std::string& body) {
    const std::string path = (fs::path(out_dir) / name).string();
    const std::string tmp = path + ".tmp";
    {
      std::ofstream out(tmp);
      if (!out) throw ValidationError("cannot open " + tmp + " for writing");
      out << body;
      if (!out) throw ValidationError("write failed: " + tmp);
    }
    fs::rename(tmp, path);
  };
  emit("results.csv", results_csv(table));
  emit("table.txt", table_text(table));
  emit("verdicts.txt", verdicts_text(table));
}

}  // namespace edgesync
