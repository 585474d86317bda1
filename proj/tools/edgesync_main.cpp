#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>

#include "edgesync/config.hpp"
#include "edgesync/drift_stream.hpp"
#include "edgesync/experiments.hpp"
#include "edgesync/offline_profile.hpp"
#include "edgesync/sim_kernel.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct ConfigCli {
  std::string config_path;
  std::vector<std::string> sets;
};

void add_config_options(CLI::App* cmd, ConfigCli& cc) {
  cmd->add_option("--config", cc.config_path, "config file (key = value lines)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", cc.sets,
                  "override one config key, e.g. --set patience=7 (repeatable)");
}

edgesync::SimConfig load_config(const ConfigCli& cc) {
  edgesync::SimConfig cfg;
  if (!cc.config_path.empty())
    edgesync::apply_config_overrides(cfg,
                                     edgesync::parse_config_file(cc.config_path));
  for (const std::string& kv : cc.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw edgesync::ValidationError("--set expects key=value, got: " + kv);
    edgesync::apply_config_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

int default_jobs() {
  const unsigned hw = std::thread::hardware_concurrency();
  return std::clamp<int>(static_cast<int>(hw), 1, 8);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edgesync: edge-cloud continuous-learning simulator"};
  app.set_version_flag("--version", "edgesync 1.0.0");
  app.require_subcommand(1);

  // ---- gen-data
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic feature stream");
  std::string gen_schedule = "mixed";
  std::uint64_t gen_seed = 42;
  std::string gen_out;
  double gen_duration = 1200.0, gen_offset = 0.0, gen_rate = 2.0;
  int gen_classes = 6, gen_dim = 32;
  gen->add_option("--schedule", gen_schedule,
                  "schedule name (stationary, slow_drift, fast_drift, "
                  "abrupt_shift, class_imbalance_shift, mixed)");
  gen->add_option("--seed", gen_seed, "sampling seed");
  gen->add_option("--out", gen_out, "output stream file")->required();
  gen->add_option("--duration", gen_duration, "stream length in seconds");
  gen->add_option("--offset", gen_offset,
                  "phase rotation in [0,1) for the mixed schedule");
  gen->add_option("--rate", gen_rate, "samples per second");
  gen->add_option("--classes", gen_classes, "class count");
  gen->add_option("--dim", gen_dim, "feature dimension");

  // ---- profile-offline
  auto* prof = app.add_subcommand("profile-offline",
                                  "two-stage offline hyperparameter search");
  ConfigCli prof_cc;
  std::string prof_streams, prof_out;
  std::uint64_t prof_seed = 42;
  add_config_options(prof, prof_cc);
  prof->add_option("--streams", prof_streams, "directory of stream files")
      ->required()
      ->check(CLI::ExistingDirectory);
  prof->add_option("--out", prof_out, "profile output file")->required();
  prof->add_option("--seed", prof_seed, "search seed");

  // ---- simulate
  auto* sim = app.add_subcommand("simulate", "run one policy over the fleet");
  ConfigCli sim_cc;
  std::uint64_t sim_seed = 42;
  std::string sim_out_dir, sim_streams, sim_profile, sim_policy, sim_mode;
  bool sim_trace = false, sim_dump_models = false;
  double sim_fraction = -1.0, sim_alpha = -1.0, sim_beta = -1.0;
  add_config_options(sim, sim_cc);
  sim->add_option("--seed", sim_seed, "simulation seed");
  sim->add_option("--out-dir", sim_out_dir, "output directory")->required();
  sim->add_option("--streams", sim_streams,
                  "stream source: mixed, catalog, or a directory");
  sim->add_option("--profile", sim_profile,
                  "profile file supplying the hyperparameter triple")
      ->check(CLI::ExistingFile);
  sim->add_option("--policy", sim_policy, "policy to simulate");
  sim->add_flag("--trace", sim_trace, "also write the per-sample trace.csv");
  sim->add_flag("--dump-models", sim_dump_models,
                "write each edge's final model checkpoint");
  sim->add_option("--upload-fraction", sim_fraction, "filter fraction k in (0,1]");
  sim->add_option("--alpha", sim_alpha, "adaptability weight");
  sim->add_option("--beta", sim_beta, "timeliness weight");
  sim->add_option("--timeliness-mode", sim_mode, "recency | literal");

  // ---- compare
  auto* cmp = app.add_subcommand("compare", "run a committed experiment spec");
  ConfigCli cmp_cc;
  std::string cmp_spec, cmp_out_dir;
  int cmp_jobs = default_jobs();
  add_config_options(cmp, cmp_cc);
  cmp->add_option("--spec", cmp_spec, "experiment spec file")
      ->required()
      ->check(CLI::ExistingFile);
  cmp->add_option("--out-dir", cmp_out_dir, "output directory")->required();
  cmp->add_option("--jobs", cmp_jobs, "max parallel simulations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*gen) {
      edgesync::DriftSchedule schedule;
      if (gen_schedule == "mixed") {
        schedule = edgesync::mixed_schedule(gen_offset, gen_duration,
                                            gen_classes, gen_dim);
      } else {
        schedule = edgesync::benchmark_schedule(gen_schedule, gen_duration,
                                                gen_classes, gen_dim);
      }
      schedule.rate_hz = gen_rate;
      const edgesync::FeatureStream stream =
          edgesync::generate(schedule, edgesync::RngSeed{gen_seed});
      edgesync::save_stream(stream, gen_out);
      std::cerr << "wrote " << stream.size() << " samples to " << gen_out << "\n";
      return kExitOk;
    }

    if (*prof) {
      const edgesync::SimConfig cfg = load_config(prof_cc);
      cfg.validate();
      std::vector<std::string> files;
      for (const auto& entry :
           std::filesystem::directory_iterator(prof_streams)) {
        if (entry.is_regular_file()) files.push_back(entry.path().string());
      }
      std::sort(files.begin(), files.end());
      std::vector<edgesync::FeatureStream> streams;
      for (const std::string& f : files)
        streams.push_back(edgesync::load_stream(f));
      const edgesync::ProfileResult result = edgesync::offline_profile(
          streams, cfg, edgesync::RngSeed{prof_seed});
      edgesync::save_profile(result, prof_out);
      std::printf("learning_rate=%.6g momentum=%.6g weight_decay=%.6g value=%.4f\n",
                  result.best.learning_rate, result.best.momentum,
                  result.best.weight_decay, result.best_value);
      return kExitOk;
    }

    if (*sim) {
      edgesync::SimConfig cfg = load_config(sim_cc);
      if (!sim_streams.empty()) cfg.stream_source = sim_streams;
      if (!sim_policy.empty()) cfg.policy.kind = edgesync::parse_policy(sim_policy);
      if (!sim_profile.empty())
        cfg.hyper = edgesync::load_profile_params(sim_profile);
      if (sim_fraction >= 0.0) cfg.filter.upload_fraction = sim_fraction;
      if (sim_alpha >= 0.0) cfg.filter.alpha = sim_alpha;
      if (sim_beta >= 0.0) cfg.filter.beta = sim_beta;
      if (!sim_mode.empty())
        cfg.filter.mode = edgesync::parse_timeliness_mode(sim_mode);
      cfg.validate();

      const std::vector<edgesync::FeatureStream> streams =
          edgesync::build_streams(cfg.stream_source, cfg.cameras,
                                  edgesync::RngSeed{sim_seed}, cfg.duration_s,
                                  cfg.classes, cfg.feature_dim);
      const edgesync::SimResult result =
          edgesync::run_simulation(streams, cfg, edgesync::RngSeed{sim_seed});

      namespace fs = std::filesystem;
      fs::create_directories(sim_out_dir);
      const fs::path dir(sim_out_dir);
      edgesync::write_metrics_csv(result.cycles, cfg.cameras,
                                  (dir / "metrics.csv").string());
      edgesync::write_summary(result.report, cfg, sim_seed,
                              (dir / "summary.txt").string());
      edgesync::write_series_csv(result.report, (dir / "series.csv").string());
      if (sim_trace)
        edgesync::write_trace_csv(result.trace, (dir / "trace.csv").string());
      if (sim_dump_models) {
        for (std::size_t e = 0; e < result.final_models.size(); ++e) {
          edgesync::save_model(
              result.final_models[e],
              (dir / ("model_edge" + std::to_string(e) + ".txt")).string());
        }
      }
      std::cout << edgesync::summary_text(result.report, cfg, sim_seed);
      return kExitOk;
    }

    if (*cmp) {
      const edgesync::SimConfig cfg = load_config(cmp_cc);
      cfg.validate();
      const edgesync::ExperimentSpec spec =
          edgesync::parse_experiment_spec(cmp_spec);
      const edgesync::ComparisonTable table =
          edgesync::run_comparison(spec, cfg, cmp_jobs);
      edgesync::write_comparison_outputs(table, cmp_out_dir);
      std::cout << edgesync::table_text(table) << "\n"
                << edgesync::verdicts_text(table);
      return kExitOk;
    }
  } catch (const edgesync::ParseError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kExitUsage;
  } catch (const edgesync::ValidationError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: runtime: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
