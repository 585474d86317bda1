#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "edgesync/drift_stream.hpp"
#include "edgesync/trainer.hpp"

using namespace edgesync;

namespace {

LabeledBatch batch_from(const FeatureStream& s, std::size_t begin,
                        std::size_t count) {
  LabeledBatch b;
  b.features = s.features.middleRows(static_cast<Eigen::Index>(begin),
                                     static_cast<Eigen::Index>(count));
  b.labels.assign(s.labels.begin() + static_cast<std::ptrdiff_t>(begin),
                  s.labels.begin() + static_cast<std::ptrdiff_t>(begin + count));
  return b;
}

StudentModel fit_student(const LabeledBatch& batch, int classes, int dim,
                         int epochs = 40) {
  const StudentModel fresh(classes, dim);
  HyperParams h{0.1, 0.9, 1e-4};
  return fixed_epoch_train(fresh, batch, h, epochs,
                           [](std::size_t) { return 0.0; }, RngSeed{1000})
      .final_model;
}

}  // namespace

TEST_CASE("generation is reproducible from the seed") {
  const DriftSchedule sched = benchmark_schedule("slow_drift", 300.0);
  const FeatureStream a = generate(sched, RngSeed{5});
  const FeatureStream b = generate(sched, RngSeed{5});
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);
  CHECK(a.times == b.times);
  const FeatureStream c = generate(sched, RngSeed{6});
  CHECK(a.features != c.features);
}

TEST_CASE("zero covariance collapses each class onto its mean") {
  DriftSchedule sched;
  sched.classes = 3;
  sched.dim = 4;
  sched.name = "degenerate";
  DriftPhase phase;
  phase.duration_s = 50.0;
  phase.class_means.resize(3, 4);
  phase.class_means << 1, 0, 0, 0, 0, 2, 0, 0, 0, 0, 3, 0;
  phase.cov_scale = 0.0;
  phase.class_priors = Eigen::VectorXd::Constant(3, 1.0 / 3);
  phase.global_shift = Eigen::VectorXd::Zero(4);
  sched.phases.push_back(phase);

  const FeatureStream s = generate(sched, RngSeed{9});
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Eigen::VectorXd expect =
        phase.class_means.row(s.labels[i]).transpose();
    CHECK((s.features.row(static_cast<Eigen::Index>(i)).transpose() - expect)
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
}

TEST_CASE("timestamps are strictly increasing at the configured rate") {
  const FeatureStream s =
      generate(benchmark_schedule("stationary", 100.0), RngSeed{3});
  CHECK(s.size() == 200);  // 2 Hz over 100 s
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s.times[i] > s.times[i - 1]);
  CHECK(s.times.back() <= 100.0 + 1e-12);
}

TEST_CASE("inverted class geometry defeats a phase-1 classifier") {
  // abrupt_shift permutes the class means at its cut point
  const DriftSchedule sched = benchmark_schedule("abrupt_shift", 1200.0);
  const double cut_t = sched.phases[0].duration_s;
  const FeatureStream s = generate(sched, RngSeed{21});
  std::size_t cut = 0;
  while (cut < s.size() && s.times[cut] <= cut_t) ++cut;
  const StudentModel m = fit_student(batch_from(s, 0, cut), 6, 32);
  const EvalResult before = evaluate(m, batch_from(s, 0, cut));
  const EvalResult after = evaluate(m, batch_from(s, cut, s.size() - cut));
  CHECK(before.accuracy > 0.6);
  CHECK(after.accuracy <= 1.0 / 6 + 0.1);
  // and the drop itself is the advertised >= 20 points
  CHECK(before.accuracy - after.accuracy >= 0.20);
}

TEST_CASE("a one-time student holds its accuracy on the stationary stream") {
  // long stream so the two halves measure accuracy well inside the 2-point
  // bound (binomial sd of the difference ~0.4 points here)
  const FeatureStream s =
      generate(benchmark_schedule("stationary", 12000.0), RngSeed{22});
  const StudentModel m = fit_student(batch_from(s, 0, 200), 6, 32);
  const std::size_t half = s.size() / 2;
  const EvalResult first = evaluate(m, batch_from(s, 200, half - 200));
  const EvalResult second = evaluate(m, batch_from(s, half, s.size() - half));
  CHECK(std::abs(first.accuracy - second.accuracy) <= 0.02);
}

TEST_CASE("catalog names and sizes are stable") {
  const auto& names = benchmark_schedule_names();
  REQUIRE(names.size() == 5);
  CHECK(names[0] == "slow_drift");
  CHECK(names[1] == "fast_drift");
  CHECK(names[2] == "abrupt_shift");
  CHECK(names[3] == "class_imbalance_shift");
  CHECK(names[4] == "stationary");
  const auto suite = standard_benchmark_suite(RngSeed{4}, 300.0);
  REQUIRE(suite.size() == 5);
  for (const FeatureStream& s : suite) {
    CHECK(s.size() == 600);
    CHECK(s.classes == 6);
    CHECK(s.dim == 32);
  }
}

TEST_CASE("save and load round-trip exactly") {
  const FeatureStream s =
      generate(benchmark_schedule("fast_drift", 60.0), RngSeed{31});
  const std::string path = "test_stream_roundtrip.txt";
  save_stream(s, path);
  const FeatureStream back = load_stream(path);
  CHECK(back.classes == s.classes);
  CHECK(back.dim == s.dim);
  CHECK(back.rate_hz == s.rate_hz);
  CHECK(back.times == s.times);
  CHECK(back.labels == s.labels);
  CHECK(back.features == s.features);
  std::remove(path.c_str());
}

TEST_CASE("loading rejects labels outside the class range") {
  const std::string path = "test_stream_badlabel.txt";
  {
    std::ofstream out(path);
    out << "EDGESYNC-STREAM v1 C=3 D=2 rate=2 n=2\n";
    out << "0.5,1,0.0,0.0\n";
    out << "1.0,3,0.0,0.0\n";  // label 3 out of [0,3)
  }
  CHECK_THROWS_WITH_AS(load_stream(path),
                       doctest::Contains(":3: label out of range"), ParseError);
  std::remove(path.c_str());
}

TEST_CASE("loading rejects non-monotone timestamps") {
  const std::string path = "test_stream_badtime.txt";
  {
    std::ofstream out(path);
    out << "EDGESYNC-STREAM v1 C=3 D=2 rate=2 n=2\n";
    out << "1.0,1,0.0,0.0\n";
    out << "0.5,2,0.0,0.0\n";
  }
  CHECK_THROWS_AS(load_stream(path), ParseError);
  std::remove(path.c_str());
}

TEST_CASE("truncated files fail atomically") {
  const std::string path = "test_stream_truncated.txt";
  {
    std::ofstream out(path);
    out << "EDGESYNC-STREAM v1 C=3 D=2 rate=2 n=5\n";
    out << "0.5,1,0.0,0.0\n";
  }
  CHECK_THROWS_WITH_AS(load_stream(path), doctest::Contains("truncated"),
                       ParseError);
  std::remove(path.c_str());
}

TEST_CASE("mixed schedules rotate with the camera offset") {
  const DriftSchedule a = mixed_schedule(0.0, 1200.0);
  const DriftSchedule b = mixed_schedule(0.5, 1200.0);
  CHECK(a.total_duration() == doctest::Approx(1200.0));
  CHECK(b.total_duration() == doctest::Approx(1200.0));
  REQUIRE(a.phases.size() == b.phases.size());
  const std::size_t rot = a.phases.size() / 2;
  for (std::size_t j = 0; j < a.phases.size(); ++j) {
    CHECK(a.phases[(j + rot) % a.phases.size()].duration_s ==
          b.phases[j].duration_s);
  }
}

TEST_CASE("build_streams covers catalog, mixed, and directories") {
  const auto catalog = build_streams("catalog", 7, RngSeed{40}, 120.0, 6, 32);
  REQUIRE(catalog.size() == 7);
  CHECK(catalog[0].name.rfind("slow_drift", 0) == 0);
  CHECK(catalog[5].name.rfind("slow_drift", 0) == 0);  // wraps after 5
  // reused schedule, distinct sampling
  CHECK(catalog[0].features != catalog[5].features);

  const auto mixed = build_streams("mixed", 3, RngSeed{40}, 120.0, 6, 32);
  REQUIRE(mixed.size() == 3);
  CHECK(mixed[0].features != mixed[1].features);

  namespace fs = std::filesystem;
  const std::string dir = "test_stream_dir";
  fs::create_directories(dir);
  save_stream(mixed[0], dir + "/a.stream");
  save_stream(mixed[1], dir + "/b.stream");
  const auto loaded = build_streams(dir, 2, RngSeed{0}, 0.0, 6, 32);
  CHECK(loaded.size() == 2);
  CHECK(loaded[0].features == mixed[0].features);
  CHECK_THROWS_AS(build_streams(dir, 3, RngSeed{0}, 0.0, 6, 32),
                  ValidationError);
  fs::remove_all(dir);
}

TEST_CASE("the exact posterior classifier bounds a trained student") {
  const DriftSchedule sched = benchmark_schedule("stationary", 1200.0);
  const FeatureStream s = generate(sched, RngSeed{50});
  const StudentModel m = fit_student(batch_from(s, 0, 600), 6, 32, 60);

  const std::size_t eval_begin = 600, eval_count = s.size() - 600;
  const EvalResult student =
      evaluate(m, batch_from(s, eval_begin, eval_count));
  const double bayes =
      bayes_reference_accuracy(sched, 300.0, 1200.0, 20000, RngSeed{51});

  // 3 sigma of both binomial estimates
  const double n_student = static_cast<double>(eval_count);
  const double noise =
      3.0 * (std::sqrt(0.25 / n_student) + std::sqrt(0.25 / 20000.0));
  CHECK(student.accuracy <= bayes + noise);
}
