#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "edgesync/rng.hpp"
#include "edgesync/student_model.hpp"
#include "edgesync/types.hpp"

namespace edgesync {

// Ordered feature stream standing in for one camera's decoded video:
// pre-extracted embeddings at a fixed sampling rate with ground-truth labels.
struct FeatureStream {
  int classes = 6;
  int dim = 32;
  double rate_hz = 2.0;
  std::string name;
  std::vector<double> times;   // strictly increasing
  std::vector<int> labels;     // in [0, classes)
  Eigen::MatrixXd features;    // n x dim

  std::size_t size() const { return times.size(); }
  double duration() const { return times.empty() ? 0.0 : times.back(); }
  void validate() const;
};

// One stationary regime of the generator: Gaussian class conditionals with a
// shared isotropic scale, a class prior, and an additive global shift
// (lighting/weather stand-in). blend_in_s > 0 ramps linearly from the
// previous phase's parameters over the first blend_in_s seconds.
struct DriftPhase {
  double duration_s = 0.0;
  Eigen::MatrixXd class_means;   // C x D
  double cov_scale = 1.0;
  Eigen::VectorXd class_priors;  // sums to 1
  Eigen::VectorXd global_shift;  // D, may be zero
  double blend_in_s = 0.0;
};

struct DriftSchedule {
  int classes = 6;
  int dim = 32;
  double rate_hz = 2.0;
  std::string name;
  std::vector<DriftPhase> phases;

  double total_duration() const;
  void validate() const;
  // Effective generator parameters at time t, blends applied.
  DriftPhase params_at(double t) const;
};

FeatureStream generate(const DriftSchedule& schedule, RngSeed seed);

// Text stream format, versioned:
//   EDGESYNC-STREAM v1 C=<c> D=<d> rate=<hz> n=<count>
//   <time>,<label>,<f1>,...,<fD>
// Values print with 17 significant digits so a save/load round trip is exact.
void save_stream(const FeatureStream& stream, const std::string& path);
FeatureStream load_stream(const std::string& path);

// Fixed catalog of drift regimes at desk scale. Names and schedule shapes are
// stable; the seed only drives sampling.
const std::vector<std::string>& benchmark_schedule_names();
DriftSchedule benchmark_schedule(const std::string& name,
                                 double duration_s = 1200.0, int classes = 6,
                                 int dim = 32);
std::vector<FeatureStream> standard_benchmark_suite(RngSeed seed,
                                                    double duration_s = 1200.0,
                                                    int classes = 6,
                                                    int dim = 32);

// Rotating mixture of regimes (stationary, slow drift, abrupt shift, class
// imbalance). offset_fraction rotates the phase order so a fleet of cameras
// sees the same difficulty with staggered timing.
DriftSchedule mixed_schedule(double offset_fraction, double duration_s = 1200.0,
                             int classes = 6, int dim = 32);

// Streams for a K-camera run. source is "catalog", "mixed", or a directory of
// stream files (lexicographic order, first K used).
std::vector<FeatureStream> build_streams(const std::string& source, int cameras,
                                         RngSeed seed, double duration_s,
                                         int classes, int dim);

// Accuracy of the exact posterior classifier under the schedule's generator
// at times uniform in [t0, t1), Monte Carlo estimated. Upper-bounds (within
// sampling noise) what any classifier can reach on that stretch.
double bayes_reference_accuracy(const DriftSchedule& schedule, double t0,
                                double t1, int draws, RngSeed seed);

}  // namespace edgesync
