#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

#include "edgesync/rng.hpp"
#include "edgesync/types.hpp"

namespace edgesync {

// Hyperparameter search box. Learning rate and weight decay live on log10
// scales, momentum on a linear one; optimization happens on the unit cube.
struct SearchBox {
  std::array<double, 3> lo{-4.0, 0.0, -6.0};
  std::array<double, 3> hi{-1.0, 0.99, -2.0};

  void validate() const;
  HyperParams to_params(const Eigen::Vector3d& unit) const;
  Eigen::Vector3d to_unit(const HyperParams& h) const;
  bool contains(const HyperParams& h) const;
};

// GP regression surrogate over unit-cube points with a squared-exponential
// kernel and fixed length scales. Objective values are standardized to zero
// mean and unit variance at fit time; posteriors come back on that scale.
class GpSurrogate {
 public:
  // Throws ValidationError (suggesting a larger noise floor) if the kernel
  // matrix plus noise fails to factorize.
  static GpSurrogate fit(Eigen::MatrixXd points, const Eigen::VectorXd& values,
                         const Eigen::VectorXd& length_scales, double noise);
  static GpSurrogate fit(Eigen::MatrixXd points, const Eigen::VectorXd& values,
                         double length_scale, double noise);

  int dim() const { return static_cast<int>(points_.cols()); }
  Eigen::Index count() const { return points_.rows(); }
  double value_mean() const { return value_mean_; }
  double value_scale() const { return value_scale_; }
  const Eigen::VectorXd& standardized_values() const { return values_std_; }

  double destandardize_mean(double standardized) const {
    return value_mean_ + value_scale_ * standardized;
  }
  double destandardize_variance(double standardized) const {
    return value_scale_ * value_scale_ * standardized;
  }

  Eigen::VectorXd kernel_row(const Eigen::Ref<const Eigen::VectorXd>& q) const;
  const Eigen::LLT<Eigen::MatrixXd>& factorization() const { return llt_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }

 private:
  Eigen::MatrixXd points_;
  Eigen::VectorXd values_std_;
  Eigen::VectorXd length_scales_;
  double noise_ = 1e-6;
  double value_mean_ = 0.0;
  double value_scale_ = 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
};

struct GpPosterior {
  double mean = 0.0;      // standardized scale
  double variance = 0.0;  // clamped at zero against round-off
};
GpPosterior gp_posterior(const GpSurrogate& surrogate,
                         const Eigen::Ref<const Eigen::VectorXd>& query);

// Closed-form EI under the maximization convention,
// (mu - f_best - xi) * Phi(z) + sigma * phi(z). A degenerate posterior
// (sigma = 0) returns the deterministic improvement max(mu - f_best - xi, 0).
double expected_improvement(double mean, double stddev, double f_best,
                            double xi);
double expected_improvement(const GpSurrogate& surrogate,
                            const Eigen::Ref<const Eigen::VectorXd>& query,
                            double f_best, double xi);

struct EiConfig {
  double xi = 0.01;
  int candidate_count = 1000;
  int init_points = 8;
  int max_iters = 30;
  double improvement_threshold = 0.002;
  double gp_length_scale = 0.2;
  double gp_noise = 1e-6;

  void validate() const;
};

struct UnitObservation {
  Eigen::VectorXd point;
  double value = 0.0;
  bool finite = true;
};

struct UnitOptimizeResult {
  Eigen::VectorXd best_point;
  double best_value = 0.0;
  std::vector<UnitObservation> history;
};

// Bayesian optimization on the unit cube: stratified initial design, then
// fit-surrogate / argmax-EI-over-uniform-candidates iterations. Stops at
// max_iters or once the best value has improved by less than
// improvement_threshold over the last 5 iterations. Non-finite objective
// values are recorded, excluded from f_best, and fed to the surrogate as the
// worst finite value seen.
UnitOptimizeResult optimize_unit(
    const std::function<double(const Eigen::VectorXd&)>& objective, int dim,
    const EiConfig& cfg, RngSeed seed,
    const std::vector<Eigen::VectorXd>& initial_guesses = {});

struct Observation {
  HyperParams params;
  double value = 0.0;
  bool finite = true;
};

struct OptimizeResult {
  HyperParams best;
  double best_value = 0.0;
  std::vector<Observation> history;
};

OptimizeResult optimize(
    const std::function<double(const HyperParams&)>& objective,
    const SearchBox& box, const EiConfig& cfg, RngSeed seed,
    const std::vector<HyperParams>& initial_guesses = {});

}  // namespace edgesync
