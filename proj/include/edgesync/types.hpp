#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace edgesync {

// Inputs that violate a documented precondition or invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed files (streams, configs, profiles). Carries location in the message.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite loss or gradients during an SGD pass.
class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// argmax with ties broken by the lowest index, so predictions are deterministic.
int argmax_lowest(const Eigen::Ref<const Eigen::VectorXd>& v);

// One sampled frame after edge-side inference: pre-extracted feature vector,
// ground truth, and the deployed model's prediction over it.
struct Sample {
  int edge_id = 0;
  std::uint64_t seq = 0;      // arrival order on its edge
  double arrival_time = 0.0;  // simulated seconds
  Eigen::VectorXd features;
  int true_label = 0;
  std::optional<int> predicted_label;
  std::optional<Eigen::VectorXd> probs;

  // Checks the probs/predicted_label invariants against a class count.
  void validate(int classes) const;
};

// The triple searched by the offline profiler and consumed by every
// retraining session.
struct HyperParams {
  double learning_rate = 0.05;
  double momentum = 0.9;
  double weight_decay = 1e-4;

  void validate() const;
};

}  // namespace edgesync
