#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "edgesync/rng.hpp"
#include "edgesync/types.hpp"

namespace edgesync {

// Teacher-labeled training window, rows in arrival order.
struct LabeledBatch {
  Eigen::MatrixXd features;  // N x D
  std::vector<int> labels;   // class index per row

  Eigen::Index size() const { return features.rows(); }
  void validate(int classes) const;
  LabeledBatch rows(Eigen::Index begin, Eigen::Index count) const;
};

// The edge model: a softmax head over frozen-backbone features. Only the
// weights and biases of this last layer ever train; features arrive
// pre-extracted, so the backbone never appears here.
struct StudentModel {
  Eigen::MatrixXd weights;          // C x D
  Eigen::VectorXd biases;           // C
  Eigen::MatrixXd weight_momentum;  // C x D
  Eigen::VectorXd bias_momentum;    // C

  StudentModel() = default;
  StudentModel(int classes, int dim);

  int classes() const { return static_cast<int>(weights.rows()); }
  int dim() const { return static_cast<int>(weights.cols()); }
  void reset_momentum();
};

// softmax(weights * features + biases), computed stably.
Eigen::VectorXd forward(const StudentModel& model,
                        const Eigen::Ref<const Eigen::VectorXd>& features);

// Shannon entropy in nats; 0*ln(0) counts as 0. Rejects vectors that are not
// a probability distribution (entries < 0 or sum off by more than 1e-6).
double entropy(const Eigen::Ref<const Eigen::VectorXd>& probs);

// Gradients of the mean cross-entropy over the batch (no weight decay).
struct Gradients {
  Eigen::MatrixXd weights;
  Eigen::VectorXd biases;
};
Gradients ce_gradients(const StudentModel& model, const LabeledBatch& batch);

// One epoch of mini-batch SGD with momentum and L2 weight decay on the
// weights (none on biases). Mini-batch order reshuffles from `rng`; the last
// partial mini-batch is kept. Returns the sample-weighted mean cross-entropy
// measured before each mini-batch update. Throws TrainingDiverged on
// non-finite loss or gradients.
double train_epoch(StudentModel& model, const LabeledBatch& batch,
                   const HyperParams& h, int mini_batch_size, Rng& rng);

struct EvalResult {
  double accuracy = 0.0;
  double loss = 0.0;
};
EvalResult evaluate(const StudentModel& model, const LabeledBatch& batch);

// Checkpoint format: one text header "EDGESYNC-MODEL v1 C=<c> D=<d>", then C
// lines of D row-major weights, then one line of C biases. Written through a
// temp file and renamed so failures never leave partial output.
void save_model(const StudentModel& model, const std::string& path);
StudentModel load_model(const std::string& path);

}  // namespace edgesync
