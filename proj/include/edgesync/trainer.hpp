#pragma once

#include <functional>
#include <limits>

#include "edgesync/rng.hpp"
#include "edgesync/student_model.hpp"

namespace edgesync {

struct TrainBudget {
  int patience = 5;          // epochs without validation improvement
  double max_time_s = 30.0;  // simulated wall budget for the session
  int max_epochs = 50;       // safety cap

  void validate() const;
};

enum class StopReason { patience, time_budget, epoch_cap, divergence, skipped };
const char* to_string(StopReason reason);

// Simulated cost of one epoch given the train-split size.
using EpochCostFn = std::function<double(std::size_t train_samples)>;

struct EpochResult {
  double eval = 0.0;  // validation accuracy; higher is better
  double loss = 0.0;  // validation loss; tie-breaker, lower is better
};

struct LoopOutcome {
  int epochs_run = 0;
  int best_epoch = 0;
  double best_eval = -std::numeric_limits<double>::infinity();
  double best_loss = std::numeric_limits<double>::infinity();
  double duration_s = 0.0;
  StopReason reason = StopReason::epoch_cap;
};

// The early-stopping engine, separated from real training so constructed
// evaluation sequences can drive it directly in tests. run_epoch trains one
// epoch and reports validation metrics (throwing TrainingDiverged aborts the
// session); on_best fires whenever an epoch becomes the new best. The budget
// is checked between epochs, so duration may overshoot max_time_s by at most
// one epoch's cost.
LoopOutcome run_training_loop(
    const std::function<EpochResult(int epoch)>& run_epoch,
    const std::function<void(int epoch)>& on_best,
    const std::function<double(int epoch)>& epoch_cost,
    const TrainBudget& budget);

struct TrainOutcome {
  StudentModel final_model;
  int epochs_run = 0;
  int best_epoch = 0;
  double best_eval = 0.0;
  double best_loss = 0.0;
  StopReason stop_reason = StopReason::skipped;
  double train_duration_s = 0.0;
};

// One cloud retraining session: momentum buffers reset, the window splits
// 80/20 by arrival order (train on the older 80%, validate on the newest
// 20%), and the best-epoch snapshot comes back rather than the last. Windows
// under 5 samples skip training and return the model unchanged. Divergence
// also returns the pre-session model, with the reason recorded.
TrainOutcome retrain(const StudentModel& model, const LabeledBatch& window,
                     const HyperParams& h, const TrainBudget& budget,
                     const EpochCostFn& epoch_cost, RngSeed session_seed,
                     int mini_batch_size = 32);

// Fixed-epoch training (the AMS-style baselines): exactly `epochs` passes
// over the whole window, last model kept, no validation split or stopping.
TrainOutcome fixed_epoch_train(const StudentModel& model,
                               const LabeledBatch& window,
                               const HyperParams& h, int epochs,
                               const EpochCostFn& epoch_cost,
                               RngSeed session_seed, int mini_batch_size = 32);

}  // namespace edgesync
