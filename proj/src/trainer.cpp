#include "edgesync/trainer.hpp"

namespace edgesync {

void TrainBudget::validate() const {
  if (patience < 1) throw ValidationError("patience must be >= 1");
  if (!(max_time_s > 0.0)) throw ValidationError("max_time_s must be > 0");
  if (max_epochs < 1) throw ValidationError("max_epochs must be >= 1");
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::patience: return "patience";
    case StopReason::time_budget: return "time_budget";
    case StopReason::epoch_cap: return "epoch_cap";
    case StopReason::divergence: return "divergence";
    case StopReason::skipped: return "skipped";
  }
  return "unknown";
}

LoopOutcome run_training_loop(
    const std::function<EpochResult(int epoch)>& run_epoch,
    const std::function<void(int epoch)>& on_best,
    const std::function<double(int epoch)>& epoch_cost,
    const TrainBudget& budget) {
  budget.validate();
  LoopOutcome out;
  for (int epoch = 1;; ++epoch) {
    EpochResult r;
    try {
      r = run_epoch(epoch);
    } catch (const TrainingDiverged&) {
      out.reason = StopReason::divergence;
      return out;
    }
    out.epochs_run = epoch;

    const bool improved = r.eval > out.best_eval ||
                          (r.eval == out.best_eval && r.loss < out.best_loss);
    if (improved) {
      out.best_eval = r.eval;
      out.best_loss = r.loss;
      out.best_epoch = epoch;
      if (on_best) on_best(epoch);
    }

    out.duration_s += epoch_cost(epoch);

    if (epoch - out.best_epoch >= budget.patience) {
      out.reason = StopReason::patience;
      return out;
    }
    if (out.duration_s > budget.max_time_s) {
      out.reason = StopReason::time_budget;
      return out;
    }
    if (epoch >= budget.max_epochs) {
      out.reason = StopReason::epoch_cap;
      return out;
    }
  }
}

TrainOutcome retrain(const StudentModel& model, const LabeledBatch& window,
                     const HyperParams& h, const TrainBudget& budget,
                     const EpochCostFn& epoch_cost, RngSeed session_seed,
                     int mini_batch_size) {
  TrainOutcome out;
  out.final_model = model;
  if (window.size() < 5) {
    out.stop_reason = StopReason::skipped;
    return out;
  }

  const Eigen::Index n = window.size();
  const Eigen::Index n_val = std::max<Eigen::Index>(1, n / 5);
  const Eigen::Index n_train = n - n_val;
  const LabeledBatch train_split = window.rows(0, n_train);
  const LabeledBatch val_split = window.rows(n_train, n_val);
  const auto train_size = static_cast<std::size_t>(n_train);

  StudentModel working = model;
  working.reset_momentum();
  StudentModel best = working;

  Rng rng(split_seed(session_seed, "retrain"));
  const LoopOutcome loop = run_training_loop(
      [&](int) -> EpochResult {
        train_epoch(working, train_split, h, mini_batch_size, rng);
        const EvalResult ev = evaluate(working, val_split);
        return {ev.accuracy, ev.loss};
      },
      [&](int) { best = working; },
      [&](int) { return epoch_cost(train_size); }, budget);

  out.epochs_run = loop.epochs_run;
  out.best_epoch = loop.best_epoch;
  out.best_eval = loop.best_eval;
  out.best_loss = loop.best_loss;
  out.stop_reason = loop.reason;
  out.train_duration_s = loop.duration_s;
  if (loop.reason == StopReason::divergence) {
    out.final_model = model;  // pre-session parameters survive a blow-up
    out.best_epoch = 0;
    out.best_eval = 0.0;
    out.best_loss = 0.0;
  } else {
    best.reset_momentum();
    out.final_model = std::move(best);
  }
  return out;
}

TrainOutcome fixed_epoch_train(const StudentModel& model,
                               const LabeledBatch& window,
                               const HyperParams& h, int epochs,
                               const EpochCostFn& epoch_cost,
                               RngSeed session_seed, int mini_batch_size) {
  if (epochs < 1) throw ValidationError("fixed_epoch_train: epochs must be >= 1");
  TrainOutcome out;
  out.final_model = model;
  if (window.size() < 5) {
    out.stop_reason = StopReason::skipped;
    return out;
  }

  StudentModel working = model;
  working.reset_momentum();
  Rng rng(split_seed(session_seed, "fixed-train"));
  const auto n = static_cast<std::size_t>(window.size());
  double last_loss = 0.0;
  for (int e = 1; e <= epochs; ++e) {
    try {
      last_loss = train_epoch(working, window, h, mini_batch_size, rng);
    } catch (const TrainingDiverged&) {
      out.stop_reason = StopReason::divergence;
      out.epochs_run = e - 1;
      return out;  // pre-session model
    }
    out.train_duration_s += epoch_cost(n);
    out.epochs_run = e;
  }
  working.reset_momentum();
  out.final_model = std::move(working);
  out.best_epoch = epochs;
  out.best_eval = 0.0;
  out.best_loss = last_loss;
  out.stop_reason = StopReason::epoch_cap;
  return out;
}

}  // namespace edgesync
