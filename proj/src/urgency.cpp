#include "edgesync/urgency.hpp"

#include <cmath>

namespace edgesync {

AccuracyBank::AccuracyBank(int capacity, int segments)
    : capacity_(capacity), segments_(segments) {
  if (capacity < 1 || segments < 1)
    throw ValidationError("accuracy bank needs capacity >= 1, segments >= 1");
  if (capacity % segments != 0)
    throw ValidationError("bank capacity must be divisible by segment count");
}

void AccuracyBank::record(int predicted_label, int teacher_label) {
  bits_.push_back(predicted_label == teacher_label ? 1 : 0);
  ++appended_;
  while (bits_.size() > static_cast<std::size_t>(capacity_)) bits_.pop_front();
}

void AccuracyBank::record_results(
    const std::vector<std::pair<int, int>>& labeled) {
  for (const auto& [predicted, teacher] : labeled) record(predicted, teacher);
}

Eigen::VectorXd segment_accuracies(const AccuracyBank& bank) {
  if (!bank.full())
    throw ValidationError("segment_accuracies: bank not yet full");
  const int segments = bank.segments();
  const int length = bank.segment_length();
  Eigen::VectorXd acc(segments);
  auto it = bank.bits().begin();
  for (int i = 0; i < segments; ++i) {
    int sum = 0;
    for (int j = 0; j < length; ++j, ++it) sum += *it;
    acc[i] = static_cast<double>(sum) / static_cast<double>(length);
  }
  return acc;
}

double urgency_degree(const AccuracyBank& bank, double decay_tm) {
  const Eigen::VectorXd acc = segment_accuracies(bank);
  const int segments = bank.segments();
  const double horizon =
      decay_tm > 0.0 ? decay_tm : static_cast<double>(segments);
  double degree = 0.0;
  for (int i = 0; i < segments; ++i) {
    const double weight =
        static_cast<double>(segments) /
        (1.0 + std::exp(-static_cast<double>(i) / horizon));
    degree += (acc[0] - acc[i]) * weight;  // i = 0 term is identically zero
  }
  return degree;
}

std::optional<UrgencyReport> urgency_report(int edge_id,
                                            const AccuracyBank& bank,
                                            double decay_tm) {
  if (!bank.full()) return std::nullopt;
  UrgencyReport r;
  r.edge_id = edge_id;
  r.segment_accuracies = segment_accuracies(bank);
  r.degree = urgency_degree(bank, decay_tm);
  return r;
}

namespace {

// least-recently-trained wins; ties go to the lowest id
bool staler(long cycle_a, int id_a, long cycle_b, int id_b) {
  if (cycle_a != cycle_b) return cycle_a < cycle_b;
  return id_a < id_b;
}

}  // namespace

int select_edge(const std::vector<UrgencyReport>& ready,
                const std::vector<long>& last_trained_cycle,
                const std::vector<bool>& eligible) {
  if (last_trained_cycle.size() != eligible.size())
    throw ValidationError("select_edge: ledger/eligibility size mismatch");

  int best = -1;
  double best_degree = 0.0;
  for (const UrgencyReport& r : ready) {
    const auto idx = static_cast<std::size_t>(r.edge_id);
    if (idx >= eligible.size() || !eligible[idx]) continue;
    if (best < 0 || r.degree > best_degree ||
        (r.degree == best_degree &&
         staler(last_trained_cycle[idx], r.edge_id,
                last_trained_cycle[static_cast<std::size_t>(best)], best))) {
      best = r.edge_id;
      best_degree = r.degree;
    }
  }
  if (best >= 0) return best;

  // no scorable bank: round-robin by staleness so every edge gets a first pass
  for (std::size_t e = 0; e < eligible.size(); ++e) {
    if (!eligible[e]) continue;
    const int id = static_cast<int>(e);
    if (best < 0 || staler(last_trained_cycle[e], id,
                           last_trained_cycle[static_cast<std::size_t>(best)],
                           best))
      best = id;
  }
  if (best < 0) throw ValidationError("select_edge: no eligible edge");
  return best;
}

}  // namespace edgesync
