#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "edgesync/types.hpp"

namespace edgesync {

// Per-edge bounded list of correctness bits kept in the cloud. Capacity n
// must divide evenly into m segments; oldest bits evict first.
class AccuracyBank {
 public:
  AccuracyBank(int capacity, int segments);

  void record(int predicted_label, int teacher_label);
  void record_results(const std::vector<std::pair<int, int>>& labeled);

  bool full() const { return bits_.size() == static_cast<std::size_t>(capacity_); }
  int size() const { return static_cast<int>(bits_.size()); }
  int capacity() const { return capacity_; }
  int segments() const { return segments_; }
  int segment_length() const { return capacity_ / segments_; }
  std::uint64_t total_appended() const { return appended_; }
  const std::deque<std::uint8_t>& bits() const { return bits_; }

 private:
  int capacity_;
  int segments_;
  std::deque<std::uint8_t> bits_;  // front = oldest
  std::uint64_t appended_ = 0;
};

// Mean accuracy of each of the m contiguous segments, segment 0 = oldest.
// Requires a full bank.
Eigen::VectorXd segment_accuracies(const AccuracyBank& bank);

// Urgency degree: sum over segments i of (acc[0] - acc[i]) weighted by
// sigmoid(i / horizon) * segment_count. Segment 0 is the oldest and serves
// as the reference, so the degree grows when recent accuracy falls below the
// old baseline. decay_tm <= 0 selects the default horizon = segment count.
double urgency_degree(const AccuracyBank& bank, double decay_tm = 0.0);

struct UrgencyReport {
  int edge_id = 0;
  double degree = 0.0;
  Eigen::VectorXd segment_accuracies;
};

// nullopt while the bank is still filling; callers skip such edges.
std::optional<UrgencyReport> urgency_report(int edge_id,
                                            const AccuracyBank& bank,
                                            double decay_tm = 0.0);

// Picks the edge to retrain: argmax degree over the ready reports, ties
// broken by least-recently-trained and then lowest id. With no ready report,
// falls back to the least-recently-trained edge overall so cold edges still
// receive their first update. last_trained_cycle holds one entry per edge,
// -1 meaning never trained. `eligible` (same length) masks edges the caller
// is willing to train; it must admit at least one edge.
int select_edge(const std::vector<UrgencyReport>& ready,
                const std::vector<long>& last_trained_cycle,
                const std::vector<bool>& eligible);

}  // namespace edgesync
