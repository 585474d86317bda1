#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "edgesync/types.hpp"

namespace edgesync {

// Two readings of the timeliness sigmoid. recency_decay weights the newest
// samples highest (age index 0 scores 0.5 and older samples decay toward 0);
// paper_literal keeps the opposite orientation behind a flag.
enum class TimelinessMode { recency_decay, paper_literal };

TimelinessMode parse_timeliness_mode(const std::string& name);

struct FilterConfig {
  double upload_fraction = 0.7;  // k in (0,1]
  double alpha = 1.0;            // adaptability weight
  double beta = 1.0;             // timeliness weight
  TimelinessMode mode = TimelinessMode::recency_decay;

  void validate() const;
};

struct QualityScore {
  double adaptability = 0.0;  // prediction entropy E
  double timeliness = 0.0;    // sigmoid age weight I
  double combined = 0.0;      // Q = alpha*E + beta*I
};

// age_index 0 is the newest sample in the window; window is the cache size T.
double timeliness_score(std::size_t age_index, std::size_t window,
                        TimelinessMode mode);

QualityScore score_sample(const Sample& sample, std::size_t age_index,
                          const FilterConfig& cfg, std::size_t window);

// ceil(k*T) clamped to [1, T]; the number of samples a window uploads.
std::size_t upload_count(double upload_fraction, std::size_t window);

// One selected sample: its position in the input cache (0 = oldest), its age
// index, and the scores that ranked it.
struct ScoredSample {
  std::size_t cache_pos = 0;
  std::size_t age_index = 0;
  QualityScore score;
};

// Scores every cached sample once and keeps the ceil(k*T) highest combined
// scores, descending, ties going to the smaller age index (newer first).
// Cache rows are expected oldest-first; an empty cache yields an empty result.
std::vector<ScoredSample> filter_window(const std::vector<Sample>& cache,
                                        const FilterConfig& cfg);

}  // namespace edgesync
