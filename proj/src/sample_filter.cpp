#include "edgesync/sample_filter.hpp"

#include <algorithm>
#include <cmath>

#include "edgesync/student_model.hpp"

namespace edgesync {

TimelinessMode parse_timeliness_mode(const std::string& name) {
  if (name == "recency" || name == "recency_decay")
    return TimelinessMode::recency_decay;
  if (name == "literal" || name == "paper_literal")
    return TimelinessMode::paper_literal;
  throw ValidationError("unknown timeliness mode: " + name);
}

void FilterConfig::validate() const {
  if (!(upload_fraction > 0.0 && upload_fraction <= 1.0))
    throw ValidationError("upload_fraction must lie in (0,1]");
  if (alpha < 0.0 || beta < 0.0)
    throw ValidationError("alpha and beta must be non-negative");
  if (alpha == 0.0 && beta == 0.0)
    throw ValidationError("at least one of alpha, beta must be positive");
}

double timeliness_score(std::size_t age_index, std::size_t window,
                        TimelinessMode mode) {
  if (window == 0) throw ValidationError("timeliness: window size must be > 0");
  const double ratio =
      static_cast<double>(age_index) / static_cast<double>(window);
  const double sign = (mode == TimelinessMode::paper_literal) ? -1.0 : 1.0;
  return 1.0 / (1.0 + std::exp(sign * ratio));
}

QualityScore score_sample(const Sample& sample, std::size_t age_index,
                          const FilterConfig& cfg, std::size_t window) {
  if (!sample.probs)
    throw ValidationError("score_sample: sample carries no probabilities");
  QualityScore s;
  s.adaptability = entropy(*sample.probs);
  s.timeliness = timeliness_score(age_index, window, cfg.mode);
  s.combined = cfg.alpha * s.adaptability + cfg.beta * s.timeliness;
  return s;
}

std::size_t upload_count(double upload_fraction, std::size_t window) {
  if (window == 0) return 0;
  // epsilon guard keeps exact products like 0.7*10 from ceiling one too high
  const double raw =
      std::ceil(upload_fraction * static_cast<double>(window) - 1e-9);
  auto count = static_cast<std::size_t>(std::max(raw, 1.0));
  return std::min(count, window);
}

std::vector<ScoredSample> filter_window(const std::vector<Sample>& cache,
                                        const FilterConfig& cfg) {
  cfg.validate();
  if (cache.empty()) return {};

  const std::size_t window = cache.size();
  std::vector<ScoredSample> scored(window);
  for (std::size_t pos = 0; pos < window; ++pos) {
    const std::size_t age = window - 1 - pos;  // cache is oldest-first
    scored[pos] = {pos, age, score_sample(cache[pos], age, cfg, window)};
  }

  std::sort(scored.begin(), scored.end(),
            [](const ScoredSample& a, const ScoredSample& b) {
              if (a.score.combined != b.score.combined)
                return a.score.combined > b.score.combined;
              return a.age_index < b.age_index;
            });

  scored.resize(upload_count(cfg.upload_fraction, window));
  return scored;
}

}  // namespace edgesync
