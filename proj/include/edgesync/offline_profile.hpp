#pragma once

#include <functional>
#include <string>
#include <vector>

#include "edgesync/bho.hpp"
#include "edgesync/config.hpp"
#include "edgesync/drift_stream.hpp"

namespace edgesync {

struct ProfileResult {
  std::vector<HyperParams> stage1_optima;  // one per training stream
  HyperParams h0;                          // mean of the optima in unit space
  HyperParams best;                        // stage-2 refinement
  double best_value = 0.0;
  std::vector<Observation> stage2_history;
};

// Two-stage offline search: per-stream BHO runs whose optima average (in the
// normalized/log space) into the starting point h0, then one BHO run over
// windows stitched from random segments of every stream, seeded with h0.
// Objective evaluations retrain a fresh student and score validation
// accuracy. Requires at least two streams, each at least one profiling
// window long.
ProfileResult offline_profile(const std::vector<FeatureStream>& streams,
                              const SimConfig& cfg, RngSeed seed);

// Same procedure with injectable objectives, so constructed analytic
// objectives can exercise the h0 averaging and stage-2 seeding directly.
ProfileResult offline_profile_with_objectives(
    const std::vector<std::function<double(const HyperParams&)>>& per_stream,
    const std::function<double(const HyperParams&)>& combined,
    const SearchBox& box, const EiConfig& cfg, RngSeed seed);

// Plain-text profile record: the chosen triple, h0, the per-stream optima,
// and the stage-2 search history.
void save_profile(const ProfileResult& result, const std::string& path);
HyperParams load_profile_params(const std::string& path);

}  // namespace edgesync
