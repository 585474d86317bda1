#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace edgesync {

// Root of all randomness in the artifact. Every component derives its own
// stream from a parent seed via split_seed, so two runs with equal seeds and
// configs replay bit-identically.
struct RngSeed {
  std::uint64_t value = 0;
};

// FNV-1a over the tag bytes, then a splitmix64 finalizer over the combined
// word. Distinct tags collide only with ~2^-64 probability.
RngSeed split_seed(RngSeed parent, std::string_view stream_tag);

// splitmix64 stream. Hand-rolled (not <random>) so sequences do not depend on
// the standard library implementation.
class Rng {
 public:
  explicit Rng(RngSeed seed) : state_(seed.value) {}

  std::uint64_t next_u64();

  // uniform in [0, 1)
  double uniform();
  double uniform(double lo, double hi);

  // uniform integer in [0, bound)
  std::uint64_t uniform_int(std::uint64_t bound);

  // standard normal, Box-Muller with one cached draw
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace edgesync
