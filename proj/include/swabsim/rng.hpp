#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace swabsim {

/// Deterministic random stream. Streams derived from the same seed but
/// different labels are independent; the same (seed, label) pair always
/// replays the same sequence regardless of platform or library version,
/// so gaussian sampling is done explicitly instead of through
/// std::normal_distribution.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view label);

  /// uniform in [0, 1)
  double uniform();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// standard normal via Box-Muller
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// Stable 64-bit mix of (seed, label); used to key independent sub-streams.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

inline RngStream rng_stream(std::uint64_t seed, std::string_view label) {
  return RngStream(seed, label);
}

}  // namespace swabsim
