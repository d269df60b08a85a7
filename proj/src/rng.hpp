// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace copplace {

// Deterministic stream derivation: every consumer of randomness owns an
// Rng derived from (root seed, stream tag, index). Results must not
// depend on scheduling, so threads never share a stream.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag,
                              std::uint64_t index = 0) {
  return splitmix64(splitmix64(seed ^ 0x6a09e667f3bcc909ULL) ^
                    splitmix64(tag * 0x9e3779b97f4a7c15ULL + index));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t tag, std::uint64_t index = 0)
      : engine_(mix_seed(seed, tag, index)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() {
    return (engine_() >> 11) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // rejection sampling keeps the draw unbiased
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller (self-contained so that streams are
  /// reproducible independently of the standard library version).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 1e-300);
    u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stream tags (arbitrary distinct constants).
namespace rng_tag {
inline constexpr std::uint64_t kScadaDraw = 1;
inline constexpr std::uint64_t kMeasurementNoise = 2;
inline constexpr std::uint64_t kTrueState = 3;
inline constexpr std::uint64_t kPriorPerturbation = 4;
inline constexpr std::uint64_t kRounding = 5;
inline constexpr std::uint64_t kObservabilityTies = 6;
}  // namespace rng_tag

}  // namespace copplace
