#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace earlystop {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Generator identity (recorded in experiment metadata):
// mt19937_64 keyed by splitmix64(seed, stream), Box-Muller gaussians.
// Distinct streams decouple components (data, init, noise, one per MC trial),
// so results do not depend on evaluation order.
class SubRng {
 public:
  SubRng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t st = seed ^ (0x6A09E667F3BCC909ULL + stream * 0x9E3779B97F4A7C15ULL);
    std::uint64_t a = splitmix64(st);
    std::uint64_t b = splitmix64(st);
    engine_.seed(a ^ (b << 1));
  }

  std::uint64_t bits() { return engine_(); }

  // Uniform in (0, 1].
  double uniform01() { return 1.0 - (engine_() >> 11) * 0x1.0p-53; }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double gaussian(double stddev) { return stddev * gaussian(); }

  int rademacher() { return (engine_() & 1ULL) ? +1 : -1; }

  static const char* name() { return "mt19937_64/splitmix64-substreams/box-muller"; }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stream labels used by the experiment pipeline.
inline constexpr std::uint64_t kStreamData = 1;
inline constexpr std::uint64_t kStreamInit = 2;
inline constexpr std::uint64_t kStreamNoise = 3;
inline constexpr std::uint64_t kStreamTrialBase = 1000;

}  // namespace earlystop
