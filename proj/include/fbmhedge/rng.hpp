#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace fbmhedge {

// Identifies one Monte Carlo draw. Every random quantity in an experiment
// is a pure function of (experiment seed, path index), so scheduling and
// worker count cannot change results.
struct SeedKey {
  std::uint64_t seed = 0;
  std::uint64_t path = 0;
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace detail

inline std::uint64_t derive_stream_seed(const SeedKey& key) {
  const std::uint64_t a = detail::mix64(key.seed + 0x9E3779B97F4A7C15ull);
  return detail::mix64(a ^ (key.path + 0x2545F4914F6CDD1Dull));
}

// Deterministic standard-normal stream: mt19937_64 (bit-exact by the
// standard) plus explicit Box-Muller, so the draw sequence is identical
// across platforms, runs and thread schedules.
class GaussianStream {
 public:
  explicit GaussianStream(const SeedKey& key) : engine_(derive_stream_seed(key)) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0,1], keeps the log finite
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace fbmhedge
