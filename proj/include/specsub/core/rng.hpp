#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace specsub {

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// Seeded counter-based random stream: draw i is splitmix64(key + i * golden),
// with key a hash of (seed, stream id). Uniforms and normals are derived here by
// hand so the draws are identical on every platform.
//
// Trial t of a run can be replayed from (seed, t) without replaying trials 0..t-1.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream), key_(mix(seed, stream)) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_; }

  // Child stream; deterministic in (seed, stream id, child index).
  RngStream split(std::uint64_t child) const {
    return RngStream(detail::splitmix64(mix(seed_, stream_) ^ detail::splitmix64(child + 1)), child);
  }

  std::uint64_t next_u64() { return engine(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1].
  double uniform_pos() { return (static_cast<double>(engine() >> 11) + 1.0) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Lemire-style rejection keeps the result unbiased.
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t x = engine();
      if (x >= threshold) return x % n;
    }
  }

  bool bernoulli(double p) { return uniform() < p; }

  double sign() { return (engine() >> 63) ? 1.0 : -1.0; }

 private:
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    return detail::splitmix64(detail::splitmix64(seed) ^ (stream * 0xD1B54A32D192ED03ULL));
  }

  std::uint64_t engine() noexcept { return detail::splitmix64(key_ + 0x9E3779B97F4A7C15ULL * counter_++); }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace specsub
