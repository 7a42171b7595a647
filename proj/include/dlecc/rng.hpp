#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace dlecc {

/// SplitMix64 finalizer. Used for seeding and for stream derivation.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/**
 * Derive an independent stream seed from a base seed and a list of tags.
 *
 * Rule: s <- splitmix64(seed); for each tag t: s <- splitmix64(s ^ splitmix64(t + 0x9E3779B97F4A7C15)).
 * The result depends on the tag order, so (seed, depth, bucket) and
 * (seed, bucket, depth) name different streams. Every Monte Carlo loop in the
 * library keys its streams this way, which makes results independent of the
 * number of worker threads.
 */
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) noexcept;

/**
 * xoshiro256** generator with portable uniform and normal variates.
 *
 * The standard library distributions are implementation-defined, so uniform
 * doubles and Gaussians are generated here to keep seeded runs bitwise
 * reproducible across toolchains.
 */
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Standard normal (Marsaglia polar method).
  double normal() noexcept;
  /// Uniform integer on [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;
  bool bit() noexcept { return ((*this)() >> 63) != 0; }

  /// Child generator whose seed is derive_seed(seed_, {tag}).
  Rng split(std::uint64_t tag) const noexcept;

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_{};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dlecc
