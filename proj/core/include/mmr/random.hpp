#pragma once

#include <cstdint>
#include <limits>

#include <mmr/core.hpp>

namespace mmr {

/// Counter-based generator: the i-th output of stream (seed, stream) is
/// SplitMix64's finalizer applied to key + (i + 1) * 0x9E3779B97F4A7C15, where
/// key = mix(seed ^ mix(stream ^ 0xD1B54A32D192ED03)). Outputs are a pure function of
/// (seed, stream, counter), so streams reproduce bit-for-bit on every platform.
///
/// Distributions are implemented here rather than through <random> because the
/// standard distributions are not specified bit-exactly across library vendors.
class CounterRng {
public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n). Requires n > 0.
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via the Box-Muller transform.
  double normal();
  /// Uniform direction on the unit sphere.
  Point3 unit_vector();

  std::uint64_t counter() const noexcept { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Independent child seed for (seed, index); used to give each repeat its own stream family.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace mmr
