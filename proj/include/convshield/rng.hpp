#pragma once

#include <cstdint>

namespace convshield {

/// Counter-based stream: the i-th draw is a bijective 64-bit mix of
/// (key(seed, stream_id), i), so any (seed, stream_id) pair yields the same
/// sequence no matter which thread consumes it or in which order streams are
/// created.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t position() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform in [0, 1) with 53 random bits.
  double next_unit() noexcept;
  /// lo + (hi - lo) * u with u in [0, 1).
  double uniform(double lo, double hi) noexcept;
  /// Standard normal via Box-Muller; the paired variate is cached.
  double normal() noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// Finalizer from SplitMix64 (Stafford variant 13).
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Domain-separated child seed, so weights, base inputs and perturbations
/// drawn from one user seed never share streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose) noexcept;

namespace seed_purpose {
inline constexpr std::uint64_t kWeights = 0x5745494748545300ULL;
inline constexpr std::uint64_t kBaseInput = 0x42415345494e5000ULL;
inline constexpr std::uint64_t kPerturbation = 0x5045525455524200ULL;
inline constexpr std::uint64_t kPairs = 0x5041495253000000ULL;
}  // namespace seed_purpose

}  // namespace convshield
