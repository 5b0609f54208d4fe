#pragma once

#include <array>
#include <cstdint>

namespace phasesync {

// Counter-based PRNG (Philox 4x32-10). A stream is fully determined by
// (seed, stream_id): identical inputs replay the identical sequence, and
// distinct stream ids give independent streams, so parallel replicates
// never share generator state.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept;

  // Uniform integer in [0, bound), bound >= 1. Rejection sampling keeps the
  // distribution exact.
  std::uint64_t uniform_below(std::uint64_t bound) noexcept;

  // Standard normal via Box-Muller; the paired draw is cached.
  double normal() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 4> block_{};
  int block_pos_ = 4;  // exhausted
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream_id) { return Rng(seed, stream_id); }

}  // namespace phasesync
