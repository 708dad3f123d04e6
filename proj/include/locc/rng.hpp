#pragma once

// Counter-based random numbers (Philox4x32-10). A stream is identified by
// (seed, stream id); draw k of a stream depends on nothing else, so trials
// can be evaluated in any order or on any number of threads.

#include <array>
#include <cstdint>

namespace locc {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Ten-round Philox 4x32 bijection.
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;
  /// Uniform double in [0, 1) with 53 random bits.
  double next_uniform() noexcept;
  bool next_bit() noexcept { return (next_u32() & 1u) != 0; }

 private:
  void refill() noexcept;

  PhiloxKey key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  PhiloxCounter buffer_{};
  unsigned used_ = 4;
};

}  // namespace locc
