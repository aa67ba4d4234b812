#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace ies {

/// Counter-based generator (Philox4x32-10) addressed by a (seed, stream) pair.
///
/// The seed is the key and the stream id occupies the upper half of the
/// 128-bit counter, so distinct streams never overlap and a task can be given
/// its own stream without coordinating with others. Output is identical on
/// every platform for the same (seed, stream).
///
/// Satisfies UniformRandomBitGenerator so it can drive std::shuffle, but the
/// helpers below are preferred because std distributions are not portable.
class SeededRng {
 public:
  using result_type = std::uint64_t;

  explicit SeededRng(std::uint64_t seed = 0, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on the open interval (0, 1).
  double uniform_open();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Unbiased integer in [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);
  /// Standard normal draw by inversion.
  double normal();

  /// A fresh generator for a derived stream of the same seed.
  SeededRng split(std::uint64_t sub_stream) const;

  /// Raw Philox4x32-10 block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox_block(
      std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;  // 32-bit words consumed from buffer_
};

/// Stream id for a (replication, role) pair, so nested tasks get disjoint
/// streams without sharing a generator.
constexpr std::uint64_t derive_stream(std::uint64_t base, std::uint64_t index,
                                      std::uint64_t role = 0) {
  return (base << 40) ^ (index << 8) ^ role;
}

}  // namespace ies
