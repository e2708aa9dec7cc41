#pragma once

// Counter-based random streams.
//
// Every stream is a pure function of (master seed, stream id, counter): the
// Philox4x32-10 block cipher is applied to the counter block
// (counter_lo, counter_hi, stream_lo, stream_hi) under a key derived from the
// master seed. Jumping to any position is O(1), so work split across threads
// by stream id reproduces bit-for-bit at any worker count.
//
// Stream id conventions used by the simulators:
//   breakdown device   run index (1-based)
//   Eberhard source    setting_index * 1'000'000 + bin (setting_index 0..3,
//                      bin 1-based)
//   optimizer restarts restart index

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace shl {

struct MasterSeed {
  std::uint64_t value = 0;

  friend bool operator==(MasterSeed, MasterSeed) = default;
};

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Ten-round Philox4x32 bijection (Salmon et al., SC'11).
inline PhiloxBlock philox4x32_10(PhiloxBlock ctr, PhiloxKey key) noexcept {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
           static_cast<std::uint32_t>(p0)};
  }
  return ctr;
}

class RandomStream {
 public:
  RandomStream(MasterSeed seed, std::uint64_t stream_id,
               std::uint64_t counter = 0) noexcept;

  MasterSeed master() const noexcept { return master_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t counter() const noexcept { return counter_; }

  /// One cipher block per call; the counter advances by exactly 1.
  std::uint64_t next_u64() noexcept {
    const PhiloxBlock block = philox4x32_10(
        {static_cast<std::uint32_t>(counter_),
         static_cast<std::uint32_t>(counter_ >> 32),
         static_cast<std::uint32_t>(stream_id_),
         static_cast<std::uint32_t>(stream_id_ >> 32)},
        key_);
    ++counter_;
    return (static_cast<std::uint64_t>(block[1]) << 32) | block[0];
  }

  /// Uniform on [0, 1) with 53 random mantissa bits. Advances the counter by 1.
  double next_uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Integer in [0, bound) by 64x64 multiply-high. bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound) noexcept {
    return mul_high(next_u64(), bound);
  }

  /// High 64 bits of the 128-bit product a * b.
  static constexpr std::uint64_t mul_high(std::uint64_t a,
                                          std::uint64_t b) noexcept {
    const std::uint64_t a_lo = a & 0xFFFFFFFFu, a_hi = a >> 32;
    const std::uint64_t b_lo = b & 0xFFFFFFFFu, b_hi = b >> 32;
    const std::uint64_t lo_lo = a_lo * b_lo;
    const std::uint64_t hi_lo = a_hi * b_lo;
    const std::uint64_t lo_hi = a_lo * b_hi;
    const std::uint64_t cross = (lo_lo >> 32) + (hi_lo & 0xFFFFFFFFu) + lo_hi;
    return a_hi * b_hi + (hi_lo >> 32) + (cross >> 32);
  }

  /// Fills `out` with 64-bit words, two per cipher block (low then high
  /// half), advancing the counter by ceil(out.size() / 2). Blocks are
  /// computed four at a time so the cipher rounds overlap.
  void fill_u64(std::span<std::uint64_t> out) noexcept;

  /// Same stream, counter moved forward by `offset`. Does not touch *this.
  RandomStream jumped(std::uint64_t offset) const noexcept;

  void seek(std::uint64_t counter) noexcept { counter_ = counter; }

 private:
  MasterSeed master_;
  std::uint64_t stream_id_;
  std::uint64_t counter_;
  PhiloxKey key_;
};

RandomStream make_stream(MasterSeed seed, std::uint64_t stream_id) noexcept;

double next_uniform(RandomStream& stream) noexcept;

/// Draws index i with probability weights[i] / sum(weights), consuming
/// exactly one uniform. Zero-weight categories are never returned.
std::size_t sample_categorical(RandomStream& stream,
                               std::span<const double> weights);

/// Precomputed cumulative table for repeated categorical draws. Draws are
/// identical to sample_categorical on the same weights.
class CategoricalSampler {
 public:
  explicit CategoricalSampler(std::span<const double> weights);

  std::size_t operator()(RandomStream& stream) const noexcept;
  std::size_t size() const noexcept { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
  std::size_t last_positive_ = 0;
};

/// Fisher-Yates shuffle. Draws come from fill_u64, so a shuffle of n values
/// advances the stream by ceil((n - 1) / 2).
template <typename T>
void shuffle(std::span<T> values, RandomStream& stream) noexcept {
  constexpr std::size_t kBatch = 256;
  std::array<std::uint64_t, kBatch> draws;
  std::size_t i = values.size();
  while (i > 1) {
    const std::size_t take = std::min(kBatch, i - 1);
    stream.fill_u64(std::span<std::uint64_t>(draws.data(), take));
    for (std::size_t d = 0; d < take; ++d, --i) {
      const auto j = static_cast<std::size_t>(RandomStream::mul_high(draws[d], i));
      std::swap(values[i - 1], values[j]);
    }
  }
}

}  // namespace shl
