#include "shl/rng.hpp"

#include <cmath>
#include <string>

#include "shl/error.hpp"

namespace shl {
namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::vector<double> validated_cumulative(std::span<const double> weights) {
  if (weights.empty()) {
    throw Error(ErrorKind::kInvalidDistribution, "empty weight vector");
  }
  std::vector<double> cumulative;
  cumulative.reserve(weights.size());
  double total = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorKind::kInvalidDistribution,
                  "weights must be finite and non-negative");
    }
    total += w;
    cumulative.push_back(total);
  }
  if (!(total > 0.0)) {
    throw Error(ErrorKind::kInvalidDistribution, "weights sum to zero");
  }
  return cumulative;
}

}  // namespace

RandomStream::RandomStream(MasterSeed seed, std::uint64_t stream_id,
                           std::uint64_t counter) noexcept
    : master_(seed), stream_id_(stream_id), counter_(counter) {
  const std::uint64_t mixed = splitmix64(seed.value);
  key_ = {static_cast<std::uint32_t>(mixed),
          static_cast<std::uint32_t>(mixed >> 32)};
}

void RandomStream::fill_u64(std::span<std::uint64_t> out) noexcept {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  constexpr std::size_t kLanes = 4;
  const auto s_lo = static_cast<std::uint32_t>(stream_id_);
  const auto s_hi = static_cast<std::uint32_t>(stream_id_ >> 32);

  std::size_t pos = 0;
  while (pos < out.size()) {
    std::uint32_t c0[kLanes], c1[kLanes], c2[kLanes], c3[kLanes];
    for (std::size_t l = 0; l < kLanes; ++l) {
      const std::uint64_t ctr = counter_ + l;
      c0[l] = static_cast<std::uint32_t>(ctr);
      c1[l] = static_cast<std::uint32_t>(ctr >> 32);
      c2[l] = s_lo;
      c3[l] = s_hi;
    }
    std::uint32_t k0 = key_[0], k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k0 += kW0;
        k1 += kW1;
      }
      for (std::size_t l = 0; l < kLanes; ++l) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c0[l];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c2[l];
        const std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1[l] ^ k0;
        const std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3[l] ^ k1;
        c1[l] = static_cast<std::uint32_t>(p1);
        c3[l] = static_cast<std::uint32_t>(p0);
        c0[l] = n0;
        c2[l] = n2;
      }
    }
    for (std::size_t l = 0; l < kLanes && pos < out.size(); ++l) {
      out[pos++] = (static_cast<std::uint64_t>(c1[l]) << 32) | c0[l];
      if (pos < out.size()) {
        out[pos++] = (static_cast<std::uint64_t>(c3[l]) << 32) | c2[l];
      }
      ++counter_;
    }
  }
}

RandomStream RandomStream::jumped(std::uint64_t offset) const noexcept {
  RandomStream copy = *this;
  copy.counter_ += offset;
  return copy;
}

RandomStream make_stream(MasterSeed seed, std::uint64_t stream_id) noexcept {
  return RandomStream(seed, stream_id, 0);
}

double next_uniform(RandomStream& stream) noexcept {
  return stream.next_uniform();
}

std::size_t sample_categorical(RandomStream& stream,
                               std::span<const double> weights) {
  return CategoricalSampler(weights)(stream);
}

CategoricalSampler::CategoricalSampler(std::span<const double> weights)
    : cumulative_(validated_cumulative(weights)) {
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) last_positive_ = i;
  }
}

std::size_t CategoricalSampler::operator()(
    RandomStream& stream) const noexcept {
  const double target = stream.next_uniform() * cumulative_.back();
  // First index whose cumulative weight exceeds the target; zero-weight
  // entries share their predecessor's cumulative value and are skipped.
  std::size_t lo = 0;
  std::size_t hi = cumulative_.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (cumulative_[mid] > target) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo < cumulative_.size() ? lo : last_positive_;
}

}  // namespace shl
