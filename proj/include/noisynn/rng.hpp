#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace noisynn {

namespace detail {

// SplitMix64 output function; also used as a 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
  state += 0x9E3779B97F4A7C15ULL;
  return mix64(state);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// xoshiro256** generator. Satisfies UniformRandomBitGenerator so it can be
/// handed to <random> distributions in tests, but the library itself only
/// uses uniform01() to keep sample sequences identical across standard
/// library implementations.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Stream(std::uint64_t key) noexcept {
    std::uint64_t sm = key;
    for (auto& s : state_) s = detail::splitmix64_next(sm);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    const std::uint64_t result = detail::rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  constexpr double uniform01() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

 private:
  std::array<std::uint64_t, 4> state_{};
};

/// Master seed plus the (replicate, point) -> substream derivation rule.
/// A substream depends only on the triple of integers, so results do not
/// depend on evaluation order or on how replicates are split across workers.
struct SeedSpec {
  std::uint64_t master_seed = 20221;

  [[nodiscard]] constexpr Stream stream(std::uint64_t replicate,
                                        std::uint64_t point) const noexcept {
    std::uint64_t key = detail::mix64(master_seed ^ 0x6A09E667F3BCC909ULL);
    key = detail::mix64(key ^ detail::mix64(replicate + 0x9E3779B97F4A7C15ULL));
    key = detail::mix64(key ^ detail::mix64(point + 0xC2B2AE3D27D4EB4FULL));
    return Stream{key};
  }
};

}  // namespace noisynn
