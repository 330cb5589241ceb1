#pragma once

// Counter-based random streams. Every (seed, stream name) pair maps to an
// independent Philox4x32-10 sequence, so adding a stream never perturbs the
// draws seen by any other stream.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>

namespace resilsim {

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr void mulhilo32(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace detail

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
constexpr std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                     std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t M0 = 0xD2511F53, M1 = 0xCD9E8D57;
  constexpr std::uint32_t W0 = 0x9E3779B9, W1 = 0xBB67AE85;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0 = 0, lo0 = 0, hi1 = 0, lo1 = 0;
    detail::mulhilo32(M0, ctr[0], hi0, lo0);
    detail::mulhilo32(M1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += W0;
    key[1] += W1;
  }
  return ctr;
}

/// A UniformRandomBitGenerator over one Philox stream.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::string_view stream)
      : RandomStream(seed, detail::fnv1a(stream)) {}

  RandomStream(std::uint64_t seed, std::uint64_t stream_id) {
    const std::uint64_t k = detail::splitmix64(seed);
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    stream_ = detail::splitmix64(stream_id ^ 0xA5A5A5A5DEADBEEFULL);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (buffered_ == 0) {
      block_ = philox4x32_10({static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                              static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                             key_);
      ++counter_;
      buffered_ = 2;
    }
    const int i = 2 - buffered_;
    --buffered_;
    return (static_cast<std::uint64_t>(block_[2 * i + 1]) << 32) | block_[2 * i];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1], safe as a log() argument.
  double uniform_open0() { return 1.0 - uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  double exponential(double rate) { return -std::log(uniform_open0()) / rate; }

  /// Standard normal via Box-Muller; one value per call.
  double normal() {
    const double u1 = uniform_open0();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : (*this)() % n; }

  std::uint64_t position() const { return counter_ * 2 - static_cast<std::uint64_t>(buffered_); }

 private:
  std::array<std::uint32_t, 2> key_{};
  std::uint64_t stream_ = 0;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int buffered_ = 0;
};

}  // namespace resilsim
