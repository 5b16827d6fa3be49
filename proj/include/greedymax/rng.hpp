#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <limits>
#include <string_view>

namespace greedymax {

/// Counter-based generator: the n-th output is splitmix64(key + n * gamma).
/// Any position of the stream can be reproduced from (key, counter) alone.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key = 0, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept { return mix(key_ + (++counter_) * kGamma); }

  /// Uniform double in [0, 1) built from the top 53 bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform index in [0, n), multiply-shift reduction.
  std::size_t index(std::size_t n) noexcept {
    return static_cast<std::size_t>((static_cast<unsigned __int128>((*this)()) * n) >> 64);
  }

  /// Standard normal via Box-Muller; stateless so replay never depends on a cached pair.
  double normal() noexcept {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  friend bool operator==(const CounterRng&, const CounterRng&) = default;

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_;
};

/// FNV-1a, used to turn substream names into key material.
constexpr std::uint64_t hash_name(std::string_view name) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Independent named stream derived from a master seed ("proposal", "batches", ...).
inline CounterRng substream(std::uint64_t seed, std::string_view name) noexcept {
  return CounterRng(CounterRng::mix(CounterRng::mix(seed) ^ hash_name(name)));
}

/// Numbered child stream, e.g. one per certification trial or per sweep cell.
inline CounterRng substream(std::uint64_t seed, std::string_view name, std::uint64_t index) noexcept {
  return CounterRng(CounterRng::mix(substream(seed, name).key() ^ CounterRng::mix(index + 1)));
}

}  // namespace greedymax
