#ifndef COMPKAT_RANDOM_HPP
#define COMPKAT_RANDOM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace compkat {

namespace detail {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based SplitMix64 stream.
///
/// Draw number k of a stream with seed s is mix64(s + (k + 1) * golden), so
/// (seed, position) determine every future draw and the sequence is identical
/// on every platform. Child streams hash (seed, tag) into a fresh seed.
///
/// Satisfies UniformRandomBitGenerator so it can drive <random> distributions.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed = 0, std::uint64_t position = 0)
      : seed_(seed), position_(position) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64() {
    ++position_;
    return detail::mix64(seed_ + position_ * detail::kGolden);
  }

  /// Independent, reproducible substream keyed by tag. Does not advance *this.
  [[nodiscard]] RandomStream child(std::uint64_t tag) const {
    const std::uint64_t h = detail::mix64(seed_ ^ detail::mix64(tag + detail::kGolden));
    return RandomStream(detail::mix64(h + 0x632be59bd9b4e019ULL));
  }

  [[nodiscard]] RandomStream child(std::uint64_t tag, std::uint64_t index) const {
    return child(tag).child(index);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n); unbiased by rejection.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t r = next_u64();
    while (r >= limit) r = next_u64();
    return r % n;
  }

  /// Standard normal via Box-Muller; consumes exactly two draws.
  double standard_normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::uint64_t position() const { return position_; }

 private:
  std::uint64_t seed_;
  std::uint64_t position_;
};

/// `size` i.i.d. uniform draws from {0, ..., n-1}, with replacement.
inline std::vector<std::size_t> sample_indices(RandomStream& stream, std::size_t n,
                                               std::size_t size) {
  if (n == 0) throw std::invalid_argument("sample_indices: n must be positive");
  std::vector<std::size_t> out(size);
  for (auto& idx : out) idx = static_cast<std::size_t>(stream.uniform_index(n));
  return out;
}

/// A mini-batch drawn with replacement, stored as distinct indices with
/// multiplicities. `size` counts draws (duplicates included) and is what the
/// oracle accounting charges for.
struct Batch {
  std::vector<std::size_t> index;
  std::vector<std::uint64_t> count;
  std::uint64_t size = 0;

  [[nodiscard]] bool empty() const { return size == 0; }
  [[nodiscard]] std::size_t distinct() const { return index.size(); }

  static Batch from_indices(std::vector<std::size_t> draws) {
    Batch b;
    b.size = draws.size();
    std::sort(draws.begin(), draws.end());
    for (std::size_t k = 0; k < draws.size();) {
      std::size_t e = k;
      while (e < draws.size() && draws[e] == draws[k]) ++e;
      b.index.push_back(draws[k]);
      b.count.push_back(e - k);
      k = e;
    }
    return b;
  }
};

/// Draws a with-replacement mini-batch of `size` from {0, ..., n-1}.
///
/// Small batches are drawn index by index. Batches larger than both n and
/// 4096 are drawn as one multinomial vector through conditional binomials,
/// which has the same distribution at O(n) cost.
inline Batch sample_batch(RandomStream& stream, std::size_t n, std::uint64_t size) {
  if (n == 0) throw std::invalid_argument("sample_batch: n must be positive");
  constexpr std::uint64_t kDirectLimit = 4096;
  if (size <= std::max<std::uint64_t>(kDirectLimit, n)) {
    return Batch::from_indices(sample_indices(stream, n, static_cast<std::size_t>(size)));
  }
  Batch b;
  b.size = size;
  std::uint64_t remaining = size;
  for (std::size_t i = 0; i < n && remaining > 0; ++i) {
    std::uint64_t c = remaining;
    if (i + 1 < n) {
      std::binomial_distribution<std::uint64_t> binom(remaining,
                                                      1.0 / static_cast<double>(n - i));
      c = binom(stream);
    }
    if (c > 0) {
      b.index.push_back(i);
      b.count.push_back(c);
      remaining -= c;
    }
  }
  return b;
}

}  // namespace compkat

#endif  // COMPKAT_RANDOM_HPP
