#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace ssfs {

/// Seeded generator with platform-independent output.
///
/// Only the raw 64-bit mt19937_64 stream is used; floating-point and
/// bounded-integer draws are derived here rather than through the
/// implementation-defined std distributions, so masks, factor inits and DE
/// trajectories are bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_positive() { return 1.0 - uniform(); }

  /// Uniform integer on [0, n). n must be positive.
  std::size_t below(std::size_t n);

  /// Standard normal via Box-Muller (one value per call).
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// Fisher-Yates shuffle driven by Rng::below.
template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = rng.below(i);
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Derives an independent sub-seed from a parent seed and a stream tag.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag);
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag, std::uint64_t index);

}  // namespace ssfs
