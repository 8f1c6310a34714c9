#include "ssfs/random.hpp"

#include <cmath>
#include <numbers>

namespace ssfs {

std::size_t Rng::below(std::size_t n) {
  const auto bound = static_cast<std::uint64_t>(n);
  // Reject the low sliver that would bias the modulo.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    std::uint64_t x = engine_();
    if (x >= threshold) return static_cast<std::size_t>(x % bound);
  }
}

double Rng::normal() {
  const double u1 = uniform_positive();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) {
  return mix64(mix64(parent) ^ (tag * 0xD1B54A32D192ED03ULL));
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag, std::uint64_t index) {
  return mix64(derive_seed(parent, tag) ^ (index * 0x8CB92BA72F3D8DD7ULL + 1));
}

}  // namespace ssfs
