#include "ssfs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace ssfs {

namespace {

constexpr std::size_t kExactLimit = 12;

}  // namespace

std::vector<double> mid_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

SignedRankResult wilcoxon_signed_rank(std::span<const double> diffs) {
  std::vector<double> magnitude;
  std::vector<bool> positive;
  for (double d : diffs) {
    if (!std::isfinite(d)) throw std::invalid_argument("wilcoxon_signed_rank: non-finite difference");
    if (d == 0.0) continue;
    magnitude.push_back(std::abs(d));
    positive.push_back(d > 0.0);
  }
  if (magnitude.empty()) throw AllZeroDifferences();

  const std::size_t n = magnitude.size();
  const auto ranks = mid_ranks(magnitude);
  SignedRankResult out;
  out.n_effective = n;
  for (std::size_t i = 0; i < n; ++i) (positive[i] ? out.r_plus : out.r_minus) += ranks[i];

  if (n <= kExactLimit) {
    out.exact = true;
    // Doubled ranks are integers even with mid-rank ties; count how many of
    // the 2^n sign patterns reach each doubled positive-rank sum.
    std::vector<std::size_t> doubled(n);
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      doubled[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
      total += doubled[i];
    }
    std::vector<std::uint64_t> ways(total + 1, 0);
    ways[0] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t s = total; s >= doubled[i]; --s) {
        ways[s] += ways[s - doubled[i]];
        if (s == doubled[i]) break;
      }
    }
    // Two-sided: sums at least as far from the centre as observed, i.e.
    // |2s - total| >= |2·obs - total| in doubled units.
    const auto observed = static_cast<std::int64_t>(std::llround(2.0 * out.r_plus));
    const std::int64_t centre2 = static_cast<std::int64_t>(total);
    const std::int64_t reach = std::abs(2 * observed - centre2);
    std::uint64_t extreme = 0;
    for (std::size_t s = 0; s <= total; ++s) {
      if (std::abs(2 * static_cast<std::int64_t>(s) - centre2) >= reach) extreme += ways[s];
    }
    out.p_value = static_cast<double>(extreme) / static_cast<double>(std::uint64_t{1} << n);
  } else {
    const double nn = static_cast<double>(n);
    double tie_term = 0.0;
    auto sorted = ranks;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
    const double mean = nn * (nn + 1.0) / 4.0;
    const double variance = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    const double z = variance > 0.0 ? (out.r_plus - mean) / std::sqrt(variance) : 0.0;
    out.p_value = std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
  }
  return out;
}

}  // namespace ssfs
