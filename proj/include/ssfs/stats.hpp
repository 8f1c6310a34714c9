#pragma once

#include "ssfs/common.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace ssfs {

/// Thrown when every paired difference is zero.
class AllZeroDifferences : public Error {
 public:
  AllZeroDifferences() : Error("all-zero diffs") {}
};

struct SignedRankResult {
  double r_plus = 0.0;
  double r_minus = 0.0;
  std::size_t n_effective = 0;
  /// Two-sided.
  double p_value = 1.0;
  bool exact = false;
};

/// Mid-ranks of |x| in ascending order (1-based, ties share the average rank).
std::vector<double> mid_ranks(std::span<const double> values);

/// Zero differences are dropped. The p-value is exact (full signed-rank
/// distribution, ties included) for n <= 12 and a tie-corrected normal
/// approximation otherwise.
SignedRankResult wilcoxon_signed_rank(std::span<const double> diffs);

}  // namespace ssfs
