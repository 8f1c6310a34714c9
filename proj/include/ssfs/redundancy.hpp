#pragma once

#include "ssfs/common.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ssfs {

struct CiConfig {
  double alpha = 0.05;
  int max_cond_size = 3;

  void validate() const;
};

struct PartialCorrelation {
  double r = 0.0;
  /// A variable had (conditional) variance below 1e-10, so r was forced to 0.
  bool degenerate = false;
};

/// Partial correlation of columns i and j given `cond`, from the Schur
/// complement of the sample correlation matrix. Throws InsufficientSamples
/// when M <= |cond| + 3.
PartialCorrelation partial_correlation(const Matrix& data, Index i, Index j, std::span<const Index> cond);

/// Same, on a precomputed correlation matrix (unit diagonal, zero rows for
/// constant columns).
PartialCorrelation partial_correlation_from(const Matrix& corr, Index i, Index j, std::span<const Index> cond);

/// Sample correlation matrix; constant columns get an all-zero row/column
/// (diagonal included) so downstream tests see them as degenerate.
Matrix correlation_matrix(const Matrix& data);

struct ZTest {
  double statistic = 0.0;
  double p_value = 1.0;
  bool independent = true;
};

/// z = atanh(r), stat = sqrt(n − |cond| − 3)·|z|, p = 2(1 − Φ(stat)),
/// independent iff p > alpha. |r| is clipped to 1 − 1e-12.
ZTest fisher_z_test(double r, std::size_t n_samples, std::size_t cond_size, double alpha);

/// Visits subsets of {0..n-1} with at most max_size members: by cardinality,
/// then lexicographically. Stops early when visit returns true.
void for_each_subset(std::size_t n, std::size_t max_size, const std::function<bool(std::span<const std::size_t>)>& visit);

struct SelectedFeature {
  std::size_t feature_id = 0;
  Vector column;
  int admission_window = 0;
};

/// Ordered selected set; order is admission order and ids are unique.
class SelectedSet {
 public:
  const std::vector<SelectedFeature>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool contains(std::size_t feature_id) const;
  /// Throws std::invalid_argument on a duplicate id.
  void add(std::size_t feature_id, Vector column, int admission_window);
  void remove(std::size_t feature_id);
  std::vector<std::size_t> ids() const;
  /// M×|S| matrix of the stored columns in admission order.
  Matrix columns(Index rows) const;

 private:
  std::vector<SelectedFeature> entries_;
};

/// Admit iff the candidate stays dependent on the labels given every subset
/// of the selected set with at most max_cond_size members (the empty set
/// included). Sample-size failures count as dependence.
bool relevance_check(const Vector& candidate, const SelectedSet& selected, std::span<const int> labels, const CiConfig& cfg);

struct PruneResult {
  SelectedSet kept;
  std::vector<std::size_t> removed;
};

/// One pass in admission order; a feature is dropped as soon as some subset of
/// the remaining features makes it independent of the labels.
PruneResult prune_redundant(const SelectedSet& selected, std::span<const int> labels, const CiConfig& cfg);

}  // namespace ssfs
