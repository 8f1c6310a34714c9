#include "ssfs/redundancy.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ssfs {

namespace {

constexpr double kDegenerateVariance = 1e-10;
constexpr double kMaxAbsR = 1.0 - 1e-12;

bool too_few_samples(std::size_t n, std::size_t cond_size) { return n < cond_size + 4; }

}  // namespace

void CiConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (max_cond_size < 0) throw ConfigError("max_cond_size must be non-negative");
}

Matrix correlation_matrix(const Matrix& data) {
  const Index m = data.rows();
  const Index d = data.cols();
  Matrix centered = data.rowwise() - data.colwise().mean();
  Vector scale(d);
  for (Index j = 0; j < d; ++j) {
    const double sd = std::sqrt(centered.col(j).squaredNorm() / static_cast<double>(std::max<Index>(m, 1)));
    const double magnitude = std::max(1.0, data.col(j).cwiseAbs().maxCoeff());
    scale(j) = sd > 1e-12 * magnitude ? 1.0 / (sd * std::sqrt(static_cast<double>(m))) : 0.0;
  }
  centered = centered * scale.asDiagonal();
  Matrix corr = centered.transpose() * centered;
  for (Index a = 0; a < d; ++a) {
    for (Index b = 0; b < d; ++b) corr(a, b) = std::clamp(corr(a, b), -1.0, 1.0);
    if (scale(a) != 0.0) corr(a, a) = 1.0;
  }
  return corr;
}

PartialCorrelation partial_correlation_from(const Matrix& corr, Index i, Index j, std::span<const Index> cond) {
  const auto k = static_cast<Index>(cond.size());
  Eigen::Matrix2d cov;
  cov << corr(i, i), corr(i, j), corr(j, i), corr(j, j);
  if (k > 0) {
    Matrix r_cc(k, k);
    Matrix r_ca(k, 2);
    for (Index a = 0; a < k; ++a) {
      for (Index b = 0; b < k; ++b) r_cc(a, b) = corr(cond[a], cond[b]);
      r_ca(a, 0) = corr(cond[a], i);
      r_ca(a, 1) = corr(cond[a], j);
    }
    // Minimum-norm solve keeps the Schur complement valid for collinear conditioning sets.
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(r_cc);
    const Matrix coef = cod.solve(r_ca);
    cov -= r_ca.transpose() * coef;
  }
  if (cov(0, 0) <= kDegenerateVariance || cov(1, 1) <= kDegenerateVariance) return {0.0, true};
  if (i == j) return {1.0, false};
  const double r = cov(0, 1) / std::sqrt(cov(0, 0) * cov(1, 1));
  return {std::clamp(r, -1.0, 1.0), false};
}

PartialCorrelation partial_correlation(const Matrix& data, Index i, Index j, std::span<const Index> cond) {
  const Index d = data.cols();
  auto in_range = [d](Index v) { return v >= 0 && v < d; };
  if (!in_range(i) || !in_range(j) || !std::all_of(cond.begin(), cond.end(), in_range)) {
    throw std::out_of_range("partial_correlation: column index out of range");
  }
  if (std::find(cond.begin(), cond.end(), i) != cond.end() || std::find(cond.begin(), cond.end(), j) != cond.end()) {
    throw std::invalid_argument("partial_correlation: conditioning set must exclude i and j");
  }
  if (too_few_samples(static_cast<std::size_t>(data.rows()), cond.size())) {
    throw InsufficientSamples("partial correlation needs more than |cond| + 3 samples");
  }
  std::vector<Index> cols{i, j};
  cols.insert(cols.end(), cond.begin(), cond.end());
  const Matrix corr = correlation_matrix(data(Eigen::all, cols));
  std::vector<Index> local(cond.size());
  std::iota(local.begin(), local.end(), Index{2});
  return partial_correlation_from(corr, 0, i == j ? 0 : 1, local);
}

ZTest fisher_z_test(double r, std::size_t n_samples, std::size_t cond_size, double alpha) {
  if (too_few_samples(n_samples, cond_size)) {
    throw InsufficientSamples("Fisher z test needs n - |cond| - 3 >= 1 (n = " + std::to_string(n_samples) +
                              ", |cond| = " + std::to_string(cond_size) + ")");
  }
  const double a = std::min(std::abs(r), kMaxAbsR);
  const double z = 0.5 * std::log((1.0 + a) / (1.0 - a));
  ZTest out;
  out.statistic = std::sqrt(static_cast<double>(n_samples - cond_size - 3)) * std::abs(z);
  out.p_value = std::clamp(std::erfc(out.statistic / std::sqrt(2.0)), 0.0, 1.0);
  out.independent = out.p_value > alpha;
  return out;
}

void for_each_subset(std::size_t n, std::size_t max_size, const std::function<bool(std::span<const std::size_t>)>& visit) {
  const std::size_t top = std::min(n, max_size);
  std::vector<std::size_t> comb;
  for (std::size_t k = 0; k <= top; ++k) {
    comb.resize(k);
    std::iota(comb.begin(), comb.end(), std::size_t{0});
    for (;;) {
      if (visit(comb)) return;
      // Advance to the next k-combination in lexicographic order.
      std::size_t pos = k;
      while (pos > 0 && comb[pos - 1] == n - k + pos - 1) --pos;
      if (pos == 0) break;
      ++comb[pos - 1];
      for (std::size_t t = pos; t < k; ++t) comb[t] = comb[t - 1] + 1;
    }
  }
}

bool SelectedSet::contains(std::size_t feature_id) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const SelectedFeature& e) { return e.feature_id == feature_id; });
}

void SelectedSet::add(std::size_t feature_id, Vector column, int admission_window) {
  if (contains(feature_id)) throw std::invalid_argument("feature " + std::to_string(feature_id) + " already selected");
  entries_.push_back({feature_id, std::move(column), admission_window});
}

void SelectedSet::remove(std::size_t feature_id) {
  std::erase_if(entries_, [&](const SelectedFeature& e) { return e.feature_id == feature_id; });
}

std::vector<std::size_t> SelectedSet::ids() const {
  std::vector<std::size_t> out;
  for (const auto& e : entries_) out.push_back(e.feature_id);
  return out;
}

Matrix SelectedSet::columns(Index rows) const {
  Matrix out(rows, static_cast<Index>(entries_.size()));
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    if (entries_[k].column.size() != rows) throw DataError("selected column length does not match row count");
    out.col(static_cast<Index>(k)) = entries_[k].column;
  }
  return out;
}

namespace {

Vector label_column(std::span<const int> labels) {
  Vector y(static_cast<Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<Index>(i)) = labels[i];
  return y;
}

/// True when some admissible subset of `pool` renders `target` independent of the label column.
bool separable(const Matrix& corr, Index target, Index label, const std::vector<Index>& pool, std::size_t n_samples,
               const CiConfig& cfg) {
  bool found = false;
  std::vector<Index> cond;
  for_each_subset(pool.size(), static_cast<std::size_t>(cfg.max_cond_size), [&](std::span<const std::size_t> subset) {
    if (too_few_samples(n_samples, subset.size())) return false;  // cannot reject dependence
    cond.clear();
    for (std::size_t s : subset) cond.push_back(pool[s]);
    const auto pc = partial_correlation_from(corr, target, label, cond);
    found = fisher_z_test(pc.r, n_samples, cond.size(), cfg.alpha).independent;
    return found;
  });
  return found;
}

}  // namespace

bool relevance_check(const Vector& candidate, const SelectedSet& selected, std::span<const int> labels, const CiConfig& cfg) {
  cfg.validate();
  const auto m = static_cast<Index>(labels.size());
  if (candidate.size() != m) throw DataError("candidate length does not match label count");
  Matrix data(m, 2 + static_cast<Index>(selected.size()));
  data.col(0) = candidate;
  data.col(1) = label_column(labels);
  data.rightCols(static_cast<Index>(selected.size())) = selected.columns(m);
  const Matrix corr = correlation_matrix(data);
  std::vector<Index> pool(selected.size());
  std::iota(pool.begin(), pool.end(), Index{2});
  return !separable(corr, 0, 1, pool, labels.size(), cfg);
}

PruneResult prune_redundant(const SelectedSet& selected, std::span<const int> labels, const CiConfig& cfg) {
  cfg.validate();
  const auto m = static_cast<Index>(labels.size());
  const auto n = static_cast<Index>(selected.size());
  Matrix data(m, 1 + n);
  data.col(0) = label_column(labels);
  data.rightCols(n) = selected.columns(m);
  const Matrix corr = correlation_matrix(data);

  std::vector<Index> alive(static_cast<std::size_t>(n));
  std::iota(alive.begin(), alive.end(), Index{1});
  PruneResult result;
  for (Index pos = 1; pos <= n; ++pos) {
    std::vector<Index> others;
    for (Index a : alive)
      if (a != pos) others.push_back(a);
    if (separable(corr, pos, 0, others, labels.size(), cfg)) {
      std::erase(alive, pos);
      result.removed.push_back(selected.entries()[static_cast<std::size_t>(pos - 1)].feature_id);
    }
  }
  for (Index a : alive) {
    const auto& e = selected.entries()[static_cast<std::size_t>(a - 1)];
    result.kept.add(e.feature_id, e.column, e.admission_window);
  }
  return result;
}

}  // namespace ssfs
