#include "ssfs/classify.hpp"

#include "ssfs/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ssfs {

namespace {

int majority(std::span<const int> counts) {
  // max_element returns the first maximum, i.e. the smallest label id.
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

int count_classes(Labels y) {
  int k = 0;
  for (int c : y) k = std::max(k, c + 1);
  return k;
}

std::vector<Index> select_rows(const std::vector<int>& fold_of, int fold, bool in_fold) {
  std::vector<Index> rows;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if ((fold_of[i] == fold) == in_fold) rows.push_back(static_cast<Index>(i));
  }
  return rows;
}

/// Pre-order tree builder shared by CART and forest trees.
class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, Labels y, const ClassifierConfig& cfg, int n_classes, Rng* feature_rng)
      : x_(x), y_(y), cfg_(cfg), n_classes_(n_classes), feature_rng_(feature_rng) {
    all_features_.resize(static_cast<std::size_t>(x.cols()));
    std::iota(all_features_.begin(), all_features_.end(), Index{0});
  }

  DecisionTree build(std::vector<Index> rows) {
    grow(std::move(rows), 0);
    return DecisionTree(std::move(nodes_));
  }

 private:
  struct Split {
    Index feature = -1;
    double threshold = 0.0;
    double impurity = std::numeric_limits<double>::infinity();
  };

  int grow(std::vector<Index> rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    std::vector<int> counts(static_cast<std::size_t>(n_classes_), 0);
    for (Index r : rows) ++counts[static_cast<std::size_t>(y_[static_cast<std::size_t>(r)])];
    nodes_[id].label = majority(counts);

    const bool pure = std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }) <= 1;
    if (pure || depth >= cfg_.max_depth || static_cast<int>(rows.size()) < cfg_.min_samples_split) return id;

    const Split split = best_split(rows);
    if (split.feature < 0) return id;

    std::vector<Index> left, right;
    for (Index r : rows) (x_(r, split.feature) <= split.threshold ? left : right).push_back(r);
    nodes_[id].feature = static_cast<int>(split.feature);
    nodes_[id].threshold = split.threshold;
    rows.clear();
    rows.shrink_to_fit();
    const int l = grow(std::move(left), depth + 1);
    nodes_[id].left = l;
    const int r = grow(std::move(right), depth + 1);
    nodes_[id].right = r;
    return id;
  }

  std::vector<Index> candidate_features() {
    if (!feature_rng_ || all_features_.empty()) return all_features_;
    const auto d = all_features_.size();
    const auto take = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
    std::vector<Index> pool = all_features_;
    for (std::size_t i = 0; i < take; ++i) std::swap(pool[i], pool[i + feature_rng_->below(d - i)]);
    pool.resize(take);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

  // Weighted Gini scaled by node size: sum over sides of n_s - sum_c n_{s,c}^2 / n_s.
  static double scaled_gini(const std::vector<int>& counts, int n) {
    if (n == 0) return 0.0;
    double sq = 0.0;
    for (int c : counts) sq += static_cast<double>(c) * c;
    return n - sq / n;
  }

  Split best_split(const std::vector<Index>& rows) {
    Split best;
    const int n = static_cast<int>(rows.size());
    std::vector<int> total(static_cast<std::size_t>(n_classes_), 0);
    for (Index r : rows) ++total[static_cast<std::size_t>(y_[static_cast<std::size_t>(r)])];

    std::vector<Index> order(rows);
    for (Index f : candidate_features()) {
      std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return x_(a, f) < x_(b, f); });
      std::vector<int> left(static_cast<std::size_t>(n_classes_), 0);
      std::vector<int> right = total;
      for (int i = 0; i + 1 < n; ++i) {
        const int c = y_[static_cast<std::size_t>(order[i])];
        ++left[static_cast<std::size_t>(c)];
        --right[static_cast<std::size_t>(c)];
        const double lo = x_(order[i], f);
        const double hi = x_(order[i + 1], f);
        if (!(lo < hi)) continue;
        const double impurity = scaled_gini(left, i + 1) + scaled_gini(right, n - i - 1);
        if (impurity < best.impurity) {
          double threshold = lo + (hi - lo) / 2.0;
          if (!(threshold < hi)) threshold = lo;
          best = {f, threshold, impurity};
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  Labels y_;
  const ClassifierConfig& cfg_;
  int n_classes_;
  Rng* feature_rng_;
  std::vector<Index> all_features_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

std::string to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::knn: return "knn";
    case ClassifierKind::cart: return "cart";
    case ClassifierKind::forest: return "forest";
  }
  return "unknown";
}

ClassifierKind parse_classifier_kind(const std::string& name) {
  if (name == "knn") return ClassifierKind::knn;
  if (name == "cart") return ClassifierKind::cart;
  if (name == "forest") return ClassifierKind::forest;
  throw ConfigError("unknown classifier '" + name + "' (expected knn, cart or forest)");
}

void ClassifierConfig::validate() const {
  if (k_neighbors < 1) throw ConfigError("k_neighbors must be at least 1");
  if (n_trees < 1) throw ConfigError("n_trees must be at least 1");
  if (max_depth < 0) throw ConfigError("max_depth must be non-negative");
  if (min_samples_split < 2) throw ConfigError("min_samples_split must be at least 2");
}

std::vector<int> knn_predict_all(const Matrix& train_x, Labels train_y, const Matrix& queries, int k) {
  const Index n = train_x.rows();
  if (n == 0) throw DataError("k-NN needs a non-empty training set");
  if (k < 1) throw ConfigError("k must be at least 1");
  if (queries.cols() != train_x.cols()) throw DataError("query width does not match training data");
  const auto kk = static_cast<std::size_t>(std::min<Index>(k, n));
  const int n_classes = count_classes(train_y);

  // dist(i, q), accumulated feature by feature in ascending order.
  Matrix dist = Matrix::Zero(n, queries.rows());
  for (Index f = 0; f < train_x.cols(); ++f) {
    for (Index q = 0; q < queries.rows(); ++q) {
      const double v = queries(q, f);
      for (Index i = 0; i < n; ++i) {
        const double d = train_x(i, f) - v;
        dist(i, q) += d * d;
      }
    }
  }

  std::vector<int> out(static_cast<std::size_t>(queries.rows()));
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::vector<int> votes(static_cast<std::size_t>(n_classes));
  std::vector<double> reach(static_cast<std::size_t>(n_classes));
  for (Index q = 0; q < queries.rows(); ++q) {
    std::iota(idx.begin(), idx.end(), Index{0});
    auto closer = [&](Index a, Index b) { return dist(a, q) < dist(b, q) || (dist(a, q) == dist(b, q) && a < b); };
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(kk), idx.end(), closer);
    std::fill(votes.begin(), votes.end(), 0);
    std::fill(reach.begin(), reach.end(), 0.0);
    for (std::size_t t = 0; t < kk; ++t) {
      const auto c = static_cast<std::size_t>(train_y[static_cast<std::size_t>(idx[t])]);
      ++votes[c];
      reach[c] += std::sqrt(dist(idx[t], q));
    }
    int best = -1;
    for (int c = 0; c < n_classes; ++c) {
      const auto uc = static_cast<std::size_t>(c);
      if (votes[uc] == 0) continue;
      if (best < 0) {
        best = c;
        continue;
      }
      const auto ub = static_cast<std::size_t>(best);
      if (votes[uc] > votes[ub] || (votes[uc] == votes[ub] && reach[uc] < reach[ub])) best = c;
    }
    out[static_cast<std::size_t>(q)] = best;
  }
  return out;
}

int knn_predict(const Matrix& train_x, Labels train_y, const Eigen::Ref<const Eigen::RowVectorXd>& query, int k) {
  Matrix q = query;
  return knn_predict_all(train_x, train_y, q, k).front();
}

int DecisionTree::predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  int id = 0;
  while (nodes_[static_cast<std::size_t>(id)].feature >= 0) {
    const auto& node = nodes_[static_cast<std::size_t>(id)];
    id = row(node.feature) <= node.threshold ? node.left : node.right;
  }
  return nodes_[static_cast<std::size_t>(id)].label;
}

int DecisionTree::predict(const Matrix& x, Index row) const {
  int id = 0;
  while (nodes_[static_cast<std::size_t>(id)].feature >= 0) {
    const auto& node = nodes_[static_cast<std::size_t>(id)];
    id = x(row, node.feature) <= node.threshold ? node.left : node.right;
  }
  return nodes_[static_cast<std::size_t>(id)].label;
}

int DecisionTree::depth() const {
  std::vector<int> level(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes_[i].feature >= 0) {
      level[static_cast<std::size_t>(nodes_[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes_[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

int Forest::predict(const Matrix& x, Index row) const {
  std::vector<int> votes(static_cast<std::size_t>(n_classes_), 0);
  for (const auto& tree : trees_) ++votes[static_cast<std::size_t>(tree.predict(x, row))];
  return majority(votes);
}

DecisionTree cart_fit(const Matrix& train_x, Labels train_y, const ClassifierConfig& cfg) {
  cfg.validate();
  if (train_x.rows() == 0) throw DataError("CART needs a non-empty training set");
  if (static_cast<Index>(train_y.size()) != train_x.rows()) throw DataError("label count does not match rows");
  std::vector<Index> rows(static_cast<std::size_t>(train_x.rows()));
  std::iota(rows.begin(), rows.end(), Index{0});
  return TreeBuilder(train_x, train_y, cfg, count_classes(train_y), nullptr).build(std::move(rows));
}

int cart_predict(const DecisionTree& tree, const Eigen::Ref<const Eigen::RowVectorXd>& row) { return tree.predict(row); }

Forest forest_fit(const Matrix& train_x, Labels train_y, const ClassifierConfig& cfg) {
  cfg.validate();
  const Index n = train_x.rows();
  if (n == 0) throw DataError("forest needs a non-empty training set");
  if (static_cast<Index>(train_y.size()) != n) throw DataError("label count does not match rows");
  const int n_classes = count_classes(train_y);
  std::vector<DecisionTree> trees;
  for (int t = 0; t < cfg.n_trees; ++t) {
    Rng rng(derive_seed(cfg.seed, 0xF0, static_cast<std::uint64_t>(t)));
    std::vector<Index> rows(static_cast<std::size_t>(n));
    if (cfg.bootstrap) {
      for (auto& r : rows) r = static_cast<Index>(rng.below(static_cast<std::size_t>(n)));
      std::sort(rows.begin(), rows.end());
    } else {
      std::iota(rows.begin(), rows.end(), Index{0});
    }
    TreeBuilder builder(train_x, train_y, cfg, n_classes, cfg.subsample_features ? &rng : nullptr);
    trees.push_back(builder.build(std::move(rows)));
  }
  return Forest(std::move(trees), n_classes);
}

int forest_predict(const Forest& forest, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  Matrix x = row;
  return forest.predict(x, 0);
}

std::vector<int> fit_predict(const Matrix& train_x, Labels train_y, const Matrix& queries, const ClassifierConfig& cfg) {
  std::vector<int> out(static_cast<std::size_t>(queries.rows()));
  switch (cfg.kind) {
    case ClassifierKind::knn:
      return knn_predict_all(train_x, train_y, queries, cfg.k_neighbors);
    case ClassifierKind::cart: {
      auto tree = cart_fit(train_x, train_y, cfg);
      for (Index q = 0; q < queries.rows(); ++q) out[static_cast<std::size_t>(q)] = tree.predict(queries, q);
      return out;
    }
    case ClassifierKind::forest: {
      auto forest = forest_fit(train_x, train_y, cfg);
      for (Index q = 0; q < queries.rows(); ++q) out[static_cast<std::size_t>(q)] = forest.predict(queries, q);
      return out;
    }
  }
  return out;
}

int effective_folds(Labels y, int requested) {
  if (requested < 2) throw ConfigError("cross-validation needs at least 2 folds");
  std::vector<int> counts(static_cast<std::size_t>(count_classes(y)), 0);
  for (int c : y) ++counts[static_cast<std::size_t>(c)];
  int present = 0;
  int smallest = std::numeric_limits<int>::max();
  for (int c : counts) {
    if (c == 0) continue;
    ++present;
    smallest = std::min(smallest, c);
  }
  if (present < 2) throw DataError("single-class label vector");
  if (static_cast<int>(y.size()) < requested) {
    throw InsufficientSamples("fewer samples (" + std::to_string(y.size()) + ") than folds (" + std::to_string(requested) + ")");
  }
  return std::max(2, std::min(requested, smallest));
}

FoldAssignment stratified_folds(Labels y, int folds, std::uint64_t seed) {
  FoldAssignment out;
  out.folds = effective_folds(y, folds);
  out.fold_of.assign(y.size(), 0);
  const int n_classes = count_classes(y);
  std::size_t position = 0;
  for (int c = 0; c < n_classes; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == c) members.push_back(i);
    Rng rng(derive_seed(seed, 0xC5, static_cast<std::uint64_t>(c)));
    shuffle(std::span<std::size_t>(members), rng);
    for (std::size_t i : members) out.fold_of[i] = static_cast<int>(position++ % static_cast<std::size_t>(out.folds));
  }
  return out;
}

double CrossValResult::accuracy() const {
  const int total = std::accumulate(tested.begin(), tested.end(), 0);
  const int right = std::accumulate(correct.begin(), correct.end(), 0);
  return total > 0 ? static_cast<double>(right) / total : 0.0;
}

CrossValResult cross_validate(const Matrix& x, Labels y, const ClassifierConfig& cfg, const FoldAssignment& folds) {
  if (static_cast<Index>(y.size()) != x.rows() || folds.fold_of.size() != y.size()) {
    throw DataError("cross-validation shape mismatch");
  }
  CrossValResult result;
  for (int f = 0; f < folds.folds; ++f) {
    const auto train_rows = select_rows(folds.fold_of, f, false);
    const auto test_rows = select_rows(folds.fold_of, f, true);
    result.tested.push_back(static_cast<int>(test_rows.size()));
    if (test_rows.empty()) {
      result.correct.push_back(0);
      continue;
    }
    Matrix train_x = x(train_rows, Eigen::all);
    Matrix test_x = x(test_rows, Eigen::all);
    std::vector<int> train_y;
    for (Index r : train_rows) train_y.push_back(y[static_cast<std::size_t>(r)]);
    ClassifierConfig fold_cfg = cfg;
    fold_cfg.seed = derive_seed(cfg.seed, 0xF01D, static_cast<std::uint64_t>(f));
    const auto predicted = fit_predict(train_x, train_y, test_x, fold_cfg);
    int right = 0;
    for (std::size_t t = 0; t < test_rows.size(); ++t) {
      if (predicted[t] == y[static_cast<std::size_t>(test_rows[t])]) ++right;
    }
    result.correct.push_back(right);
  }
  return result;
}

double cross_val_accuracy(const Matrix& x, Labels y, const ClassifierConfig& cfg, int folds, std::uint64_t seed) {
  cfg.validate();
  return cross_validate(x, y, cfg, stratified_folds(y, folds, seed)).accuracy();
}

}  // namespace ssfs
