#pragma once

#include "ssfs/common.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ssfs {

enum class ClassifierKind { knn, cart, forest };

std::string to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(const std::string& name);

struct ClassifierConfig {
  ClassifierKind kind = ClassifierKind::knn;
  int k_neighbors = 3;
  int n_trees = 6;
  int max_depth = 10;
  int min_samples_split = 2;
  /// Forest only: draw a bootstrap resample per tree.
  bool bootstrap = true;
  /// Forest only: consider ceil(sqrt(D)) random features per split.
  bool subsample_features = true;
  std::uint64_t seed = 0;

  void validate() const;
};

using Labels = std::span<const int>;

/// Euclidean k-NN vote. Distance ties go to the lower training row; vote ties
/// go to the smaller summed distance, then the smaller label id.
int knn_predict(const Matrix& train_x, Labels train_y, const Eigen::Ref<const Eigen::RowVectorXd>& query, int k);
std::vector<int> knn_predict_all(const Matrix& train_x, Labels train_y, const Matrix& queries, int k);

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = 0;
};

/// Binary Gini tree; a row goes left when row[feature] <= threshold.
class DecisionTree {
 public:
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  int predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  int predict(const Matrix& x, Index row) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int depth() const;
  std::size_t leaf_count() const;

 private:
  std::vector<TreeNode> nodes_;
};

class Forest {
 public:
  Forest(std::vector<DecisionTree> trees, int n_classes) : trees_(std::move(trees)), n_classes_(n_classes) {}

  int predict(const Matrix& x, Index row) const;
  const std::vector<DecisionTree>& trees() const { return trees_; }

 private:
  std::vector<DecisionTree> trees_;
  int n_classes_;
};

DecisionTree cart_fit(const Matrix& train_x, Labels train_y, const ClassifierConfig& cfg);
int cart_predict(const DecisionTree& tree, const Eigen::Ref<const Eigen::RowVectorXd>& row);

Forest forest_fit(const Matrix& train_x, Labels train_y, const ClassifierConfig& cfg);
int forest_predict(const Forest& forest, const Eigen::Ref<const Eigen::RowVectorXd>& row);

/// Fits cfg.kind on the training rows and predicts every query row.
std::vector<int> fit_predict(const Matrix& train_x, Labels train_y, const Matrix& queries, const ClassifierConfig& cfg);

/// Stratified fold ids per row. Classes are shuffled independently, laid out
/// class by class and dealt round-robin, so per-fold class counts differ by at
/// most one.
struct FoldAssignment {
  std::vector<int> fold_of;
  int folds = 0;
};

/// Requested folds reduced to the smallest class count when needed (floor 2).
int effective_folds(Labels y, int requested);
FoldAssignment stratified_folds(Labels y, int folds, std::uint64_t seed);

struct CrossValResult {
  std::vector<int> correct;  // per fold
  std::vector<int> tested;   // per fold
  double accuracy() const;
};

CrossValResult cross_validate(const Matrix& x, Labels y, const ClassifierConfig& cfg, const FoldAssignment& folds);

/// Pooled correct/total over stratified folds. Throws DataError for single-class
/// labels and InsufficientSamples when M is smaller than the fold count.
double cross_val_accuracy(const Matrix& x, Labels y, const ClassifierConfig& cfg, int folds, std::uint64_t seed);

}  // namespace ssfs
