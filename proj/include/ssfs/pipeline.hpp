#pragma once

#include "ssfs/classify.hpp"
#include "ssfs/dataio.hpp"
#include "ssfs/evolve.hpp"
#include "ssfs/lfa.hpp"
#include "ssfs/redundancy.hpp"
#include "ssfs/stats.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ssfs {

enum class Strategy { odesfs, zero_fill };

std::string to_string(Strategy s);
/// Accepts "odesfs", "zero-fill" and "zero_fill".
Strategy parse_strategy(const std::string& name);

/// Sub-seed stream tags. Every module seed is derive_seed(master_seed, tag[, window]).
namespace seed_tag {
inline constexpr std::uint64_t mask = 1;
inline constexpr std::uint64_t lfa = 2;
inline constexpr std::uint64_t evolve = 3;
inline constexpr std::uint64_t fitness_folds = 4;
inline constexpr std::uint64_t evaluation_folds = 5;
inline constexpr std::uint64_t classifier = 6;
}  // namespace seed_tag

struct RunConfig {
  std::string data_path;
  /// Name written to reports and plot data; defaults to the data file stem.
  std::string dataset_name;
  LabelColumn label_column;
  double missing_rate = 0.5;
  std::size_t window_size = 50;
  LfaConfig lfa;
  DeConfig de;
  CiConfig ci;
  /// Final-evaluation classifiers. Defaults to knn, cart and forest.
  std::vector<ClassifierConfig> classifiers;
  Strategy strategy = Strategy::odesfs;
  std::uint64_t master_seed = 0;
  int fitness_folds = 3;
  int eval_folds = 10;
  /// Score DE masks on the window alone instead of window + selected set.
  bool context_free_de = false;
  int threads = 1;

  RunConfig();
  void validate() const;
};

struct WindowTrace {
  int window = 0;
  std::size_t first_feature = 0;
  std::size_t width = 0;
  std::size_t observed_cells = 0;
  std::uint64_t lfa_seed = 0;
  std::uint64_t de_seed = 0;
  int lfa_epochs = 0;
  double lfa_final_loss = 0.0;
  double de_best_fitness = 1.0;
  std::vector<std::size_t> de_selected;
  std::vector<std::size_t> admitted;
  std::vector<std::size_t> pruned;
  std::vector<GenerationStats> de_history;
};

struct ClassifierAccuracy {
  std::string classifier;
  double accuracy = 0.0;
};

struct PhaseTiming {
  double impute_s = 0.0;
  double evolve_s = 0.0;
  double filter_s = 0.0;
  double evaluate_s = 0.0;
  double total_s = 0.0;
};

struct DerivedSeeds {
  std::uint64_t mask = 0;
  std::uint64_t evaluation_folds = 0;
  std::uint64_t classifier = 0;
};

struct RunReport {
  RunConfig config;
  std::string dataset;
  std::size_t instances = 0;
  std::size_t features = 0;
  std::size_t missing_cells = 0;
  std::vector<std::size_t> selected;
  std::vector<WindowTrace> trace;
  std::vector<ClassifierAccuracy> accuracies;
  PhaseTiming timing;
  DerivedSeeds seeds;

  /// Accuracy for a classifier name; throws std::out_of_range if absent.
  double accuracy(const std::string& classifier) const;
};

/// Optional per-window debug sinks.
struct RunObserver {
  virtual ~RunObserver() = default;
  virtual void on_mask(const ObservationMask&) {}
  virtual void on_lfa(int /*window*/, const TrainResult&) {}
  /// The dense window handed to feature evaluation (imputed or zero-filled).
  virtual void on_completed(int /*window*/, const Matrix&) {}
};

RunReport run(const Dataset& data, const RunConfig& cfg, RunObserver* observer = nullptr);
/// Loads cfg.data_path first.
RunReport run(const RunConfig& cfg, RunObserver* observer = nullptr);

struct NamedDataset {
  std::string name;
  Dataset data;
};

struct ComparisonRow {
  std::string dataset;
  std::uint64_t seed = 0;
  double accuracy_a = 0.0;
  double accuracy_b = 0.0;
};

struct ComparisonReport {
  std::string classifier;
  std::string label_a;
  std::string label_b;
  std::vector<ComparisonRow> rows;
  /// Per-dataset median accuracies (dataset order as given).
  std::vector<std::string> datasets;
  std::vector<double> median_a;
  std::vector<double> median_b;
  /// Empty when every paired difference is zero.
  std::optional<SignedRankResult> test;
  std::string verdict;
  std::vector<RunReport> reports;
};

/// Runs both configurations on every (dataset, seed). Wilcoxon pairs the
/// per-dataset median accuracies when several datasets are given, otherwise
/// the per-seed accuracies. Differences are a − b.
ComparisonReport compare(const std::vector<NamedDataset>& datasets, const RunConfig& a, const RunConfig& b,
                         const std::vector<std::uint64_t>& seeds, const std::string& classifier = "knn");
ComparisonReport compare(const RunConfig& a, const RunConfig& b, const std::vector<std::uint64_t>& seeds,
                         const std::string& classifier = "knn");

/// Long-format CSV: dataset,strategy,missing_rate,classifier,accuracy,n_selected,seed
std::string emit_plot_data(const std::vector<RunReport>& reports);

}  // namespace ssfs
