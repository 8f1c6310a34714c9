#pragma once

#include "ssfs/classify.hpp"
#include "ssfs/common.hpp"
#include "ssfs/random.hpp"

#include <array>
#include <cstdint>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

namespace ssfs {

struct DeConfig {
  int pop_size = 20;
  double mu = 0.5;
  double cr = 0.9;
  int generations = 30;
  double threshold = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

using Genes = std::vector<double>;

struct Individual {
  Genes genes;
  std::optional<double> fitness;
};

using Population = std::vector<Individual>;

struct FeatureMask {
  std::vector<bool> bits;
  std::size_t popcount = 0;

  static FeatureMask from_bits(std::vector<bool> bits);
  std::vector<std::size_t> indices() const;
  bool operator==(const FeatureMask&) const = default;
};

/// Genes i.i.d. uniform on [0, 1), fitness unset.
Population init_population(std::size_t length, const DeConfig& cfg, Rng& rng);
Population init_population(std::size_t length, const DeConfig& cfg);

/// Three mutually distinct indices, all different from `target`.
std::array<std::size_t, 3> draw_donor_indices(std::size_t target, std::size_t pop_size, Rng& rng);

/// a + mu·(b − c), clamped to [0, 1] per component.
Genes mutate(const Genes& a, const Genes& b, const Genes& c, double mu);
Genes mutate(const Population& pop, std::size_t target, const DeConfig& cfg, Rng& rng);

struct Trial {
  Genes genes;
  std::size_t forced_dim = 0;
};

/// Binomial crossover: donor gene where rand() <= cr or at the forced dimension.
Trial crossover(const Genes& target, const Genes& donor, const DeConfig& cfg, Rng& rng);

/// bit_l = gene_l >= threshold
FeatureMask binarize(const Genes& genes, double threshold);

/// Everything fitness() needs: the completed window, the already-selected
/// columns, labels, the classifier and a fixed stratified fold split.
class EvalContext {
 public:
  EvalContext(Matrix window, Matrix selected, std::vector<int> labels, ClassifierConfig classifier, int folds,
              std::uint64_t fold_seed);

  const Matrix& window() const { return window_; }
  const Matrix& selected() const { return selected_; }
  const std::vector<int>& labels() const { return labels_; }
  const ClassifierConfig& classifier() const { return classifier_; }
  const FoldAssignment& folds() const { return folds_; }

  /// Selected columns followed by the masked window columns.
  Matrix design_matrix(const FeatureMask& mask) const;

 private:
  Matrix window_;
  Matrix selected_;
  std::vector<int> labels_;
  ClassifierConfig classifier_;
  FoldAssignment folds_;
};

/// 1 − (correct / evaluated samples); 1.0 when there is nothing to evaluate.
double fitness(const FeatureMask& mask, const EvalContext& ctx);

/// Memoized fitness for one window context. Safe to share between threads.
class FitnessCache {
 public:
  explicit FitnessCache(const EvalContext& ctx) : ctx_(ctx) {}
  double operator()(const FeatureMask& mask);
  std::size_t evaluations() const { return evaluations_; }

 private:
  const EvalContext& ctx_;
  std::mutex mutex_;
  std::unordered_map<std::vector<bool>, double> cache_;
  std::size_t evaluations_ = 0;
};

/// Trial replaces target iff its fitness is strictly lower. Throws
/// std::logic_error when either fitness is unset.
const Individual& select_survivor(const Individual& target, const Individual& trial);

struct GenerationStats {
  int generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
};

struct EvolveResult {
  FeatureMask best_mask;
  double best_fitness = 1.0;
  Genes best_genes;
  /// Entry 0 is the initial population, then one entry per generation.
  std::vector<GenerationStats> history;
};

/// Synchronous DE/rand/1/bin: every donor is built from the generation-start
/// snapshot, trials are scored (in parallel when threads > 1) and then
/// replaced greedily. Results do not depend on the thread count.
EvolveResult evolve_window(const EvalContext& ctx, const DeConfig& cfg, int threads = 1);

}  // namespace ssfs
