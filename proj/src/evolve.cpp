#include "ssfs/evolve.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace ssfs {

void DeConfig::validate() const {
  if (pop_size < 4) throw ConfigError("DE population size must be at least 4");
  if (!(mu >= 0.0 && mu <= 2.0)) throw ConfigError("DE scaling factor mu must lie in [0, 2]");
  if (!(cr >= 0.0 && cr <= 1.0)) throw ConfigError("DE crossover rate must lie in [0, 1]");
  if (generations < 0) throw ConfigError("DE generations must be non-negative");
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("DE threshold must lie in (0, 1]");
}

FeatureMask FeatureMask::from_bits(std::vector<bool> bits) {
  FeatureMask mask;
  mask.popcount = static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true));
  mask.bits = std::move(bits);
  return mask;
}

std::vector<std::size_t> FeatureMask::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) out.push_back(i);
  return out;
}

Population init_population(std::size_t length, const DeConfig& cfg, Rng& rng) {
  cfg.validate();
  if (length < 1) throw ConfigError("genotype length must be at least 1");
  Population pop(static_cast<std::size_t>(cfg.pop_size));
  for (auto& ind : pop) {
    ind.genes.resize(length);
    for (auto& g : ind.genes) g = rng.uniform();
  }
  return pop;
}

Population init_population(std::size_t length, const DeConfig& cfg) {
  Rng rng(cfg.seed);
  return init_population(length, cfg, rng);
}

std::array<std::size_t, 3> draw_donor_indices(std::size_t target, std::size_t pop_size, Rng& rng) {
  if (pop_size < 4) throw ConfigError("population too small to draw three distinct donors");
  std::array<std::size_t, 3> picked{};
  for (std::size_t k = 0; k < 3; ++k) {
    std::size_t candidate = 0;
    do {
      candidate = rng.below(pop_size);
    } while (candidate == target || std::find(picked.begin(), picked.begin() + static_cast<std::ptrdiff_t>(k), candidate) !=
                                        picked.begin() + static_cast<std::ptrdiff_t>(k));
    picked[k] = candidate;
  }
  return picked;
}

Genes mutate(const Genes& a, const Genes& b, const Genes& c, double mu) {
  if (a.size() != b.size() || a.size() != c.size()) throw std::invalid_argument("mutation vectors differ in length");
  Genes donor(a.size());
  for (std::size_t l = 0; l < a.size(); ++l) donor[l] = std::clamp(a[l] + mu * (b[l] - c[l]), 0.0, 1.0);
  return donor;
}

Genes mutate(const Population& pop, std::size_t target, const DeConfig& cfg, Rng& rng) {
  const auto [a, b, c] = draw_donor_indices(target, pop.size(), rng);
  return mutate(pop[a].genes, pop[b].genes, pop[c].genes, cfg.mu);
}

Trial crossover(const Genes& target, const Genes& donor, const DeConfig& cfg, Rng& rng) {
  if (target.size() != donor.size()) throw std::invalid_argument("crossover vectors differ in length");
  if (target.empty()) throw std::invalid_argument("crossover on empty genotype");
  Trial trial;
  trial.forced_dim = rng.below(target.size());
  trial.genes.resize(target.size());
  for (std::size_t l = 0; l < target.size(); ++l) {
    // (0, 1] draw: cr = 0 never fires, cr = 1 always does.
    const bool take = rng.uniform_positive() <= cfg.cr || l == trial.forced_dim;
    trial.genes[l] = take ? donor[l] : target[l];
  }
  return trial;
}

FeatureMask binarize(const Genes& genes, double threshold) {
  std::vector<bool> bits(genes.size());
  for (std::size_t l = 0; l < genes.size(); ++l) bits[l] = genes[l] >= threshold;
  return FeatureMask::from_bits(std::move(bits));
}

EvalContext::EvalContext(Matrix window, Matrix selected, std::vector<int> labels, ClassifierConfig classifier, int folds,
                         std::uint64_t fold_seed)
    : window_(std::move(window)), selected_(std::move(selected)), labels_(std::move(labels)), classifier_(classifier) {
  classifier_.validate();
  const auto m = static_cast<Index>(labels_.size());
  if (window_.rows() != m) throw DataError("window rows do not match label count");
  if (selected_.cols() == 0) selected_.resize(m, 0);
  if (selected_.rows() != m) throw DataError("selected columns do not match label count");
  folds_ = stratified_folds(labels_, folds, fold_seed);
}

Matrix EvalContext::design_matrix(const FeatureMask& mask) const {
  if (static_cast<Index>(mask.bits.size()) != window_.cols()) throw std::invalid_argument("mask width does not match window");
  Matrix x(window_.rows(), selected_.cols() + static_cast<Index>(mask.popcount));
  x.leftCols(selected_.cols()) = selected_;
  Index col = selected_.cols();
  for (std::size_t l = 0; l < mask.bits.size(); ++l) {
    if (mask.bits[l]) x.col(col++) = window_.col(static_cast<Index>(l));
  }
  return x;
}

double fitness(const FeatureMask& mask, const EvalContext& ctx) {
  if (mask.popcount == 0 && ctx.selected().cols() == 0) return 1.0;
  const Matrix x = ctx.design_matrix(mask);
  return 1.0 - cross_validate(x, ctx.labels(), ctx.classifier(), ctx.folds()).accuracy();
}

double FitnessCache::operator()(const FeatureMask& mask) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(mask.bits); it != cache_.end()) return it->second;
  }
  const double value = fitness(mask, ctx_);
  std::lock_guard lock(mutex_);
  cache_.emplace(mask.bits, value);
  ++evaluations_;
  return value;
}

const Individual& select_survivor(const Individual& target, const Individual& trial) {
  if (!target.fitness || !trial.fitness) throw std::logic_error("select_survivor: fitness not evaluated");
  return *trial.fitness < *target.fitness ? trial : target;
}

namespace {

GenerationStats summarize(int generation, const Population& pop) {
  GenerationStats stats;
  stats.generation = generation;
  stats.best_fitness = 1.0;
  double sum = 0.0;
  for (const auto& ind : pop) {
    stats.best_fitness = std::min(stats.best_fitness, *ind.fitness);
    sum += *ind.fitness;
  }
  stats.mean_fitness = sum / static_cast<double>(pop.size());
  return stats;
}

void evaluate(Population& pop, FitnessCache& cache, double threshold, int threads) {
  detail::parallel_for(pop.size(), threads, [&](std::size_t i) {
    if (!pop[i].fitness) pop[i].fitness = cache(binarize(pop[i].genes, threshold));
  });
}

}  // namespace

EvolveResult evolve_window(const EvalContext& ctx, const DeConfig& cfg, int threads) {
  cfg.validate();
  const auto length = static_cast<std::size_t>(ctx.window().cols());
  if (length < 1) throw DataError("cannot evolve an empty window");

  Rng rng(cfg.seed);
  FitnessCache cache(ctx);
  Population pop = init_population(length, cfg, rng);
  evaluate(pop, cache, cfg.threshold, threads);

  EvolveResult result;
  result.history.push_back(summarize(0, pop));
  for (int g = 1; g <= cfg.generations; ++g) {
    const Population snapshot = pop;
    Population trials(pop.size());
    for (std::size_t n = 0; n < pop.size(); ++n) {
      Genes donor = mutate(snapshot, n, cfg, rng);
      trials[n].genes = crossover(snapshot[n].genes, donor, cfg, rng).genes;
    }
    evaluate(trials, cache, cfg.threshold, threads);
    for (std::size_t n = 0; n < pop.size(); ++n) pop[n] = select_survivor(snapshot[n], trials[n]);
    result.history.push_back(summarize(g, pop));
  }

  std::size_t best = 0;
  for (std::size_t n = 1; n < pop.size(); ++n)
    if (*pop[n].fitness < *pop[best].fitness) best = n;
  result.best_genes = pop[best].genes;
  result.best_fitness = *pop[best].fitness;
  result.best_mask = binarize(pop[best].genes, cfg.threshold);
  return result;
}

}  // namespace ssfs
