#pragma once

#include "ssfs/common.hpp"
#include "ssfs/dataio.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace ssfs {

struct LfaConfig {
  int rank = 5;
  double lambda = 0.05;
  double eta = 0.01;
  int max_epochs = 200;
  double tol = 1e-5;
  double init_scale = 0.04;
  std::uint64_t seed = 0;
  /// Pass observed cells through instead of replacing them with X·Yᵀ.
  bool keep_observed = false;

  void validate() const;
};

/// X is M×H (one row per instance), Y is Le×H (one row per feature).
struct LatentFactors {
  RowMatrix x;
  RowMatrix y;
};

struct CompletedWindow {
  int index = 0;
  std::vector<std::size_t> feature_ids;
  Matrix values;
};

struct TrainResult {
  LatentFactors factors;
  /// Loss before the first epoch.
  double initial_loss = 0.0;
  /// Summed loss over observed cells after each epoch.
  std::vector<double> trace;

  int epochs() const { return static_cast<int>(trace.size()); }
};

/// Entries i.i.d. uniform on (0, init_scale]; deterministic per (seed, shape, rank).
LatentFactors init_factors(Index rows, Index width, const LfaConfig& cfg);

/// ½(f − x·y)² + (λ/2)(‖x‖² + ‖y‖²)
double element_loss(double f, std::span<const double> x, std::span<const double> y, double lambda);

/// Sum of element_loss over the observed cells of the window.
double window_loss(const LatentFactors& factors, const SparseWindow& window, double lambda);

/// One pass of per-cell SGD over the observed cells in a shuffled order
/// seeded by (cfg.seed, epoch). Within a cell both updates use the same error
/// and the pre-update x row. Returns the post-epoch window_loss.
/// Throws DivergenceError if any factor entry leaves [-1e6, 1e6] or turns non-finite.
double sgd_epoch(LatentFactors& factors, const SparseWindow& window, const LfaConfig& cfg, int epoch);

/// Fresh factors, then epochs until max_epochs or
/// |loss_t − loss_{t−1}| ≤ tol·max(1, loss_{t−1}), with loss_0 the initial loss.
TrainResult train(const SparseWindow& window, const LfaConfig& cfg);

/// X·Yᵀ everywhere, or only at unobserved cells when keep_observed is set.
CompletedWindow complete_window(const LatentFactors& factors, const SparseWindow& window, bool keep_observed = false);

void write_factors_csv(const std::filesystem::path& path, const LatentFactors& factors);
void write_trace_csv(const std::filesystem::path& path, const TrainResult& result);

}  // namespace ssfs
