#pragma once

// Independent reference computations shared by the unit suite and the
// acceptance runner.

#include "ssfs/evolve.hpp"
#include "ssfs/lfa.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace ssfs::testing {

/// Random small factorization instance; for every cell, one SGD step on that
/// cell alone is compared with −η times a central-difference gradient of the
/// element loss. Returns the worst relative gap over the cells.
inline double sgd_gradient_gap(std::uint64_t seed) {
  Rng rng(seed);
  const auto h = static_cast<Index>(1 + rng.below(4));
  const auto m = static_cast<Index>(1 + rng.below(8));
  const auto le = static_cast<Index>(1 + rng.below(8));
  LfaConfig cfg;
  cfg.rank = static_cast<int>(h);
  cfg.eta = 0.001 + 0.05 * rng.uniform();
  cfg.lambda = 0.2 * rng.uniform();
  cfg.seed = seed;

  LatentFactors start{RowMatrix(m, h), RowMatrix(le, h)};
  for (Index i = 0; i < start.x.size(); ++i) start.x.data()[i] = 0.5 * rng.normal();
  for (Index i = 0; i < start.y.size(); ++i) start.y.data()[i] = 0.5 * rng.normal();
  const Matrix values = normal_matrix(m, le, rng);

  double worst = 0.0;
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < le; ++j) {
      BoolMatrix observed = BoolMatrix::Constant(m, le, false);
      observed(i, j) = true;
      LatentFactors stepped = start;
      sgd_epoch(stepped, masked_window(values, observed), cfg, 0);

      std::vector<double> x(start.x.row(i).data(), start.x.row(i).data() + h);
      std::vector<double> y(start.y.row(j).data(), start.y.row(j).data() + h);
      auto loss = [&] { return element_loss(values(i, j), x, y, cfg.lambda); };
      double gap2 = 0.0, ref2 = 0.0;
      for (int side = 0; side < 2; ++side) {
        auto& v = side == 0 ? x : y;
        for (Index z = 0; z < h; ++z) {
          const double saved = v[static_cast<std::size_t>(z)];
          const double step = 1e-6 * std::max(1.0, std::abs(saved));
          v[static_cast<std::size_t>(z)] = saved + step;
          const double up = loss();
          v[static_cast<std::size_t>(z)] = saved - step;
          const double down = loss();
          v[static_cast<std::size_t>(z)] = saved;
          const double expected = -cfg.eta * (up - down) / (2.0 * step);
          const double actual = side == 0 ? stepped.x(i, z) - start.x(i, z) : stepped.y(j, z) - start.y(j, z);
          gap2 += (actual - expected) * (actual - expected);
          ref2 += expected * expected;
        }
      }
      if (ref2 > 0.0) worst = std::max(worst, std::sqrt(gap2 / ref2));
    }
  }
  return worst;
}

/// Rank-2 100×20 matrix, column z-scored, half the cells held out. Returns
/// the RMSE of the LFA reconstruction on the held-out cells.
inline double planted_completion_rmse(std::uint64_t seed, const LfaConfig& cfg) {
  Rng rng(seed);
  const Matrix truth = zscore(normal_matrix(100, 2, rng) * normal_matrix(2, 20, rng));
  const auto mask = make_mask(100, 20, 0.5, derive_seed(seed, 1));
  const auto window = masked_window(truth, mask.observed);
  const auto trained = train(window, cfg);
  const Matrix completed = complete_window(trained.factors, window).values;
  double ss = 0.0;
  std::size_t n = 0;
  for (Index j = 0; j < 20; ++j) {
    for (Index i = 0; i < 100; ++i) {
      if (mask.observed(i, j)) continue;
      ss += (completed(i, j) - truth(i, j)) * (completed(i, j) - truth(i, j));
      ++n;
    }
  }
  return std::sqrt(ss / static_cast<double>(n));
}

/// Window of 20 standard-normal columns whose labels are 1[col1 + col3 > 0].
inline EvalContext planted_de_context(std::uint64_t seed) {
  auto toy = planted_pair(150, 20, 1, 3, seed);
  return EvalContext(toy.x, Matrix(150, 0), toy.y, ClassifierConfig{}, 3, derive_seed(seed, 7));
}

/// Exhaustive two-sided signed-rank p over all 2^n sign assignments of the
/// given (mid-)ranks: the share of patterns whose positive-rank sum lies at
/// least as far from the centre as the observed one.
inline double signed_rank_enumeration_p(const std::vector<double>& ranks, double observed_r_plus) {
  const std::size_t n = ranks.size();
  double total = 0.0;
  for (double r : ranks) total += r;
  const double reach = std::abs(2.0 * observed_r_plus - total);
  std::uint64_t extreme = 0;
  for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << n); ++pattern) {
    double r_plus = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (pattern >> i & 1U) r_plus += ranks[i];
    if (std::abs(2.0 * r_plus - total) >= reach) ++extreme;
  }
  return static_cast<double>(extreme) / static_cast<double>(std::uint64_t{1} << n);
}

}  // namespace ssfs::testing
