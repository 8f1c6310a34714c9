#pragma once

#include "ssfs/dataio.hpp"
#include "ssfs/random.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace ssfs::testing {

inline SparseWindow full_window(const Matrix& values, int index = 1) {
  std::vector<std::size_t> ids(static_cast<std::size_t>(values.cols()));
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  return SparseWindow(index, std::move(ids), values, BoolMatrix::Constant(values.rows(), values.cols(), true));
}

inline SparseWindow masked_window(const Matrix& values, const BoolMatrix& observed, int index = 1) {
  std::vector<std::size_t> ids(static_cast<std::size_t>(values.cols()));
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  return SparseWindow(index, std::move(ids), values, observed);
}

inline Matrix normal_matrix(Index rows, Index cols, Rng& rng) {
  Matrix out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) out(i, j) = rng.normal();
  return out;
}

/// Column z-scores over all cells (population sd).
inline Matrix zscore(const Matrix& values) {
  Matrix out = values;
  for (Index j = 0; j < out.cols(); ++j) {
    const double mean = out.col(j).mean();
    out.col(j).array() -= mean;
    const double sd = std::sqrt(out.col(j).squaredNorm() / static_cast<double>(out.rows()));
    if (sd > 0.0) out.col(j) /= sd;
  }
  return out;
}

/// Toy classification set: labels are 1[x_a + x_b > 0] over standard-normal columns.
struct PlantedToy {
  Matrix x;
  std::vector<int> y;
};

inline PlantedToy planted_pair(Index rows, Index cols, Index a, Index b, std::uint64_t seed) {
  Rng rng(seed);
  PlantedToy t{normal_matrix(rows, cols, rng), {}};
  for (Index i = 0; i < rows; ++i) t.y.push_back(t.x(i, a) + t.x(i, b) > 0.0 ? 1 : 0);
  return t;
}

}  // namespace ssfs::testing
