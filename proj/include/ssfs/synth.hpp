#pragma once

#include "ssfs/dataio.hpp"

#include <cstdint>
#include <vector>

namespace ssfs {

/// Planted-informative-feature generator.
///
/// Features share a low-rank latent structure: F = Z·W / sqrt(r) + noise·E with
/// Z, W, E standard normal. Planted columns also carry s_i·a·g for one extra
/// standard-normal factor g (a = label_factor). The label depends only on the
/// planted columns: y = 1[sum_i s_i F_i > 0], where s_i is the sign of the
/// agreement between column i's latent loading and that of the first planted column.
struct SynthConfig {
  std::size_t samples = 300;
  std::size_t features = 60;
  /// Planted column ids; empty means `n_informative` evenly spaced ids.
  std::vector<std::size_t> informative;
  std::size_t n_informative = 5;
  double noise = 0.5;
  /// Loading of the factor shared by the planted columns only.
  double label_factor = 1.0;
  std::size_t latent_rank = 3;
  std::uint64_t seed = 0;

  void validate() const;
  std::vector<std::size_t> resolved_informative() const;
};

Dataset make_planted_dataset(const SynthConfig& cfg);

}  // namespace ssfs
