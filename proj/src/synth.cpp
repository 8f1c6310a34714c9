#include "ssfs/synth.hpp"

#include "ssfs/random.hpp"

#include <algorithm>
#include <cmath>

namespace ssfs {

void SynthConfig::validate() const {
  if (samples < 2) throw ConfigError("synth: need at least 2 samples");
  if (features < 1) throw ConfigError("synth: need at least 1 feature");
  if (latent_rank < 1) throw ConfigError("synth: latent rank must be positive");
  if (!(noise >= 0.0)) throw ConfigError("synth: noise must be non-negative");
  if (!(label_factor >= 0.0)) throw ConfigError("synth: label factor must be non-negative");
  for (auto id : resolved_informative()) {
    if (id >= features) throw ConfigError("synth: informative id out of range");
  }
  if (resolved_informative().empty()) throw ConfigError("synth: need at least one informative feature");
}

std::vector<std::size_t> SynthConfig::resolved_informative() const {
  if (!informative.empty()) {
    auto ids = informative;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
  }
  std::vector<std::size_t> ids;
  const std::size_t k = std::min(n_informative, features);
  for (std::size_t i = 0; i < k; ++i) ids.push_back(i * features / k);
  return ids;
}

Dataset make_planted_dataset(const SynthConfig& cfg) {
  cfg.validate();
  const auto m = static_cast<Index>(cfg.samples);
  const auto d = static_cast<Index>(cfg.features);
  const auto r = static_cast<Index>(cfg.latent_rank);
  Rng rng(cfg.seed);

  Matrix z(m, r);
  for (Index j = 0; j < r; ++j)
    for (Index i = 0; i < m; ++i) z(i, j) = rng.normal();
  Matrix w(r, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < r; ++i) w(i, j) = rng.normal();

  Dataset data;
  data.values = z * w / std::sqrt(static_cast<double>(r));
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < m; ++i) data.values(i, j) += cfg.noise * rng.normal();

  const auto informative = cfg.resolved_informative();
  // Signs follow each planted column's latent loading relative to the first one,
  // so planted columns reinforce rather than cancel in the shared structure.
  const Vector anchor = w.col(static_cast<Index>(informative.front()));
  std::vector<double> sign;
  for (auto id : informative) sign.push_back(w.col(static_cast<Index>(id)).dot(anchor) < 0.0 ? -1.0 : 1.0);

  // Factor carried by the planted columns only; keeps them identifiable after low-rank reconstruction.
  Vector g(m);
  for (Index i = 0; i < m; ++i) g(i) = rng.normal();
  for (std::size_t k = 0; k < informative.size(); ++k) {
    data.values.col(static_cast<Index>(informative[k])) += cfg.label_factor * sign[k] * g;
  }

  Vector score = Vector::Zero(m);
  for (std::size_t k = 0; k < informative.size(); ++k) {
    score += sign[k] * data.values.col(static_cast<Index>(informative[k]));
  }
  data.labels.resize(cfg.samples);
  for (Index i = 0; i < m; ++i) data.labels[static_cast<std::size_t>(i)] = score(i) > 0.0 ? 1 : 0;
  // Degenerate draws (all one side) are broken deterministically so the set stays two-class.
  if (std::all_of(data.labels.begin(), data.labels.end(), [&](int c) { return c == data.labels.front(); })) {
    Index flip = 0;
    if (data.labels.front() == 1) score.minCoeff(&flip);
    else score.maxCoeff(&flip);
    data.labels[static_cast<std::size_t>(flip)] = 1 - data.labels.front();
  }

  for (Index j = 0; j < d; ++j) data.feature_names.push_back("f" + std::to_string(j));
  data.class_names = {"0", "1"};
  validate(data);
  return data;
}

}  // namespace ssfs
