#include "ssfs/lfa.hpp"

#include "ssfs/random.hpp"

#include <cmath>
#include <fstream>
#include <string>

namespace ssfs {

namespace {

constexpr double kDivergenceBound = 1e6;

struct Cell {
  Index m;
  Index j;
};

std::vector<Cell> observed_cells(const SparseWindow& window) {
  std::vector<Cell> cells;
  cells.reserve(window.observed_count());
  for (Index m = 0; m < window.rows(); ++m)
    for (Index j = 0; j < window.width(); ++j)
      if (window.is_observed(m, j)) cells.push_back({m, j});
  return cells;
}

void check_shapes(const LatentFactors& f, const SparseWindow& w) {
  if (f.x.rows() != w.rows() || f.y.rows() != w.width() || f.x.cols() != f.y.cols()) {
    throw DataError("latent factor shapes do not match the window");
  }
}

bool out_of_bounds(double v) { return !std::isfinite(v) || std::abs(v) > kDivergenceBound; }

}  // namespace

void LfaConfig::validate() const {
  if (rank < 1) throw ConfigError("LFA rank must be at least 1");
  if (!(eta > 0.0)) throw ConfigError("LFA learning rate must be positive");
  if (!(lambda >= 0.0)) throw ConfigError("LFA lambda must be non-negative");
  if (max_epochs < 1) throw ConfigError("LFA max_epochs must be at least 1");
  if (!(tol >= 0.0)) throw ConfigError("LFA tol must be non-negative");
  if (!(init_scale > 0.0)) throw ConfigError("LFA init_scale must be positive");
}

LatentFactors init_factors(Index rows, Index width, const LfaConfig& cfg) {
  cfg.validate();
  if (rows < 1 || width < 1) throw ConfigError("factor shapes must be positive");
  Rng rng(cfg.seed);
  LatentFactors f;
  f.x.resize(rows, cfg.rank);
  f.y.resize(width, cfg.rank);
  for (Index i = 0; i < f.x.size(); ++i) f.x.data()[i] = cfg.init_scale * rng.uniform_positive();
  for (Index i = 0; i < f.y.size(); ++i) f.y.data()[i] = cfg.init_scale * rng.uniform_positive();
  return f;
}

double element_loss(double f, std::span<const double> x, std::span<const double> y, double lambda) {
  double dot = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t z = 0; z < x.size(); ++z) {
    dot += x[z] * y[z];
    xx += x[z] * x[z];
    yy += y[z] * y[z];
  }
  const double err = f - dot;
  return 0.5 * err * err + 0.5 * lambda * (xx + yy);
}

double window_loss(const LatentFactors& factors, const SparseWindow& window, double lambda) {
  check_shapes(factors, window);
  const auto h = static_cast<std::size_t>(factors.x.cols());
  double total = 0.0;
  for (Index m = 0; m < window.rows(); ++m) {
    for (Index j = 0; j < window.width(); ++j) {
      if (!window.is_observed(m, j)) continue;
      total += element_loss(window.value(m, j), {factors.x.row(m).data(), h}, {factors.y.row(j).data(), h}, lambda);
    }
  }
  return total;
}

double sgd_epoch(LatentFactors& factors, const SparseWindow& window, const LfaConfig& cfg, int epoch) {
  check_shapes(factors, window);
  auto cells = observed_cells(window);
  if (cells.empty()) return 0.0;
  Rng rng(derive_seed(cfg.seed, 0x5ED, static_cast<std::uint64_t>(epoch)));
  shuffle(std::span<Cell>(cells), rng);

  const Index h = factors.x.cols();
  const double eta = cfg.eta;
  const double lambda = cfg.lambda;
  for (const auto& [m, j] : cells) {
    double* x = factors.x.row(m).data();
    double* y = factors.y.row(j).data();
    double dot = 0.0;
    for (Index z = 0; z < h; ++z) dot += x[z] * y[z];
    const double err = window.value(m, j) - dot;
    bool diverged = false;
    for (Index z = 0; z < h; ++z) {
      const double x_old = x[z];
      x[z] = x_old + eta * y[z] * err - lambda * eta * x_old;
      y[z] = y[z] + eta * x_old * err - lambda * eta * y[z];
      diverged = diverged || out_of_bounds(x[z]) || out_of_bounds(y[z]);
    }
    if (diverged) {
      throw DivergenceError("LFA diverged in window " + std::to_string(window.index()) + " at epoch " +
                            std::to_string(epoch) + "; reduce the learning rate");
    }
  }
  return window_loss(factors, window, lambda);
}

TrainResult train(const SparseWindow& window, const LfaConfig& cfg) {
  TrainResult result;
  result.factors = init_factors(window.rows(), window.width(), cfg);
  result.initial_loss = window_loss(result.factors, window, cfg.lambda);
  double previous = result.initial_loss;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const double loss = sgd_epoch(result.factors, window, cfg, epoch);
    result.trace.push_back(loss);
    if (std::abs(loss - previous) <= cfg.tol * std::max(1.0, previous)) break;
    previous = loss;
  }
  return result;
}

CompletedWindow complete_window(const LatentFactors& factors, const SparseWindow& window, bool keep_observed) {
  check_shapes(factors, window);
  CompletedWindow out;
  out.index = window.index();
  out.feature_ids = window.feature_ids();
  out.values = factors.x * factors.y.transpose();
  if (keep_observed) {
    for (Index j = 0; j < window.width(); ++j)
      for (Index m = 0; m < window.rows(); ++m)
        if (window.is_observed(m, j)) out.values(m, j) = window.value(m, j);
  }
  return out;
}

void write_factors_csv(const std::filesystem::path& path, const LatentFactors& factors) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.precision(17);
  out << "matrix,row";
  for (Index z = 0; z < factors.x.cols(); ++z) out << ",z" << z;
  out << '\n';
  auto dump = [&](const char* name, const RowMatrix& mat) {
    for (Index r = 0; r < mat.rows(); ++r) {
      out << name << ',' << r;
      for (Index z = 0; z < mat.cols(); ++z) out << ',' << mat(r, z);
      out << '\n';
    }
  };
  dump("X", factors.x);
  dump("Y", factors.y);
}

void write_trace_csv(const std::filesystem::path& path, const TrainResult& result) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.precision(17);
  out << "epoch,loss\n0," << result.initial_loss << '\n';
  for (std::size_t e = 0; e < result.trace.size(); ++e) out << e + 1 << ',' << result.trace[e] << '\n';
}

}  // namespace ssfs
