#include "ssfs/lfa.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <limits>

using namespace ssfs;
using testing::full_window;
using testing::masked_window;

namespace {

double observed_rmse(const Matrix& truth, const Matrix& completed, const BoolMatrix& observed) {
  double ss = 0.0;
  std::size_t n = 0;
  for (Index j = 0; j < truth.cols(); ++j)
    for (Index i = 0; i < truth.rows(); ++i)
      if (observed(i, j)) {
        ss += (truth(i, j) - completed(i, j)) * (truth(i, j) - completed(i, j));
        ++n;
      }
  return std::sqrt(ss / static_cast<double>(n));
}

}  // namespace

TEST_SUITE("examples") {
  TEST_CASE("init factors vanish as the scale goes to zero") {
    LfaConfig cfg;
    cfg.init_scale = 1e-12;
    const auto f = init_factors(6, 4, cfg);
    CHECK(f.x.maxCoeff() <= 1e-12);
    CHECK(f.x.minCoeff() > 0.0);
    CHECK((f.x * f.y.transpose()).cwiseAbs().maxCoeff() < 1e-22);
  }

  TEST_CASE("init factors are deterministic") {
    LfaConfig cfg;
    cfg.seed = 1;
    cfg.rank = 2;
    const auto a = init_factors(3, 2, cfg);
    const auto b = init_factors(3, 2, cfg);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
  }

  TEST_CASE("init factor entries average half the scale") {
    LfaConfig cfg;
    cfg.rank = 1;
    cfg.seed = 3;
    const auto f = init_factors(100000, 1, cfg);
    CHECK(std::abs(f.x.mean() - cfg.init_scale / 2) <= 0.01 * cfg.init_scale / 2);
  }

  TEST_CASE("element loss values") {
    const std::vector<double> zero{0.0, 0.0};
    CHECK(element_loss(0.0, zero, zero, 0.0) == 0.0);
    CHECK(element_loss(1.0, std::vector<double>{1, 0}, std::vector<double>{1, 0}, 0.0) == 0.0);
    CHECK(element_loss(2.0, std::vector<double>{1, 1}, std::vector<double>{1, 0}, 0.5) == 1.25);
  }

  TEST_CASE("epoch over an empty window changes nothing") {
    LfaConfig cfg;
    cfg.rank = 2;
    auto f = init_factors(3, 2, cfg);
    const auto before = f;
    const auto w = masked_window(Matrix::Ones(3, 2), BoolMatrix::Constant(3, 2, false));
    CHECK(sgd_epoch(f, w, cfg, 0) == 0.0);
    CHECK(f.x == before.x);
    CHECK(f.y == before.y);
  }

  TEST_CASE("single-cell update uses the cached x for y") {
    LfaConfig cfg;
    cfg.rank = 1;
    cfg.lambda = 0.0;
    cfg.eta = 0.1;
    LatentFactors f{RowMatrix::Constant(1, 1, 0.5), RowMatrix::Constant(1, 1, 0.5)};
    sgd_epoch(f, full_window(Matrix::Constant(1, 1, 1.0)), cfg, 0);
    const double expected = 0.5 + 0.1 * 0.5 * 0.75 - 0.0 * 0.1 * 0.5;
    CHECK(f.x(0, 0) == expected);
    CHECK(f.y(0, 0) == expected);
    CHECK(f.x(0, 0) == doctest::Approx(0.5375));
  }

  TEST_CASE("update matches finite-difference gradient") {
    CHECK(testing::sgd_gradient_gap(2024) < 1e-5);
  }

  TEST_CASE("rank-1 matrix is fitted almost exactly") {
    Rng rng(11);
    Eigen::VectorXd u(10), v(6);
    for (Index i = 0; i < 10; ++i) u(i) = 0.5 + rng.uniform();
    for (Index i = 0; i < 6; ++i) v(i) = 0.5 + rng.uniform();
    const Matrix truth = u * v.transpose();
    LfaConfig cfg;
    cfg.rank = 1;
    cfg.lambda = 0.0;
    cfg.eta = 0.02;
    cfg.max_epochs = 5000;
    cfg.tol = 0.0;
    cfg.init_scale = 0.5;
    const auto w = full_window(truth);
    const auto trained = train(w, cfg);
    CHECK(observed_rmse(truth, complete_window(trained.factors, w).values, w.observed()) < 1e-3);
  }

  TEST_CASE("infinite tolerance stops after one epoch") {
    LfaConfig cfg;
    cfg.tol = std::numeric_limits<double>::infinity();
    Rng rng(2);
    CHECK(train(full_window(testing::normal_matrix(8, 5, rng)), cfg).epochs() == 1);
  }

  TEST_CASE("heavy regularization shrinks the factors") {
    LfaConfig cfg;
    cfg.lambda = 1e3;
    cfg.eta = 1e-4;
    cfg.max_epochs = 20;
    Rng rng(4);
    const auto w = full_window(testing::normal_matrix(12, 6, rng));
    const auto start = init_factors(12, 6, cfg);
    const auto trained = train(w, cfg);
    CHECK(trained.factors.x.norm() < start.x.norm());
  }

  TEST_CASE("completion of zero factors is zero") {
    const auto w = full_window(Matrix::Ones(3, 2));
    LatentFactors f{RowMatrix::Zero(3, 2), RowMatrix::Ones(2, 2)};
    CHECK(complete_window(f, w).values.isZero());
    f = {RowMatrix::Ones(3, 2), RowMatrix::Zero(2, 2)};
    CHECK(complete_window(f, w).values.isZero());
  }

  TEST_CASE("completion is the factor product") {
    LatentFactors f{RowMatrix(2, 1), RowMatrix(1, 1)};
    f.x << 1.0, 2.0;
    f.y << 3.0;
    const auto c = complete_window(f, full_window(Matrix::Zero(2, 1)));
    CHECK(c.values(0, 0) == 3.0);
    CHECK(c.values(1, 0) == 6.0);
  }

  TEST_CASE("planted rank-2 matrix is recovered on held-out cells") {
    LfaConfig cfg;
    cfg.rank = 2;
    cfg.lambda = 0.02;
    cfg.eta = 0.01;
    CHECK(testing::planted_completion_rmse(1, cfg) < 0.15);
  }
}

TEST_CASE("mean loss decreases with a small learning rate") {
  Rng data_rng(8);
  const Matrix values = testing::zscore(testing::normal_matrix(30, 3, data_rng) * testing::normal_matrix(3, 10, data_rng) +
                                        0.3 * testing::normal_matrix(30, 10, data_rng));
  const auto mask = make_mask(30, 10, 0.3, 8);
  const auto w = masked_window(values, mask.observed);
  LfaConfig cfg;
  cfg.eta = 1e-3;
  cfg.max_epochs = 60;
  cfg.tol = 0.0;
  std::vector<double> mean(60, 0.0);
  for (std::uint64_t s = 0; s < 10; ++s) {
    cfg.seed = s;
    const auto t = train(w, cfg);
    REQUIRE(t.epochs() == 60);
    for (int e = 0; e < 60; ++e) mean[static_cast<std::size_t>(e)] += t.trace[static_cast<std::size_t>(e)] / 10;
  }
  for (std::size_t e = 1; e < mean.size(); ++e) CHECK(mean[e] <= mean[e - 1]);
}

TEST_CASE("dense matrix with full rank is reproduced") {
  Rng rng(21);
  const Matrix truth = testing::normal_matrix(8, 6, rng);
  LfaConfig cfg;
  cfg.rank = 6;
  cfg.lambda = 0.0;
  cfg.eta = 0.05;
  cfg.max_epochs = 20000;
  cfg.tol = 0.0;
  cfg.init_scale = 0.5;
  const auto w = full_window(truth);
  const auto trained = train(w, cfg);
  CHECK(observed_rmse(truth, complete_window(trained.factors, w).values, w.observed()) < 1e-2);
}

TEST_CASE("training is deterministic") {
  Rng rng(5);
  const auto mask = make_mask(15, 7, 0.4, 5);
  const auto w = masked_window(testing::normal_matrix(15, 7, rng), mask.observed);
  LfaConfig cfg;
  cfg.seed = 77;
  const auto a = train(w, cfg);
  const auto b = train(w, cfg);
  CHECK(a.factors.x == b.factors.x);
  CHECK(a.factors.y == b.factors.y);
  CHECK(a.trace == b.trace);
}

TEST_CASE("keep_observed passes observed cells through") {
  Rng rng(6);
  const Matrix values = testing::normal_matrix(10, 4, rng);
  const auto mask = make_mask(10, 4, 0.5, 6);
  const auto w = masked_window(values, mask.observed);
  const auto t = train(w, LfaConfig{});
  const Matrix kept = complete_window(t.factors, w, true).values;
  const Matrix pure = complete_window(t.factors, w, false).values;
  for (Index j = 0; j < 4; ++j)
    for (Index i = 0; i < 10; ++i) CHECK(kept(i, j) == (mask.observed(i, j) ? values(i, j) : pure(i, j)));
}

TEST_CASE("divergence is reported") {
  LfaConfig cfg;
  cfg.eta = 50.0;
  cfg.init_scale = 1.0;
  const auto w = full_window(Matrix::Constant(6, 6, 100.0));
  CHECK_THROWS_AS(train(w, cfg), DivergenceError);
}

TEST_CASE("lfa config validation") {
  LfaConfig cfg;
  cfg.rank = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.eta = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.lambda = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.max_epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
