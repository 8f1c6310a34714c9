#include "ssfs/dataio.hpp"
#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace ssfs;

namespace {

Dataset from_text(const std::string& text, LabelColumn label = LabelColumn::last()) {
  std::istringstream in(text);
  return parse_csv(in, label);
}

std::vector<Index> widths(const std::vector<SparseWindow>& ws) {
  std::vector<Index> out;
  for (const auto& w : ws) out.push_back(w.width());
  return out;
}

}  // namespace

TEST_SUITE("examples") {
  TEST_CASE("csv labels are encoded in first-appearance order") {
    const Dataset d = from_text("1.0,0.5,A\n2.0,0.5,B\n3.0,0.5,A\n");
    CHECK(d.rows() == 3);
    CHECK(d.cols() == 2);
    CHECK(d.labels == std::vector<int>{0, 1, 0});
    CHECK(d.class_names == std::vector<std::string>{"A", "B"});
  }

  TEST_CASE("csv ragged row names its line") {
    CHECK_THROWS_WITH_AS(from_text("1,2,0\n1,2,3,1\n"), "ragged row at line 2", DataError);
  }

  TEST_CASE("colon-shaped csv loads as 62 x 2001 with two classes") {
    std::ostringstream text;
    Rng rng(62);
    for (int i = 0; i < 62; ++i) {
      for (int j = 0; j < 2001; ++j) text << rng.normal() << ',';
      text << (i % 3 == 0 ? "tumor" : "normal") << '\n';
    }
    const Dataset d = from_text(text.str());
    CHECK(d.rows() == 62);
    CHECK(d.cols() == 2001);
    CHECK(d.n_classes() == 2);
  }

  TEST_CASE("zero missing rate keeps every cell") {
    for (std::uint64_t seed : {0ULL, 1ULL, 12345ULL}) {
      const auto mask = make_mask(7, 9, 0.0, seed);
      CHECK(mask.observed.all());
      CHECK(mask.missing_count() == 0);
    }
  }

  TEST_CASE("mask hides exactly round(rate * cells)") {
    CHECK(make_mask(10, 10, 0.5, 7).missing_count() == 50);
    CHECK(make_mask(4, 5, 0.9, 7).missing_count() == 18);
  }

  TEST_CASE("mask cells are missed uniformly across seeds") {
    constexpr int kSeeds = 10000;
    Eigen::ArrayXXd misses = Eigen::ArrayXXd::Zero(4, 5);
    for (int s = 0; s < kSeeds; ++s) {
      const auto mask = make_mask(4, 5, 0.9, static_cast<std::uint64_t>(s));
      REQUIRE(mask.missing_count() == 18);
      misses += (!mask.observed).cast<double>();
    }
    misses /= kSeeds;
    for (Index i = 0; i < misses.size(); ++i) CHECK(std::abs(misses.data()[i] - 0.9) <= 0.01);
  }

  TEST_CASE("window widths follow ceil(D / Le) with a short tail") {
    auto split = [](Index d, std::size_t le) {
      return widths(windows(Matrix::Zero(3, d), make_mask(3, d, 0.0, 0), le));
    };
    CHECK(split(10, 5) == std::vector<Index>{5, 5});
    CHECK(split(7, 5) == std::vector<Index>{5, 2});
    const auto colon = split(2001, 100);
    CHECK(colon.size() == 21);
    CHECK(colon.back() == 1);
  }
}

TEST_CASE("csv header is detected and label column can be chosen") {
  const Dataset d = from_text("cls,a,b\nx,1,2\ny,3,4\nx,5,6\n", LabelColumn::at(0));
  CHECK(d.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(d.labels == std::vector<int>{0, 1, 0});
  CHECK(d.values(2, 1) == 6.0);
}

TEST_CASE("csv errors") {
  CHECK_THROWS_WITH_AS(from_text("1,0\n2,0\n"), "single-class label vector", DataError);
  CHECK_THROWS_AS(from_text("1,0\nabc,1\n"), DataError);
  CHECK_THROWS_AS(from_text(""), DataError);
  CHECK_THROWS_AS(load_csv("/nonexistent/data.csv", LabelColumn::last()), DataError);
  try {
    from_text("1,2,0\n1,x,1\n");
    FAIL("expected a parse failure");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).rfind("parse failure at line 2, column 2", 0) == 0);
  }
}

TEST_CASE("label column parsing") {
  CHECK_FALSE(LabelColumn::parse("last").index.has_value());
  CHECK(LabelColumn::parse("3").index == 3u);
  CHECK_THROWS_AS(LabelColumn::parse("-1"), ConfigError);
  CHECK_THROWS_AS(LabelColumn::parse("x"), ConfigError);
}

TEST_CASE("csv round trip preserves values and labels") {
  Rng rng(5);
  Dataset d;
  d.values = testing::normal_matrix(6, 3, rng);
  d.labels = {0, 1, 1, 0, 1, 0};
  const auto path = std::filesystem::temp_directory_path() / "ssfs_roundtrip.csv";
  write_csv(path, d);
  const Dataset back = load_csv(path, LabelColumn::last());
  std::filesystem::remove(path);
  CHECK(back.values == d.values);
  CHECK(back.labels == d.labels);
}

TEST_CASE("mask is reproducible and rejects bad rates") {
  CHECK((make_mask(13, 17, 0.37, 99).observed == make_mask(13, 17, 0.37, 99).observed).all());
  CHECK_FALSE((make_mask(13, 17, 0.37, 99).observed == make_mask(13, 17, 0.37, 100).observed).all());
  CHECK_THROWS_AS(make_mask(3, 3, 1.0, 0), ConfigError);
  CHECK_THROWS_AS(make_mask(3, 3, -0.1, 0), ConfigError);
}

TEST_CASE("mask csv round trip") {
  const auto mask = make_mask(5, 4, 0.5, 3);
  const auto path = std::filesystem::temp_directory_path() / "ssfs_mask.csv";
  write_mask_csv(path, mask);
  const auto back = read_mask_csv(path);
  std::filesystem::remove(path);
  CHECK((back.observed == mask.observed).all());
}

TEST_CASE("windows partition the columns and pass observed cells through") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 1 + static_cast<Index>(rng.below(40));
    const std::size_t le = 1 + rng.below(12);
    const Matrix values = testing::normal_matrix(6, d, rng);
    const auto mask = make_mask(6, d, 0.4, rng.next());
    const auto ws = windows(values, mask, le);
    CHECK(ws.size() == (static_cast<std::size_t>(d) + le - 1) / le);

    std::multiset<std::size_t> seen;
    for (std::size_t w = 0; w < ws.size(); ++w) {
      CHECK(ws[w].index() == static_cast<int>(w) + 1);
      const auto& ids = ws[w].feature_ids();
      CHECK(std::is_sorted(ids.begin(), ids.end()));
      for (Index j = 0; j < ws[w].width(); ++j) {
        const auto g = static_cast<Index>(ids[static_cast<std::size_t>(j)]);
        seen.insert(ids[static_cast<std::size_t>(j)]);
        for (Index m = 0; m < 6; ++m) {
          CHECK(ws[w].is_observed(m, j) == mask.observed(m, g));
          if (mask.observed(m, g)) CHECK(ws[w].value(m, j) == values(m, g));
        }
      }
    }
    std::multiset<std::size_t> expected;
    for (Index j = 0; j < d; ++j) expected.insert(static_cast<std::size_t>(j));
    CHECK(seen == expected);
  }
}

TEST_CASE("unobserved window cells cannot be read") {
  BoolMatrix observed = BoolMatrix::Constant(2, 2, true);
  observed(1, 0) = false;
  const auto w = testing::masked_window(Matrix::Ones(2, 2), observed);
  CHECK_THROWS_AS(w.value(1, 0), std::out_of_range);
  CHECK(w.observed_count() == 3);
  CHECK(w.filled(0.0)(1, 0) == 0.0);
}

TEST_CASE("standardization uses observed cells only") {
  Matrix v(4, 2);
  v << 1, 5, 2, 5, 3, 5, 100, 5;
  BoolMatrix obs = BoolMatrix::Constant(4, 2, true);
  obs(3, 0) = false;
  const Matrix z = standardize_observed(v, obs);
  CHECK(z(0, 0) + z(1, 0) + z(2, 0) == doctest::Approx(0.0));
  CHECK(z(0, 0) * z(0, 0) + z(1, 0) * z(1, 0) + z(2, 0) * z(2, 0) == doctest::Approx(3.0));
  CHECK(std::isnan(z(3, 0)));
  CHECK(z.col(1).isZero());
}
