#include "ssfs/dataio.hpp"

#include "ssfs/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace ssfs {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_real(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

}  // namespace

int Dataset::n_classes() const {
  if (labels.empty()) return 0;
  return *std::max_element(labels.begin(), labels.end()) + 1;
}

void validate(const Dataset& data) {
  if (data.rows() < 2) throw DataError("dataset needs at least 2 instances");
  if (data.cols() < 1) throw DataError("dataset needs at least 1 feature");
  if (static_cast<Index>(data.labels.size()) != data.rows()) throw DataError("label count does not match instance count");
  for (int c : data.labels) {
    if (c < 0) throw DataError("labels must be non-negative class ids");
  }
  if (std::adjacent_find(data.labels.begin(), data.labels.end(), std::not_equal_to<>()) == data.labels.end()) {
    throw DataError("single-class label vector");
  }
}

LabelColumn LabelColumn::parse(const std::string& text) {
  if (text == "last") return last();
  std::size_t idx = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), idx);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("label column must be 'last' or a non-negative integer, got '" + text + "'");
  }
  return at(idx);
}

std::string LabelColumn::to_string() const { return index ? std::to_string(*index) : std::string("last"); }

Dataset parse_csv(std::istream& in, LabelColumn label_column) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t n_cells = 0;
  std::size_t label_idx = 0;
  bool have_shape = false;

  std::vector<std::string> names;
  std::vector<double> flat;
  std::vector<int> labels;
  std::vector<std::string> class_names;
  std::unordered_map<std::string, int> class_ids;

  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    auto cells = split_row(line);

    if (!have_shape) {
      n_cells = cells.size();
      if (n_cells < 2) throw DataError("need at least one feature column and a label column (line " + std::to_string(line_no) + ")");
      label_idx = label_column.index.value_or(n_cells - 1);
      if (label_idx >= n_cells) {
        throw DataError("label column " + std::to_string(label_idx) + " out of range for " + std::to_string(n_cells) + " columns");
      }
      have_shape = true;
      bool header = false;
      for (std::size_t c = 0; c < n_cells; ++c) {
        if (c != label_idx && !parse_real(cells[c])) header = true;
      }
      if (header) {
        for (std::size_t c = 0; c < n_cells; ++c) {
          if (c != label_idx) names.emplace_back(cells[c]);
        }
        continue;
      }
    }

    if (cells.size() != n_cells) throw DataError("ragged row at line " + std::to_string(line_no));

    for (std::size_t c = 0; c < n_cells; ++c) {
      if (c == label_idx) continue;
      auto v = parse_real(cells[c]);
      if (!v || !std::isfinite(*v)) {
        throw DataError("parse failure at line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) + ": '" +
                        std::string(cells[c]) + "'");
      }
      flat.push_back(*v);
    }
    std::string key(cells[label_idx]);
    if (key.empty()) throw DataError("empty label at line " + std::to_string(line_no));
    auto [it, inserted] = class_ids.try_emplace(key, static_cast<int>(class_names.size()));
    if (inserted) class_names.push_back(key);
    labels.push_back(it->second);
  }

  if (!have_shape) throw DataError("empty CSV input");

  const auto d = static_cast<Index>(n_cells - 1);
  const auto m = static_cast<Index>(labels.size());
  Dataset data;
  data.values.resize(m, d);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < d; ++j) data.values(i, j) = flat[static_cast<std::size_t>(i * d + j)];
  }
  data.labels = std::move(labels);
  data.class_names = std::move(class_names);
  if (names.empty()) {
    for (Index j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
  }
  data.feature_names = std::move(names);
  validate(data);
  return data;
}

Dataset load_csv(const std::filesystem::path& path, LabelColumn label_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return parse_csv(in, label_column);
}

void write_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.precision(17);
  for (Index j = 0; j < data.cols(); ++j) {
    out << (static_cast<std::size_t>(j) < data.feature_names.size() ? data.feature_names[j] : "f" + std::to_string(j)) << ',';
  }
  out << "label\n";
  for (Index i = 0; i < data.rows(); ++i) {
    for (Index j = 0; j < data.cols(); ++j) out << data.values(i, j) << ',';
    out << data.labels[static_cast<std::size_t>(i)] << '\n';
  }
}

std::size_t ObservationMask::missing_count() const { return static_cast<std::size_t>((!observed).count()); }

ObservationMask make_mask(Index rows, Index cols, double missing_rate, std::uint64_t seed) {
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) throw ConfigError("missing rate must lie in [0, 1)");
  if (rows < 0 || cols < 0) throw ConfigError("negative mask shape");
  ObservationMask mask;
  mask.missing_rate = missing_rate;
  mask.seed = seed;
  mask.observed = BoolMatrix::Constant(rows, cols, true);

  const auto cells = static_cast<std::size_t>(rows * cols);
  const auto n_missing = static_cast<std::size_t>(std::llround(missing_rate * static_cast<double>(cells)));
  if (n_missing == 0) return mask;

  // Partial Fisher-Yates over row-major cell ids: the first n_missing slots
  // form a uniform sample without replacement.
  std::vector<std::size_t> ids(cells);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < n_missing; ++i) {
    std::size_t j = i + rng.below(cells - i);
    std::swap(ids[i], ids[j]);
    const auto r = static_cast<Index>(ids[i] / static_cast<std::size_t>(cols));
    const auto c = static_cast<Index>(ids[i] % static_cast<std::size_t>(cols));
    mask.observed(r, c) = false;
  }
  return mask;
}

ObservationMask apply_mask(const Dataset& data, double missing_rate, std::uint64_t seed) {
  return make_mask(data.rows(), data.cols(), missing_rate, seed);
}

void write_mask_csv(const std::filesystem::path& path, const ObservationMask& mask) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  for (Index i = 0; i < mask.rows(); ++i) {
    for (Index j = 0; j < mask.cols(); ++j) {
      if (j) out << ',';
      out << (mask.observed(i, j) ? '1' : '0');
    }
    out << '\n';
  }
}

ObservationMask read_mask_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::vector<std::vector<bool>> grid;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    std::vector<bool> row;
    for (auto cell : split_row(line)) {
      if (cell == "1") row.push_back(true);
      else if (cell == "0") row.push_back(false);
      else throw DataError("mask cell must be 0 or 1 at line " + std::to_string(line_no));
    }
    if (!grid.empty() && row.size() != grid.front().size()) throw DataError("ragged row at line " + std::to_string(line_no));
    grid.push_back(std::move(row));
  }
  ObservationMask mask;
  const auto m = static_cast<Index>(grid.size());
  const auto d = grid.empty() ? Index{0} : static_cast<Index>(grid.front().size());
  mask.observed.resize(m, d);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < d; ++j) mask.observed(i, j) = grid[i][j];
  }
  const auto cells = static_cast<double>(m * d);
  mask.missing_rate = cells > 0 ? static_cast<double>(mask.missing_count()) / cells : 0.0;
  return mask;
}

Matrix standardize_observed(const Matrix& values, const BoolMatrix& observed) {
  if (values.rows() != observed.rows() || values.cols() != observed.cols()) {
    throw DataError("mask shape does not match data");
  }
  Matrix out = Matrix::Constant(values.rows(), values.cols(), std::numeric_limits<double>::quiet_NaN());
  for (Index j = 0; j < values.cols(); ++j) {
    double sum = 0.0;
    Index n = 0;
    for (Index i = 0; i < values.rows(); ++i) {
      if (observed(i, j)) {
        sum += values(i, j);
        ++n;
      }
    }
    if (n == 0) continue;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (Index i = 0; i < values.rows(); ++i) {
      if (observed(i, j)) ss += (values(i, j) - mean) * (values(i, j) - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    for (Index i = 0; i < values.rows(); ++i) {
      if (observed(i, j)) out(i, j) = sd > 1e-12 ? (values(i, j) - mean) / sd : 0.0;
    }
  }
  return out;
}

SparseWindow::SparseWindow(int index, std::vector<std::size_t> feature_ids, Matrix values, BoolMatrix observed)
    : index_(index), feature_ids_(std::move(feature_ids)), values_(std::move(values)), observed_(std::move(observed)) {
  if (values_.cols() < 1) throw DataError("window must hold at least one feature");
  if (static_cast<Index>(feature_ids_.size()) != values_.cols() || observed_.rows() != values_.rows() ||
      observed_.cols() != values_.cols()) {
    throw DataError("window shape mismatch");
  }
  if (!std::is_sorted(feature_ids_.begin(), feature_ids_.end(), std::less_equal<>())) {
    throw DataError("window feature ids must be strictly increasing");
  }
  for (Index j = 0; j < values_.cols(); ++j) {
    for (Index i = 0; i < values_.rows(); ++i) {
      if (!observed_(i, j)) values_(i, j) = std::numeric_limits<double>::quiet_NaN();
    }
  }
}

double SparseWindow::value(Index m, Index j) const {
  if (!observed_(m, j)) throw std::out_of_range("read of unobserved window cell");
  return values_(m, j);
}

std::size_t SparseWindow::observed_count() const { return static_cast<std::size_t>(observed_.count()); }

Matrix SparseWindow::filled(double fill) const { return observed_.select(values_, fill); }

std::vector<SparseWindow> windows(const Matrix& values, const ObservationMask& mask, std::size_t width) {
  if (width < 1) throw ConfigError("window size must be at least 1");
  if (values.rows() != mask.rows() || values.cols() != mask.cols()) throw DataError("mask shape does not match data");
  std::vector<SparseWindow> out;
  const auto d = static_cast<std::size_t>(values.cols());
  int index = 1;
  for (std::size_t start = 0; start < d; start += width, ++index) {
    const std::size_t w = std::min(width, d - start);
    std::vector<std::size_t> ids(w);
    std::iota(ids.begin(), ids.end(), start);
    const auto s = static_cast<Index>(start);
    const auto wi = static_cast<Index>(w);
    out.emplace_back(index, std::move(ids), values.middleCols(s, wi), mask.observed.middleCols(s, wi));
  }
  return out;
}

std::vector<SparseWindow> windows(const Dataset& data, const ObservationMask& mask, std::size_t width) {
  return windows(data.values, mask, width);
}

}  // namespace ssfs
