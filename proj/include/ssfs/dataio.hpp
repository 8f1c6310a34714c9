#pragma once

#include "ssfs/common.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ssfs {

/// Labeled tabular data: M instances by D features plus class labels 0..K-1.
struct Dataset {
  Matrix values;
  std::vector<int> labels;
  std::vector<std::string> feature_names;
  /// Original label spellings, indexed by encoded class id.
  std::vector<std::string> class_names;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
  int n_classes() const;
};

/// Throws DataError unless M >= 2, D >= 1, labels match M and at least two classes occur.
void validate(const Dataset& data);

/// Which CSV column carries the label.
struct LabelColumn {
  std::optional<std::size_t> index;  // empty means the last column

  static LabelColumn last() { return {}; }
  static LabelColumn at(std::size_t i) { return {i}; }
  /// Accepts "last" or a non-negative integer.
  static LabelColumn parse(const std::string& text);
  std::string to_string() const;
};

/// Comma-separated, optional header (detected when a feature cell of the
/// first row is not numeric). Labels are re-encoded in first-appearance order.
Dataset parse_csv(std::istream& in, LabelColumn label_column);
Dataset load_csv(const std::filesystem::path& path, LabelColumn label_column);
void write_csv(const std::filesystem::path& path, const Dataset& data);

struct ObservationMask {
  BoolMatrix observed;  // true = observed
  double missing_rate = 0.0;
  std::uint64_t seed = 0;

  Index rows() const { return observed.rows(); }
  Index cols() const { return observed.cols(); }
  std::size_t missing_count() const;
};

/// Marks exactly round(rate*M*D) cells unobserved, sampled uniformly without
/// replacement over all cells. Labels are never masked.
ObservationMask make_mask(Index rows, Index cols, double missing_rate, std::uint64_t seed);
ObservationMask apply_mask(const Dataset& data, double missing_rate, std::uint64_t seed);

/// Writes the mask as an M-line grid of 0/1 (1 = observed).
void write_mask_csv(const std::filesystem::path& path, const ObservationMask& mask);
ObservationMask read_mask_csv(const std::filesystem::path& path);

/// Per-column standardization over observed entries only. Unobserved cells
/// are left as NaN; constant or empty columns map to zero at observed cells.
Matrix standardize_observed(const Matrix& values, const BoolMatrix& observed);

/// One window of Le consecutive streamed features.
///
/// Unobserved cells hold NaN and must be read only through value(), which
/// rejects them.
class SparseWindow {
 public:
  SparseWindow(int index, std::vector<std::size_t> feature_ids, Matrix values, BoolMatrix observed);

  int index() const { return index_; }
  const std::vector<std::size_t>& feature_ids() const { return feature_ids_; }
  Index rows() const { return values_.rows(); }
  Index width() const { return values_.cols(); }

  bool is_observed(Index m, Index j) const { return observed_(m, j); }
  /// Throws std::out_of_range for an unobserved cell.
  double value(Index m, Index j) const;
  const BoolMatrix& observed() const { return observed_; }
  std::size_t observed_count() const;

  /// Copy with unobserved cells replaced by `fill`.
  Matrix filled(double fill) const;

 private:
  int index_;
  std::vector<std::size_t> feature_ids_;
  Matrix values_;
  BoolMatrix observed_;
};

/// Splits the columns into ceil(D/Le) windows, in order, 1-based indices.
/// The final window is short when Le does not divide D.
std::vector<SparseWindow> windows(const Matrix& values, const ObservationMask& mask, std::size_t width);
std::vector<SparseWindow> windows(const Dataset& data, const ObservationMask& mask, std::size_t width);

}  // namespace ssfs
