#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ssfs {

/// Dense column-major matrix; rows are instances, columns are features.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
/// Row-major storage for latent factors so each row is contiguous.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Index = Eigen::Index;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unusable input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// SGD blew up (learning rate too large for the data scale).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Too few samples for the requested statistic or fold count.
class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

}  // namespace ssfs
