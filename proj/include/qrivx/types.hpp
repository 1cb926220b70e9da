#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace qrivx {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Base class for everything this library throws.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid argument values (tau outside (0,1), bad tuning parameters, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Design matrix not of full column rank, or collinear regressors.
class SingularDesignError : public Error {
 public:
  using Error::Error;
};

// Sample-split projection could not be formed (near-zero block mean).
class DegenerateSplitError : public Error {
 public:
  using Error::Error;
};

// Sum z~ x' not invertible in the sandwich variance.
class WeakInstrumentError : public Error {
 public:
  using Error::Error;
};

// Caller violated a cross-argument contract (shape mismatch, missing grid cells).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Malformed input data (CSV, config, missing columns).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace qrivx
