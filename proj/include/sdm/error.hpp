#pragma once

#include <stdexcept>
#include <string>

namespace sdm {

/// Precondition violated by the caller (shape mismatch, out-of-range index, bad bounds).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid user configuration (schedule mismatch, unknown key, bad flag value).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or truncated on-disk data.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values, divergence, or a singular closed form.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed-form direction gradient evaluated at a one-hot probability vector.
class SingularityError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// PCA on samples whose covariance has rank < 2.
class DegenerateSubspaceError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace sdm
