#pragma once

#include <stdexcept>
#include <string>

namespace gibbslim {

// Error taxonomy shared by the library and the CLI.  Exit codes:
// 2 = configuration / usage, 3 = numerical failure, 4 = dimension cap.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
  virtual int exit_code() const { return 3; }
};

struct ConfigError : Error {
  using Error::Error;
  int exit_code() const override { return 2; }
};

struct IoFailure : Error {
  using Error::Error;
  int exit_code() const override { return 2; }
};

struct NumericalError : Error {
  using Error::Error;
};

struct NonPositiveOperator : NumericalError { using NumericalError::NumericalError; };
struct DiscretizationTooCoarse : NumericalError { using NumericalError::NumericalError; };
struct NegativeWeight : NumericalError { using NumericalError::NumericalError; };
struct NotPositive : NumericalError { using NumericalError::NumericalError; };
struct NonHermitian : NumericalError { using NumericalError::NumericalError; };
struct NotAState : NumericalError { using NumericalError::NumericalError; };
struct SupportViolation : NumericalError { using NumericalError::NumericalError; };
struct DegenerateWeights : NumericalError { using NumericalError::NumericalError; };
struct NoConvergence : NumericalError { using NumericalError::NumericalError; };
struct TailTooLarge : NumericalError { using NumericalError::NumericalError; };

struct DimensionError : Error {
  using Error::Error;
  int exit_code() const override { return 4; }
};

struct DimensionOverflow : DimensionError { using DimensionError::DimensionError; };
struct OrderTooLarge : DimensionError { using DimensionError::DimensionError; };
struct BadDims : DimensionError { using DimensionError::DimensionError; };

}  // namespace gibbslim
