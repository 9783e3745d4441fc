#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bsr {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// expression trees
struct InvalidTree : Error { using Error::Error; };
struct FeatureOutOfRange : Error { using Error::Error; };
struct UnknownOperator : Error { using Error::Error; };

struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t position)
      : Error(msg + " (at position " + std::to_string(position) + ")"),
        pos(position) {}
  std::size_t pos;
};

// priors and scales
struct NonPositiveScale : Error { using Error::Error; };

// proposals and parameter jumps
struct InvalidSite : Error { using Error::Error; };
struct DimensionError : Error { using Error::Error; };

// linear mixture
struct NonFiniteColumn : Error { using Error::Error; };
struct NonPositiveVariance : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };

// sampler
struct InitFailure : Error { using Error::Error; };

// data ingestion
struct MissingColumn : Error { using Error::Error; };
struct EmptyFile : Error { using Error::Error; };
struct NonPositivePrice : Error { using Error::Error; };

struct NonNumericCell : Error {
  NonNumericCell(const std::string& msg, std::size_t row, std::size_t col)
      : Error(msg + " (row " + std::to_string(row) + ", column " +
              std::to_string(col) + ")"),
        row(row),
        col(col) {}
  std::size_t row, col;
};

// configuration
struct ConfigError : Error { using Error::Error; };

}  // namespace bsr
