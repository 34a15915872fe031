#ifndef PTSEE_ERRORS_HPP
#define PTSEE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ptsee {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions are incompatible.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A numeric or count parameter is outside its valid range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file (bad magic, truncated, ragged CSV, ...).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, written or renamed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A neighbor distribution cannot reach the requested perplexity because
/// every candidate distance is zero.
class DegenerateDistributionError : public Error {
 public:
  using Error::Error;
};

/// KL divergence is infinite: some q is zero where p is positive.
class DivergenceInfiniteError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss or gradient.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimensionError : public Error {
 public:
  using Error::Error;
};

}  // namespace ptsee

#endif  // PTSEE_ERRORS_HPP
