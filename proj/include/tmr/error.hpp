#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tmr {

/// Base class for every data-level failure raised by the library. The CLI
/// maps anything derived from it to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input at a known line (1-based).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  DimensionError(std::size_t expected, std::size_t actual)
      : Error("dimension mismatch: expected " + std::to_string(expected) +
              ", got " + std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}

  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

class DegenerateVectorError : public Error {
 public:
  using Error::Error;
};

class EmptyMemoryError : public Error {
 public:
  using Error::Error;
};

class EmptyIndexError : public Error {
 public:
  using Error::Error;
};

class ConflictError : public Error {
 public:
  using Error::Error;
};

/// An embedding provider failed. `first_index` is the position, within the
/// caller's text list, of the first text of the batch that failed.
class ProviderError : public Error {
 public:
  ProviderError(std::size_t first_index, const std::string& what)
      : Error("provider failed on batch starting at " +
              std::to_string(first_index) + ": " + what),
        first_index_(first_index),
        detail_(what) {}

  std::size_t first_index() const noexcept { return first_index_; }
  /// The failure description without the batch prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t first_index_;
  std::string detail_;
};

/// A span producer returned overlapping spans.
class ProducerContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace tmr
