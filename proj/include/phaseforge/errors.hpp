#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace phaseforge {

/// Shape mismatch, zero dimension, or an argument outside its documented domain.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The data leaves nothing to work with (e.g. every sample truncated away).
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The leading eigenvalues are not separated, so the requested eigenvectors are not defined.
class DegenerateSpectrum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed CSV or binary input. `line()` is 1-based and 0 for binary input.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t byte_offset)
      : std::runtime_error(what + " (line " + std::to_string(line) + ", byte " + std::to_string(byte_offset) + ")"),
        line_(line),
        offset_(byte_offset) {}

  std::size_t line() const { return line_; }
  std::size_t byte_offset() const { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

}  // namespace phaseforge
