#pragma once

#include <stdexcept>
#include <string>

namespace amm {

/// Shapes do not conform (row lengths, inner dimensions, aligned streams).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid configuration value (sketch size, schedule, k >= m, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite input value.
class ValueError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A dense factorization failed to converge.
class KernelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Dense oracle refused: the requested product is larger than the desk-scale guard.
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace amm
