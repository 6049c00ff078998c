#pragma once

#include <stdexcept>
#include <string>

namespace rombit {

/// Malformed or inconsistent input (bad dimensions, schema violation, ...).
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Instance file could not be parsed; `line` is 1-based.
struct ParseError : std::runtime_error {
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
  std::size_t line;
};

/// Operation called in a state that does not allow it (e.g. feeding a finished extractor).
struct StateError : std::logic_error {
  using std::logic_error::logic_error;
};

/// A caller precondition was violated (e.g. equal keys passed to the distinct extractor).
struct PreconditionError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Exhaustive routine asked for an instance above its size guard.
struct CapacityError : std::length_error {
  using std::length_error::length_error;
};

}  // namespace rombit
