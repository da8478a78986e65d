#pragma once

#include <stdexcept>
#include <string>

namespace helio {

// Malformed input files (config syntax, unknown fields, bad types).
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally valid input that violates a model invariant.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A postcondition the library promises to uphold failed (solver bug, etc.).
struct InternalError : std::logic_error {
  explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace helio
