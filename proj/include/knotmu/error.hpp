#pragma once

#include <stdexcept>
#include <string>

namespace knotmu {

/// Malformed input text (syntax, unknown keys, duplicate or dangling ids).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The diagram or knot is structurally unfit for the requested operation.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Geometry is in a non-generic position that the solver cannot resolve.
class DegenerateConfiguration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input is well-formed but outside what the operation supports.
class UnsupportedInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Laurent polynomial is not in normalized Alexander form.
class NormalizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace knotmu
