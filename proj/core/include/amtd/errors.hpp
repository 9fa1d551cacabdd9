#pragma once

#include <stdexcept>
#include <string>

namespace amtd {

// Shapes or layer dimensions that do not chain.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// API misuse: empty inputs, calling in the wrong state, bad arguments.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// NaN or Inf where finite values are required.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Value outside the admissible set (e.g. an action outside its space).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Operation not supported by the given object (e.g. oracle on a continuous env).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace amtd
