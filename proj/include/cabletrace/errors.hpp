#pragma once

#include <stdexcept>
#include <string>

namespace cabletrace {

/// Malformed input text (scenario file, command script, keymap).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A formula evaluated outside its mathematical domain (e.g. log of a non-positive value).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cabletrace
