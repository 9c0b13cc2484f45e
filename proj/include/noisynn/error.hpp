#pragma once

#include <stdexcept>
#include <string>

namespace noisynn {

// Argument outside the documented domain of an operation.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Inputs are valid individually but the requested quantity is undefined
// (zero noise variance in a denominator, rank-zero data, tied eigenvalues).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Isomap neighborhood graph has more than one connected component.
class DisconnectedGraph : public DomainError {
 public:
  using DomainError::DomainError;
};

// Malformed external input (CSV, vector files, flag values).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace noisynn
