#pragma once

#include <stdexcept>
#include <string>

namespace zkdamper {

// Base for every error raised by the library. The CLI maps the subclasses
// onto its exit-code contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A constraint among the stability constants cannot be met.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Fields defined on different grids were combined.
class GridMismatchError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent user input (config, files, parameters).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace zkdamper
