#pragma once

#include <stdexcept>
#include <string>

namespace kinmv {

// Non-finite or out-of-domain input to a mathematical operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Vector/matrix/atom dimensions that do not agree.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid configuration, construction parameters or missing inputs.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Failure during a run, e.g. a particle state that stopped being finite.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem and store-format failures. The message always names the path or
// block involved.
class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kinmv
