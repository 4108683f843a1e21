#pragma once

#include <stdexcept>
#include <string>

namespace fdi {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or schema-violating configuration; the CLI maps it to exit 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A numeric precondition on an algorithm parameter does not hold
// (e.g. c1 + c2 <= 4 for the constriction factor). Also exit 2.
class ConstraintViolated : public Error {
 public:
  using Error::Error;
};

class InsufficientHistory : public Error {
 public:
  using Error::Error;
};

// State became non-finite during integration; the CLI maps it to exit 3.
class SimulationDiverged : public Error {
 public:
  // `context` (e.g. a scenario id) is prefixed to the message when set.
  SimulationDiverged(std::string variable, double time,
                     const std::string& context = {});

  const std::string& variable() const { return variable_; }
  double time() const { return time_; }

 private:
  std::string variable_;
  double time_;
};

}  // namespace fdi
