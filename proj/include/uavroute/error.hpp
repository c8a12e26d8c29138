#pragma once

#include <stdexcept>
#include <string>

namespace uavroute {

// Base of every error the library throws. The CLI maps each subclass to
// its own exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameter values or malformed configuration documents.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Math evaluated outside its domain (non-positive distance, zero rate).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A caller broke an operation's precondition (illegal action, non-edge,
// attacking a protected node).
class ContractError : public Error {
 public:
  using Error::Error;
};

// The routing problem is not well-posed: no source-destination path, no
// connected topology within the retry budget.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace uavroute
