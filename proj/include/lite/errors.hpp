#pragma once

#include <stdexcept>
#include <string>

namespace lite {

// Tensor or array dimensions do not agree.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A caller violated an operation's precondition (empty mask, non-scalar loss, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A NaN reached an operation that cannot order or normalize it.
class NumericError : public ContractError {
 public:
  using ContractError::ContractError;
};

// Invalid user-supplied configuration. `path` is the JSON path of the offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
  ConfigError(const std::string& path, const std::string& msg)
      : std::runtime_error(path + ": " + msg) {}
};

// A pipeline stage needs an artifact (checkpoint, dataset, dump) that is not on disk.
class MissingArtifactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training produced a non-finite loss.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lite
