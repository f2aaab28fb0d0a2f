#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace oran {

// Error taxonomy mirrors the CLI exit codes (see tools/oranctl.cpp):
//   ConfigError -> 2, BudgetError -> 3, IoError -> 4,
//   CheckpointError -> 5, EmptyLabeledError -> 6.

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class BudgetError : public std::runtime_error {
 public:
  BudgetError(const std::string& msg, const std::string& count_decimal)
      : std::runtime_error(msg), count(count_decimal) {}
  // Exact structural count that exceeded the budget, as decimal text
  // (the value can exceed 64 bits).
  std::string count;
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

class CheckpointError : public std::runtime_error {
 public:
  explicit CheckpointError(const std::string& msg) : std::runtime_error(msg) {}
};

class EmptyLabeledError : public std::runtime_error {
 public:
  explicit EmptyLabeledError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a NaN/Inf shows up in parameters or activations. Training
// aborts instead of silently propagating garbage.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace oran
