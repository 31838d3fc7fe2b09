#pragma once

#include <stdexcept>
#include <string>

namespace rrgen {

// Incompatible tensor shapes (messages always name both shapes).
struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Out-of-range lookup (token index, table row, attribute value).
struct IndexError : std::out_of_range {
  explicit IndexError(const std::string& msg) : std::out_of_range(msg) {}
};

// A caller-side precondition was violated.
struct ContractError : std::invalid_argument {
  explicit ContractError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Unreadable, unwritable or malformed file.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rrgen
