#pragma once

#include <stdexcept>
#include <string>

namespace udc {

// File or stream level failure (missing file, truncated payload, bad magic).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Numeric breakdown (NaN/Inf in a pipeline stage, singular spectrum, ...).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace udc
