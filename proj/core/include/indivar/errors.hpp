#pragma once

#include <stdexcept>
#include <string>

namespace indivar {

/// Invalid arguments, malformed inputs, out-of-range parameters.
class input_error : public std::invalid_argument {
 public:
  explicit input_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failures (factorization breakdown, non-convergence).
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace indivar
