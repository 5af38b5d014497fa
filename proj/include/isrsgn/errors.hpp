#pragma once

#include <stdexcept>
#include <string>

namespace isrsgn {

/// Malformed or inconsistent scenario/configuration input.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// The adaptive quadrature could not reach its error target.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimated_error)
      : std::runtime_error(what), estimated_error_(estimated_error) {}
  double estimated_error() const noexcept { return estimated_error_; }

 private:
  double estimated_error_;
};

/// The simulated optical band does not fit in the sampled bandwidth.
class AliasingError : public std::runtime_error {
 public:
  explicit AliasingError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace isrsgn
