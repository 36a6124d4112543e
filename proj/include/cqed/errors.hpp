#pragma once

#include <stdexcept>
#include <string>

namespace cqed {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

struct FitError : std::runtime_error {
  explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cqed
