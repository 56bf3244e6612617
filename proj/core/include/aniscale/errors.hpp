#pragma once

#include <stdexcept>
#include <string>

namespace aniscale {

// Bad run configuration / malformed input files.  CLI exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A quadrature or iterative routine exhausted its budget before the
// error estimate stabilized.  CLI exit code 3.
struct NonConvergenceError : std::runtime_error {
  explicit NonConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Parameter combination outside the covered theory; the message names the
// violated condition verbatim.  CLI exit code 4.
struct ExcludedParameterError : std::runtime_error {
  explicit ExcludedParameterError(const std::string& msg) : std::runtime_error(msg) {}
};

// Rectangle/lag requests that do not fit the available geometry.
struct GeometryError : std::runtime_error {
  explicit GeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InsufficientDataError : std::runtime_error {
  explicit InsufficientDataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace aniscale
