#pragma once

#include <stdexcept>
#include <string>

namespace prolatoscope {

// Numerical failure: iteration caps hit, quadrature non-convergence,
// invariant violations detected in computed or loaded data.
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid user-supplied configuration (CLI exit code 2).
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A required on-disk artifact (e.g. the basis cache) is absent (CLI exit code 4).
struct missing_artifact_error : std::runtime_error {
  explicit missing_artifact_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace prolatoscope
