#pragma once
#include <stdexcept>
#include <string>

namespace lieflow {

/// Invalid user input: malformed config file, bad CLI flag combination.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Structurally impossible request: root index out of range, grading without
/// black roots, coefficient block of the wrong shape, and so on.
struct ConstructionError : std::runtime_error {
  explicit ConstructionError(const std::string& what) : std::runtime_error(what) {}
};

/// A run-time singularity: vanishing principal matrix element, non-invertible
/// block field, NaN during integration.  Carries the grid location when known.
struct NumericalBreakdown : std::runtime_error {
  double x = 0.0, y = 0.0;
  bool located = false;
  explicit NumericalBreakdown(const std::string& what) : std::runtime_error(what) {}
  NumericalBreakdown(const std::string& what, double px, double py)
      : std::runtime_error(what + " at (x=" + std::to_string(px) + ", y=" + std::to_string(py) + ")"),
        x(px), y(py), located(true) {}
};

}  // namespace lieflow
