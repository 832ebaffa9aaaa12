#pragma once
#include <string>
#include <vector>

#include <json.hpp>

#include "lieflow/flows.hpp"

namespace lieflow {

struct GridSpec {
  double x0 = 0.0, y0 = 0.0;
  double extent = 1.0;
  std::vector<double> steps = {1e-2};

  std::vector<double> xs(double h) const;
  std::vector<double> ys(double h) const;
};

/// Everything one run needs.  Coefficients are optional: sample-based
/// verification does not use flows, and asking for flow modes without
/// coefficient blocks is a configuration error.
struct RunConfig {
  int rank = 0;
  GradingVector grading;
  int max_grade = 1;
  std::string mode = "float";  // "float" or "rational"
  unsigned long seed = 1;
  int samples = 100;
  double tol = 1e-9;
  GridSpec grid;
  bool reduced_scan = false;  // also scan the two-neighbor chain form
  bool has_coeffs = false;
  CoefficientSet<double> coeffs;

  SiteLattice lattice() const { return build_site_lattice(rank, grading); }
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

/// Normalized echo of the configuration, embedded in reports so a report
/// fully identifies its run.
nlohmann::ordered_json config_echo(const RunConfig& c);

}  // namespace lieflow
