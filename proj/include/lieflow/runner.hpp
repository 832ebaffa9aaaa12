#pragma once
#include <string>

#include "lieflow/config.hpp"
#include "lieflow/report.hpp"

namespace lieflow {

struct RunOutcome {
  nlohmann::ordered_json report;
  bool ok = true;
};

/// Identity suite over random group elements: structural generator relations,
/// the determinant and bilinear identities of highest-vector elements, block
/// field factorizations, bordered determinants, and chain recursions.
RunOutcome run_verify(const RunConfig& cfg);

/// Integrates the two linear flows on the configured grid for every step
/// size, evaluates the lattice equations by centered differences, and
/// estimates the convergence order of each residual.
RunOutcome run_residual(const RunConfig& cfg);

/// Re-integrates interior block fields from boundary data alone and reports
/// the deviation from the group-theoretic solution at every step size, with
/// convergence orders.
RunOutcome run_goursat(const RunConfig& cfg);

/// Builds the block fields on the configured grid.  When out_dir is
/// non-empty, writes one CSV per lattice site per step size (columns x, y,
/// then row-major entries of the block field).
RunOutcome run_solve(const RunConfig& cfg, const std::string& out_dir);

}  // namespace lieflow
