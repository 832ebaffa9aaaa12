#pragma once
#include <string>
#include <vector>

#include "lieflow/matrix.hpp"

namespace lieflow {

/// Cartan matrix of the A-series algebra of given rank, with its exact
/// rational inverse.
struct CartanData {
  int rank = 0;
  Eigen::MatrixXi matrix;  // 2 on the diagonal, -1 next to it
  MatQ inverse;
};

CartanData cartan_an(int rank);

/// One entry of a grading vector per simple root: 1 selects a "black" root
/// (grade-carrying), 0 leaves the root at grade zero ("red").
using GradingVector = std::vector<int>;

/// Parses "0,1,0,1"; validates entries and length against the rank.
GradingVector parse_grading(const std::string& text, int rank);

/// Coefficients w = K^{-1} c of the grading operator H = sum_i w_i h_i.
VecQ grading_coefficients(const CartanData& cartan, const GradingVector& c);

/// Maximal run of grade-zero roots: roots m, m+1, ..., m+R-1.
struct RedBlock {
  int m = 0;  // first root of the run (1-based)
  int R = 0;  // run length (0 allowed for lattice sites squeezed between black roots)
  int mbar() const { return m + R - 1; }        // last root of the run
  int black_after() const { return m + R; }     // root index right after the run
  int black_before() const { return m - 1; }    // root index right before the run
};

struct RedBlockDecomposition {
  std::vector<RedBlock> blocks;     // zero runs, left to right
  std::vector<int> black_roots;     // 1-based positions with c_i = 1
};

/// Splits a grading vector into its zero runs and black roots.  Rejects the
/// all-zero grading (no grade structure to build on).
RedBlockDecomposition decompose_red_blocks(const GradingVector& c);

/// The Toda lattice attached to a grading: one site per gap between
/// consecutive black roots, including the gaps before the first and after the
/// last one.  Sites between adjacent black roots have R = 0; the site after a
/// trailing black root has m = rank+1 and carries the one-dimensional
/// determinant representation.
struct SiteLattice {
  int rank = 0;
  GradingVector grading;
  std::vector<RedBlock> sites;

  int size() const { return static_cast<int>(sites.size()); }
  const RedBlock& site(int s) const { return sites.at(s); }
  bool has_site(int s) const { return s >= 0 && s < size(); }
  /// Representation index whose highest element divides fields of site s
  /// from below: the black root preceding the site (0 for the first site).
  int rep_before(int s) const { return sites.at(s).black_before(); }
  /// Black root index following site s (rank+1 past the last black root).
  int rep_after(int s) const { return sites.at(s).black_after(); }
  bool is_boundary_rep(int j) const { return j == 0 || j == rank + 1; }
};

SiteLattice build_site_lattice(int rank, const GradingVector& c);

}  // namespace lieflow
