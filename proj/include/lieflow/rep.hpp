#pragma once
#include <vector>

#include "lieflow/cartan.hpp"
#include "lieflow/matrix.hpp"

namespace lieflow {

/// Fundamental representation number j of the rank-n A-series algebra,
/// realized on the j-th exterior power of the defining (n+1)-dimensional
/// space.  Basis vectors are the j-element subsets of {1..n+1} in
/// lexicographic order and are declared orthonormal; the highest vector
/// {1..j} sits at position 0.  Indices j = 0 and j = n+1 give the trivial
/// one-dimensional representation (empty and full subset).
struct FundamentalRep {
  int rank = 0;
  int index = 0;
  int dim = 0;
  std::vector<std::vector<int>> subsets;  // ascending members, lex order
  std::vector<MatQ> raise_by_root;        // [i-1]: action of E_{i,i+1}
  std::vector<MatQ> lower_by_root;        // [i-1]: action of E_{i+1,i}
  std::vector<VecQ> cartan_diag;          // [i-1]: diagonal of h_i

  const MatQ& xplus(int i) const;
  const MatQ& xminus(int i) const;
  MatQ h(int i) const;
  VecQ h_diagonal(int i) const;
  VecQ highest_vector() const;

  /// h_1..h_rank eigenvalues of basis vector `pos`.
  std::vector<int> weight_of_basis(int pos) const;
  /// Weight of a vector supported on a single basis direction (the only kind
  /// the lowering chains produce); throws otherwise.
  std::vector<int> weight_of_vector(const VecQ& v) const;
};

FundamentalRep build_fundamental_rep(int rank, int index);

enum class ChainEnd {
  FromStart,  // highest vector lowered by roots m, m+1, ... (lives in rep m)
  FromEnd     // highest vector lowered by roots mbar, mbar-1, ... (rep mbar)
};

/// The R+1 state vectors spanning a zero-run block inside the matching
/// fundamental representation.  For R = 0 this is just the highest vector.
std::vector<VecQ> red_basis(const FundamentalRep& rep, const RedBlock& block, ChainEnd end);

}  // namespace lieflow
