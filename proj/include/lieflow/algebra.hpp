#pragma once
#include <memory>
#include <mutex>
#include <vector>

#include "lieflow/rep.hpp"

namespace lieflow {

/// Immutable bundle of everything attached to a rank: the Cartan data and all
/// fundamental representations 0..rank+1, plus cached composite-root
/// matrices.  Instances are shared process-wide through get_algebra() and are
/// safe to read from several threads.
class Algebra {
 public:
  explicit Algebra(int rank);

  int rank() const { return rank_; }
  const CartanData& cartan() const { return cartan_; }
  const FundamentalRep& rep(int j) const;

  /// Composite raising generator spanning simple roots a..b (right-nested
  /// commutator).  Degenerate edges: a == b gives the simple generator,
  /// a == b+1 gives the identity.  a > b+1 is rejected.
  const MatQ& composite_raise(int rep_index, int a, int b) const;
  MatQ composite_lower(int rep_index, int a, int b) const;

  /// Diagonal of the grading operator H = sum_i w_i h_i in representation j.
  VecQ grading_diagonal(int rep_index, const VecQ& w) const;

 private:
  int rank_;
  CartanData cartan_;
  std::vector<FundamentalRep> reps_;
  mutable std::mutex cache_mutex_;
  mutable std::vector<std::vector<MatQ>> raise_cache_;  // [rep][key(a,b)]
  mutable std::vector<std::vector<bool>> raise_ready_;
};

std::shared_ptr<const Algebra> get_algebra(int rank);

/// Result of checking the defining relations of the generators in every
/// fundamental representation with exact arithmetic.
struct ChevalleyReport {
  long relations_checked = 0;
  bool ok = true;
  std::string first_failure;
};

/// Verifies, rep by rep: commuting Cartan elements, [e_i,f_j] = delta_ij h_i,
/// the Cartan-matrix eigenvalue relations [h_i,e_j] and [h_i,f_j], and the
/// Serre relations for adjacent and distant root pairs.
ChevalleyReport verify_chevalley(const Algebra& alg);

}  // namespace lieflow
