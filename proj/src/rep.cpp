#include "lieflow/rep.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace lieflow {
namespace {

std::vector<std::vector<int>> lex_subsets(int n_plus_1, int j) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  // iterative lexicographic enumeration of j-subsets of {1..n_plus_1}
  std::function<void(int)> rec = [&](int from) {
    if (static_cast<int>(cur.size()) == j) {
      out.push_back(cur);
      return;
    }
    int need = j - static_cast<int>(cur.size());
    for (int v = from; v <= n_plus_1 - need + 1; ++v) {
      cur.push_back(v);
      rec(v + 1);
      cur.pop_back();
    }
  };
  rec(1);
  return out;
}

/// Derivation action of the elementary matrix E_{ab} on the wedge basis.
MatQ elementary_action(const std::vector<std::vector<int>>& subsets,
                       const std::map<std::vector<int>, int>& position, int a, int b) {
  const int dim = static_cast<int>(subsets.size());
  MatQ out = MatQ::Zero(dim, dim);
  for (int col = 0; col < dim; ++col) {
    const auto& s = subsets[col];
    if (a == b) {
      if (std::binary_search(s.begin(), s.end(), a)) out(col, col) += 1;
      continue;
    }
    if (!std::binary_search(s.begin(), s.end(), b)) continue;
    if (std::binary_search(s.begin(), s.end(), a)) continue;
    std::vector<int> t;
    t.reserve(s.size());
    for (int v : s)
      if (v != b) t.push_back(v);
    int between = 0;  // members strictly between a and b fix the reordering sign
    for (int v : t)
      if (v > std::min(a, b) && v < std::max(a, b)) ++between;
    t.push_back(a);
    std::sort(t.begin(), t.end());
    int row = position.at(t);
    out(row, col) += (between % 2 == 0) ? 1 : -1;
  }
  return out;
}

}  // namespace

FundamentalRep build_fundamental_rep(int rank, int index) {
  if (rank < 1) throw ConstructionError("rank must be at least 1");
  if (index < 0 || index > rank + 1)
    throw ConstructionError("fundamental representation index " + std::to_string(index) +
                            " outside 0.." + std::to_string(rank + 1));
  FundamentalRep rep;
  rep.rank = rank;
  rep.index = index;
  rep.subsets = lex_subsets(rank + 1, index);
  rep.dim = static_cast<int>(rep.subsets.size());
  std::map<std::vector<int>, int> position;
  for (int p = 0; p < rep.dim; ++p) position[rep.subsets[p]] = p;

  rep.raise_by_root.reserve(rank);
  rep.lower_by_root.reserve(rank);
  rep.cartan_diag.reserve(rank);
  for (int i = 1; i <= rank; ++i) {
    rep.raise_by_root.push_back(elementary_action(rep.subsets, position, i, i + 1));
    rep.lower_by_root.push_back(elementary_action(rep.subsets, position, i + 1, i));
    VecQ d(rep.dim);
    for (int p = 0; p < rep.dim; ++p) {
      const auto& s = rep.subsets[p];
      int v = (std::binary_search(s.begin(), s.end(), i) ? 1 : 0) -
              (std::binary_search(s.begin(), s.end(), i + 1) ? 1 : 0);
      d(p) = v;
    }
    rep.cartan_diag.push_back(d);
  }
  return rep;
}

const MatQ& FundamentalRep::xplus(int i) const {
  if (i < 1 || i > rank) throw ConstructionError("root index out of range");
  return raise_by_root[i - 1];
}

const MatQ& FundamentalRep::xminus(int i) const {
  if (i < 1 || i > rank) throw ConstructionError("root index out of range");
  return lower_by_root[i - 1];
}

MatQ FundamentalRep::h(int i) const {
  if (i < 1 || i > rank) throw ConstructionError("root index out of range");
  MatQ out = MatQ::Zero(dim, dim);
  for (int p = 0; p < dim; ++p) out(p, p) = cartan_diag[i - 1](p);
  return out;
}

VecQ FundamentalRep::h_diagonal(int i) const {
  if (i < 1 || i > rank) throw ConstructionError("root index out of range");
  return cartan_diag[i - 1];
}

VecQ FundamentalRep::highest_vector() const {
  VecQ v = VecQ::Zero(dim);
  v(0) = 1;
  return v;
}

std::vector<int> FundamentalRep::weight_of_basis(int pos) const {
  std::vector<int> w(rank);
  for (int i = 0; i < rank; ++i) w[i] = static_cast<int>(cartan_diag[i](pos).get_d());
  return w;
}

std::vector<int> FundamentalRep::weight_of_vector(const VecQ& v) const {
  int support = -1;
  for (int p = 0; p < dim; ++p) {
    if (v(p) == 0) continue;
    if (support >= 0) throw ConstructionError("vector is not a single weight direction");
    support = p;
  }
  if (support < 0) throw ConstructionError("zero vector has no weight");
  return weight_of_basis(support);
}

std::vector<VecQ> red_basis(const FundamentalRep& rep, const RedBlock& block, ChainEnd end) {
  const int expect = (end == ChainEnd::FromStart) ? block.m : block.mbar();
  if (rep.index != expect)
    throw ConstructionError("red basis requested in representation " + std::to_string(rep.index) +
                            ", block expects " + std::to_string(expect));
  std::vector<VecQ> out;
  out.push_back(rep.highest_vector());
  for (int k = 1; k <= block.R; ++k) {
    int root = (end == ChainEnd::FromStart) ? block.m + k - 1 : block.mbar() - k + 1;
    VecQ next = rep.xminus(root) * out.back();
    if (next.isZero()) throw ConstructionError("lowering chain collapsed; block does not fit rep");
    out.push_back(next);
  }
  return out;
}

}  // namespace lieflow
