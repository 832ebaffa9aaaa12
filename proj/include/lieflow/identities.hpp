#pragma once
#include <cmath>
#include <functional>
#include <vector>

#include "lieflow/group.hpp"

namespace lieflow {

/// A claimed equality between two scalar expressions of a group element.
template <class T>
struct CheckPair {
  T lhs{};
  T rhs{};

  double rel() const {
    double a = std::abs(to_double_of(lhs));
    double b = std::abs(to_double_of(rhs));
    double scale = std::max({a, b, 1.0});
    return std::abs(to_double_of(lhs) - to_double_of(rhs)) / scale;
  }
  bool exact() const { return lhs == rhs; }

 private:
  static double to_double_of(const T& v) {
    if constexpr (std::is_same_v<T, Rational>)
      return v.get_d();
    else
      return v;
  }
};

template <class T>
T matrix_element(const KPoint<T>& k, int rep_index, const VecQ& bra, const VecQ& ket) {
  Vec<T> b = scalarize_vec<T>(bra);
  Vec<T> q = scalarize_vec<T>(ket);
  return b.dot(k.rep(rep_index) * q);
}

/// 2x2 determinant of highest-vector elements shifted by the simple pair at
/// root j, against the product of neighbouring principal elements.  The
/// exponent of <i|K|i> is 2*delta_ij - K_ji, so the j-th factor drops out.
template <class T>
CheckPair<T> first_jacobi(const KPoint<T>& k, int j) {
  const Algebra& alg = *k.alg;
  const FundamentalRep& r = alg.rep(j);
  Mat<T> g = k.rep(j);
  Mat<T> xp = scalarize<T>(r.xplus(j));
  Mat<T> xm = scalarize<T>(r.xminus(j));
  T a = (xp * g * xm)(0, 0);
  T b = (xp * g)(0, 0);
  T c = (g * xm)(0, 0);
  T d = g(0, 0);
  CheckPair<T> out;
  out.lhs = a * d - b * c;
  out.rhs = T(1);
  for (int i = 1; i <= alg.rank(); ++i) {
    long e = 2 * (i == j ? 1 : 0) - alg.cartan().matrix(j - 1, i - 1);
    if (e == 0) continue;
    out.rhs *= pow_int(k.highest(i), e);
  }
  return out;
}

/// Three-term bilinear identity for an adjacent pair of roots i != j.
/// Returns the sum (which should vanish) and the largest term magnitude for
/// relative scaling.
template <class T>
struct SecondJacobiResult {
  T sum{};
  double scale = 1.0;
  double rel() const {
    double s;
    if constexpr (std::is_same_v<T, Rational>)
      s = sum.get_d();
    else
      s = sum;
    return std::abs(s) / std::max(scale, 1.0);
  }
  bool exact() const { return sum == T(0); }
};

template <class T>
SecondJacobiResult<T> second_jacobi(const KPoint<T>& k, int i, int j) {
  const Algebra& alg = *k.alg;
  auto shifted = [&](int rep, int first, int second) -> T {
    const FundamentalRep& r = alg.rep(rep);
    Mat<T> m = scalarize<T>(r.xplus(first)) * scalarize<T>(r.xplus(second)) * k.rep(rep);
    return m(0, 0) / k.highest(rep);
  };
  auto single = [&](int rep) -> T {
    const FundamentalRep& r = alg.rep(rep);
    Mat<T> m = scalarize<T>(r.xplus(rep)) * k.rep(rep);
    return m(0, 0) / k.highest(rep);
  };
  long kij = alg.cartan().matrix(i - 1, j - 1);
  long kji = alg.cartan().matrix(j - 1, i - 1);
  T t1 = T(kij) * shifted(j, j, i);
  T t2 = T(kji) * shifted(i, i, j);
  T t3 = T(kij * kji) * single(j) * single(i);
  SecondJacobiResult<T> out;
  out.sum = t1 + t2 + t3;
  auto mag = [](const T& v) {
    if constexpr (std::is_same_v<T, Rational>)
      return std::abs(v.get_d());
    else
      return std::abs(v);
  };
  out.scale = std::max({mag(t1), mag(t2), mag(t3), 1.0});
  return out;
}

/// Matrix of elements <bra_p | K | ket_q> in one representation.
template <class T>
Mat<T> gram_matrix(const KPoint<T>& k, int rep_index, const std::vector<VecQ>& bras,
                   const std::vector<VecQ>& kets) {
  Mat<T> out(bras.size(), kets.size());
  const Mat<T>& g = k.rep(rep_index);
  for (std::size_t p = 0; p < bras.size(); ++p) {
    Vec<T> row = (scalarize_vec<T>(bras[p]).transpose() * g).transpose();
    for (std::size_t q = 0; q < kets.size(); ++q) out(p, q) = row.dot(scalarize_vec<T>(kets[q]));
  }
  return out;
}

/// Sum of the weights of the first s vectors of an ordered basis.
inline std::vector<long> weight_prefix_sum(const FundamentalRep& rep,
                                           const std::vector<VecQ>& vectors, int s) {
  std::vector<long> acc(rep.rank, 0);
  for (int p = 0; p < s; ++p) {
    std::vector<int> w = rep.weight_of_vector(vectors[p]);
    for (int i = 0; i < rep.rank; ++i) acc[i] += w[i];
  }
  return acc;
}

/// Leading s x s principal minor of the gram matrix over an ordered basis
/// closed under lowering, against C * prod_i <i|K|i>^{l_i} where l is the
/// prefix weight sum and C is the minor evaluated at the identity.
template <class T>
CheckPair<T> minor_check(const KPoint<T>& k, int rep_index, const std::vector<VecQ>& basis,
                         int s) {
  const FundamentalRep& rep = k.alg->rep(rep_index);
  std::vector<VecQ> prefix(basis.begin(), basis.begin() + s);
  CheckPair<T> out;
  out.lhs = determinant<T>(gram_matrix<T>(k, rep_index, prefix, prefix));
  MatQ id_gram(s, s);
  for (int p = 0; p < s; ++p)
    for (int q = 0; q < s; ++q) id_gram(p, q) = prefix[p].dot(prefix[q]);
  Rational c = determinant<Rational>(id_gram);
  std::vector<long> l = weight_prefix_sum(rep, prefix, s);
  out.rhs = scalar_cast<T>(c);
  for (int i = 1; i <= k.alg->rank(); ++i)
    if (l[i - 1] != 0) out.rhs *= pow_int(k.highest(i), l[i - 1]);
  return out;
}

enum class ShiftSide { Left, Right };

/// Multiply every representation matrix of a point by exp(t Z) on one side.
template <class T>
KPoint<T> shift_point(const KPoint<T>& k, const GeneratorRef& g, const T& t, ShiftSide side) {
  KPoint<T> out;
  out.alg = k.alg;
  out.by_rep.reserve(k.by_rep.size());
  for (int j = 0; j < static_cast<int>(k.by_rep.size()); ++j) {
    Mat<T> e = exp_generator<T>(*k.alg, j, g, t);
    out.by_rep.push_back(side == ShiftSide::Left ? Mat<T>((e * k.by_rep[j]).eval())
                                                 : Mat<T>((k.by_rep[j] * e).eval()));
  }
  return out;
}

/// Exact directional derivative at t=0 of det(prefix gram) under a one-sided
/// shift K -> exp(tZ) K (or K exp(tZ)): the sum over rows (columns) of the
/// determinant with that row (column) shifted by Z.
template <class T>
T minor_shift_derivative(const KPoint<T>& k, int rep_index, const std::vector<VecQ>& bras,
                         const std::vector<VecQ>& kets, const GeneratorRef& g, ShiftSide side) {
  Mat<T> base = gram_matrix<T>(k, rep_index, bras, kets);
  Mat<T> z = scalarize<T>(generator_matrix(*k.alg, rep_index, g));
  const Mat<T>& gk = k.rep(rep_index);
  T acc(0);
  int nsize = static_cast<int>(bras.size());
  for (int p = 0; p < nsize; ++p) {
    Mat<T> mod = base;
    for (int q = 0; q < nsize; ++q) {
      Vec<T> b = scalarize_vec<T>(bras[side == ShiftSide::Left ? p : q]);
      Vec<T> c = scalarize_vec<T>(kets[side == ShiftSide::Left ? q : p]);
      T entry = side == ShiftSide::Left ? T(b.dot(z * (gk * c))) : T(b.dot(gk * (z * c)));
      if (side == ShiftSide::Left)
        mod(p, q) = entry;
      else
        mod(q, p) = entry;
    }
    acc += determinant<T>(mod);
  }
  return acc;
}

struct FactorizationOptions {
  int degree_bound = 12;    // exact mode: polynomial degree cap for constancy checks
  double fd_step = 1e-6;    // floating mode: step for derivative probes
  double tol = 1e-7;
  bool verify = true;
};

/// For a scalar function of K annihilated by left-lowering and right-raising
/// shifts, with shift weights l: returns C = fn(identity) and checks that
/// fn(K) = C * prod <i|K|i>^{l_i} at the given sample.  Throws if the
/// function fails the annihilation probes.
template <class T>
T factorization_constant(const std::function<T(const KPoint<T>&)>& fn,
                         std::shared_ptr<const Algebra> alg, const KPoint<T>& sample,
                         const std::vector<long>& weights, const FactorizationOptions& opt = {}) {
  T c = fn(KPoint<T>::identity(alg));
  if (!opt.verify) return c;
  auto probe = [&](const GeneratorRef& g, ShiftSide side) {
    T f0 = fn(sample);
    if constexpr (std::is_same_v<T, Rational>) {
      for (int t = 1; t <= opt.degree_bound + 1; ++t) {
        T ft = fn(shift_point<T>(sample, g, T(t), side));
        if (ft != f0) throw ConstructionError("function is not invariant under highest shifts");
      }
    } else {
      T ft = fn(shift_point<T>(sample, g, T(opt.fd_step), side));
      double scale = std::max(std::abs(f0), 1.0);
      if (std::abs(ft - f0) / (opt.fd_step * scale) > opt.tol * 1e3)
        throw ConstructionError("function is not invariant under highest shifts");
    }
  };
  for (int i = 1; i <= alg->rank(); ++i) {
    probe(GeneratorRef::lower(i), ShiftSide::Left);
    probe(GeneratorRef::raise(i), ShiftSide::Right);
  }
  T predicted = c;
  for (int i = 1; i <= alg->rank(); ++i) predicted *= pow_int(sample.highest(i), weights[i - 1]);
  CheckPair<T> pair{fn(sample), predicted};
  if constexpr (std::is_same_v<T, Rational>) {
    if (!pair.exact()) throw ConstructionError("factorization constant mismatch");
  } else {
    if (pair.rel() > opt.tol) throw ConstructionError("factorization constant mismatch");
  }
  return c;
}

/// Normalized highest elements shifted by chains of simple raising operators:
/// chain {i1,...,ip} gives <i1| X+_{i1} ... X+_{ip} K |i1> / <i1|K|i1>.
/// The list reads outward from the bra, so the first index fixes the
/// representation and must match it for a nonzero value.
template <class T>
T raising_chain(const KPoint<T>& k, const std::vector<int>& idx) {
  const FundamentalRep& r = k.alg->rep(idx.front());
  Mat<T> m = k.rep(idx.front());
  for (auto it = idx.rbegin(); it != idx.rend(); ++it) m = (scalarize<T>(r.xplus(*it)) * m).eval();
  return m(0, 0) / k.highest(idx.front());
}

/// Mirror chains on the lowering side: <i1| K X-_{ip} ... X-_{i1} |i1> / <i1|K|i1>.
template <class T>
T lowering_chain(const KPoint<T>& k, const std::vector<int>& idx) {
  const FundamentalRep& r = k.alg->rep(idx.front());
  Mat<T> m = k.rep(idx.front());
  for (auto it = idx.rbegin(); it != idx.rend(); ++it) m = (m * scalarize<T>(r.xminus(*it))).eval();
  return m(0, 0) / k.highest(idx.front());
}

inline std::vector<int> chain_range(int from, int to) {
  std::vector<int> out;
  if (from <= to)
    for (int i = from; i <= to; ++i) out.push_back(i);
  else
    for (int i = from; i >= to; --i) out.push_back(i);
  return out;
}

/// Reversal recursion for ascending raising chains m..m+k: the descending
/// chain enters with sign (-1)^k and the cross terms split the chain at every
/// interior point.
template <class T>
CheckPair<T> chain_reversal_check(const KPoint<T>& k, int m, int kk) {
  CheckPair<T> out;
  out.lhs = raising_chain<T>(k, chain_range(m, m + kk));
  T lead = (kk % 2 == 0) ? T(1) : T(-1);
  out.rhs = lead * raising_chain<T>(k, chain_range(m + kk, m));
  for (int s = 1; s <= kk; ++s) {
    T sign = (s % 2 == 1) ? T(1) : T(-1);
    out.rhs += sign * raising_chain<T>(k, chain_range(m + s, m + kk)) *
               raising_chain<T>(k, chain_range(m + s - 1, m));
  }
  return out;
}

/// Quadratic sum identity tying chains to the gram matrix over the lowering
/// chain basis rooted at representation m with k steps.  Each diagonal term
/// pairs a chain with its conjugate in the segment's lower representation;
/// the vectors of the quadratic form are descending chains seen from the
/// segment's upper representation.
template <class T>
CheckPair<T> chain_sum_check(const KPoint<T>& k, int m, int kk) {
  CheckPair<T> out;
  out.lhs = T(0);
  for (int s = 0; s <= kk; ++s) {
    T ratio = k.highest(m + s) / k.highest(m + s - 1);
    out.lhs += ratio * raising_chain<T>(k, chain_range(m + s, m + kk)) *
               lowering_chain<T>(k, chain_range(m + s, m + kk));
  }
  RedBlock block{m, kk};
  const FundamentalRep& rep = k.alg->rep(m);
  std::vector<VecQ> basis = red_basis(rep, block, ChainEnd::FromStart);
  Mat<T> u = gram_matrix<T>(k, m, basis, basis);
  Vec<T> abar(kk + 1), alow(kk + 1);
  for (int s = 1; s <= kk + 1; ++s) {
    T sign = (s % 2 == 1) ? T(1) : T(-1);
    abar(s - 1) = sign * raising_chain<T>(k, chain_range(m + kk, m + s - 1));
    alow(s - 1) = sign * lowering_chain<T>(k, chain_range(m + kk, m + s - 1));
  }
  out.rhs = abar.dot(u * alow) / k.highest(m - 1);
  return out;
}

}  // namespace lieflow
