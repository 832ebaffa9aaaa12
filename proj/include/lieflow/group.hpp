#pragma once
#include <memory>
#include <numeric>
#include <utility>
#include <vector>

#include "lieflow/algebra.hpp"
#include "lieflow/rng.hpp"

namespace lieflow {

/// Names one algebra generator: a simple raising/lowering generator, a Cartan
/// element, or a composite raising/lowering generator spanning roots a..b.
struct GeneratorRef {
  enum class Kind { Raise, Lower, Cartan, CompRaise, CompLower };
  Kind kind = Kind::Raise;
  int a = 0, b = 0;

  static GeneratorRef raise(int i) { return {Kind::Raise, i, i}; }
  static GeneratorRef lower(int i) { return {Kind::Lower, i, i}; }
  static GeneratorRef cartan(int i) { return {Kind::Cartan, i, i}; }
  static GeneratorRef comp_raise(int a, int b) { return {Kind::CompRaise, a, b}; }
  static GeneratorRef comp_lower(int a, int b) { return {Kind::CompLower, a, b}; }
};

/// The generator as an exact matrix in one representation.
inline MatQ generator_matrix(const Algebra& alg, int rep_index, const GeneratorRef& g) {
  switch (g.kind) {
    case GeneratorRef::Kind::Raise:
      return alg.rep(rep_index).xplus(g.a);
    case GeneratorRef::Kind::Lower:
      return alg.rep(rep_index).xminus(g.a);
    case GeneratorRef::Kind::Cartan:
      return alg.rep(rep_index).h(g.a);
    case GeneratorRef::Kind::CompRaise:
      return alg.composite_raise(rep_index, g.a, g.b);
    case GeneratorRef::Kind::CompLower:
      return alg.composite_lower(rep_index, g.a, g.b);
  }
  throw ConstructionError("unknown generator kind");
}

/// exp(t Z) in one representation.  Raising/lowering generators are nilpotent
/// and the series terminates exactly; Cartan exponentials are diagonal and
/// require floating-point scalars.
template <class T>
Mat<T> exp_generator(const Algebra& alg, int rep_index, const GeneratorRef& g, const T& t) {
  const FundamentalRep& r = alg.rep(rep_index);
  if (g.kind == GeneratorRef::Kind::Cartan) {
    if constexpr (std::is_same_v<T, Rational>) {
      throw ConstructionError("Cartan exponentials need floating mode");
    } else {
      VecQ d = r.h_diagonal(g.a);
      Mat<T> out = Mat<T>::Zero(r.dim, r.dim);
      for (int p = 0; p < r.dim; ++p) out(p, p) = std::exp(t * d(p).get_d());
      return out;
    }
  }
  MatQ z = generator_matrix(alg, rep_index, g);
  Mat<T> out = Mat<T>::Identity(r.dim, r.dim);
  MatQ power = z;
  Rational kfact = 1;
  for (int k = 1; !power.isZero(); ++k) {
    kfact *= k;
    T coeff = scalar_cast<T>(Rational(1) / kfact) * pow_int(t, k);
    out += coeff * scalarize<T>(power);
    power = (power * z).eval();
    if (k > r.dim + 1) throw ConstructionError("generator is not nilpotent");
  }
  return out;
}

/// Snapshot of a group element: its matrix in every fundamental
/// representation 0..rank+1.  This is the common currency of all identity and
/// field-extraction code, whether the element came from random sampling or
/// from integrated flows.
template <class T>
struct KPoint {
  std::shared_ptr<const Algebra> alg;
  std::vector<Mat<T>> by_rep;

  const Mat<T>& rep(int j) const {
    if (j < 0 || j >= static_cast<int>(by_rep.size()))
      throw ConstructionError("representation index out of range");
    return by_rep[j];
  }

  /// Principal highest-vector element <j|K|j>; the highest vector is basis
  /// slot 0, so this is just the corner entry.
  T highest(int j) const { return rep(j)(0, 0); }

  static KPoint identity(std::shared_ptr<const Algebra> alg) {
    KPoint out;
    out.alg = std::move(alg);
    for (int j = 0; j <= out.alg->rank() + 1; ++j) {
      int d = out.alg->rep(j).dim;
      out.by_rep.push_back(Mat<T>::Identity(d, d));
    }
    return out;
  }
};

/// A group element as an ordered product of one-generator exponentials.
template <class T>
class GroupElement {
 public:
  explicit GroupElement(std::shared_ptr<const Algebra> alg) : alg_(std::move(alg)) {}

  void right_exp(const GeneratorRef& g, const T& t) { factors_.push_back({g, t}); }

  const Algebra& algebra() const { return *alg_; }

  Mat<T> in_rep(int j) const {
    Mat<T> out = Mat<T>::Identity(alg_->rep(j).dim, alg_->rep(j).dim);
    for (const auto& [g, t] : factors_) out = (out * exp_generator<T>(*alg_, j, g, t)).eval();
    return out;
  }

  KPoint<T> point() const {
    KPoint<T> out;
    out.alg = alg_;
    for (int j = 0; j <= alg_->rank() + 1; ++j) out.by_rep.push_back(in_rep(j));
    return out;
  }

 private:
  std::shared_ptr<const Algebra> alg_;
  std::vector<std::pair<GeneratorRef, T>> factors_;
};

struct SampleOptions {
  bool include_cartan = false;  // floating mode only
  double amplitude = 1.0;
  int passes = 1;  // stacked shuffled products; >1 avoids the thin samples
                   // a single pass tends to produce
};

/// Random group element: a shuffled product of one exponential per raising
/// and per lowering generator (plus Cartan factors on request), coefficients
/// uniform in [-amplitude, amplitude] (small rationals in exact mode).
template <class T>
GroupElement<T> random_group_element(std::shared_ptr<const Algebra> alg, Rng& rng,
                                     const SampleOptions& opt = {}) {
  GroupElement<T> g(alg);
  for (int pass = 0; pass < std::max(1, opt.passes); ++pass) {
    std::vector<GeneratorRef> slots;
    for (int i = 1; i <= alg->rank(); ++i) {
      slots.push_back(GeneratorRef::lower(i));
      slots.push_back(GeneratorRef::raise(i));
      if (opt.include_cartan) slots.push_back(GeneratorRef::cartan(i));
    }
    for (std::size_t i = slots.size(); i > 1; --i) std::swap(slots[i - 1], slots[rng.next() % i]);
    for (const auto& s : slots) {
      T t;
      if constexpr (std::is_same_v<T, Rational>)
        t = rng.rational_pm1();
      else
        t = rng.uniform(-opt.amplitude, opt.amplitude);
      g.right_exp(s, t);
    }
  }
  return g;
}

/// Random sample with every principal highest element nonzero, redrawing
/// degenerate elements.  Exact mode cannot tolerate accidental zeros in
/// denominators, so checks that divide should start from this.
template <class T>
KPoint<T> random_regular_point(std::shared_ptr<const Algebra> alg, Rng& rng,
                               const SampleOptions& opt = {}) {
  for (int attempt = 0; attempt < 256; ++attempt) {
    KPoint<T> k = random_group_element<T>(alg, rng, opt).point();
    bool ok = true;
    for (int j = 0; j <= alg->rank() + 1 && ok; ++j)
      if (k.highest(j) == T(0)) ok = false;
    if (ok) return k;
  }
  throw NumericalBreakdown("could not draw a regular sample");
}

}  // namespace lieflow
