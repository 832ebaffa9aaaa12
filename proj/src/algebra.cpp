#include "lieflow/algebra.hpp"

#include <map>

namespace lieflow {

Algebra::Algebra(int rank) : rank_(rank), cartan_(cartan_an(rank)) {
  reps_.reserve(rank + 2);
  for (int j = 0; j <= rank + 1; ++j) reps_.push_back(build_fundamental_rep(rank, j));
  raise_cache_.resize(rank + 2);
  raise_ready_.resize(rank + 2);
  const int keys = (rank + 2) * (rank + 2);
  for (int j = 0; j <= rank + 1; ++j) {
    raise_cache_[j].resize(keys);
    raise_ready_[j].assign(keys, false);
  }
}

const FundamentalRep& Algebra::rep(int j) const {
  if (j < 0 || j > rank_ + 1)
    throw ConstructionError("representation index " + std::to_string(j) + " outside 0.." +
                            std::to_string(rank_ + 1));
  return reps_[j];
}

const MatQ& Algebra::composite_raise(int rep_index, int a, int b) const {
  const FundamentalRep& r = rep(rep_index);
  if (a < 1 || b > rank_ || a > b + 1 || b < 0 || a > rank_ + 1)
    throw ConstructionError("no composite generator for roots " + std::to_string(a) + ".." +
                            std::to_string(b));
  const int key = a * (rank_ + 2) + (b + 1);
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (raise_ready_[rep_index][key]) return raise_cache_[rep_index][key];
  }
  MatQ value;
  if (a == b + 1)
    value = MatQ::Identity(r.dim, r.dim);
  else if (a == b)
    value = r.xplus(a);
  else
    value = commutator<Rational>(r.xplus(a), composite_raise(rep_index, a + 1, b));
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto& slot = raise_cache_[rep_index][key];
  if (!raise_ready_[rep_index][key]) {
    slot = std::move(value);
    raise_ready_[rep_index][key] = true;
  }
  return slot;
}

MatQ Algebra::composite_lower(int rep_index, int a, int b) const {
  return composite_raise(rep_index, a, b).transpose();
}

VecQ Algebra::grading_diagonal(int rep_index, const VecQ& w) const {
  const FundamentalRep& r = rep(rep_index);
  VecQ d = VecQ::Zero(r.dim);
  for (int i = 1; i <= rank_; ++i) d += w(i - 1) * r.h_diagonal(i);
  return d;
}

ChevalleyReport verify_chevalley(const Algebra& alg) {
  ChevalleyReport out;
  const int n = alg.rank();
  auto record = [&](bool ok, const std::string& what) {
    ++out.relations_checked;
    if (!ok && out.ok) {
      out.ok = false;
      out.first_failure = what;
    }
  };
  for (int j = 0; j <= n + 1; ++j) {
    const FundamentalRep& r = alg.rep(j);
    std::string tag = " in rep " + std::to_string(j);
    for (int a = 1; a <= n; ++a) {
      MatQ ha = r.h(a);
      for (int b = 1; b <= n; ++b) {
        MatQ hb = r.h(b);
        long cab = alg.cartan().matrix(b - 1, a - 1);
        record(commutator<Rational>(ha, hb).isZero(),
               "[h,h] at " + std::to_string(a) + "," + std::to_string(b) + tag);
        MatQ ef = commutator<Rational>(r.xplus(a), r.xminus(b));
        record(a == b ? ef == ha : ef.isZero(),
               "[e,f] at " + std::to_string(a) + "," + std::to_string(b) + tag);
        record(commutator<Rational>(ha, r.xplus(b)) == Rational(cab) * r.xplus(b),
               "[h,e] at " + std::to_string(a) + "," + std::to_string(b) + tag);
        record(commutator<Rational>(ha, r.xminus(b)) == Rational(-cab) * r.xminus(b),
               "[h,f] at " + std::to_string(a) + "," + std::to_string(b) + tag);
        if (a == b) continue;
        MatQ se = std::abs(a - b) == 1
                      ? commutator<Rational>(r.xplus(a),
                                             commutator<Rational>(r.xplus(a), r.xplus(b)))
                      : commutator<Rational>(r.xplus(a), r.xplus(b));
        MatQ sf = std::abs(a - b) == 1
                      ? commutator<Rational>(r.xminus(a),
                                             commutator<Rational>(r.xminus(a), r.xminus(b)))
                      : commutator<Rational>(r.xminus(a), r.xminus(b));
        record(se.isZero(), "Serre raise at " + std::to_string(a) + "," + std::to_string(b) + tag);
        record(sf.isZero(), "Serre lower at " + std::to_string(a) + "," + std::to_string(b) + tag);
      }
    }
  }
  return out;
}

std::shared_ptr<const Algebra> get_algebra(int rank) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const Algebra>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(rank);
  if (it != cache.end()) return it->second;
  auto made = std::make_shared<const Algebra>(rank);
  cache[rank] = made;
  return made;
}

}  // namespace lieflow
