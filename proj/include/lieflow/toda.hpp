#pragma once
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "lieflow/flows.hpp"
#include "lieflow/identities.hpp"

namespace lieflow {

/// Chain bases and block fields of one site decomposition.  All extraction is
/// done from a group element snapshot; the same code serves exact and
/// floating evaluation.
template <class T>
class FieldExtractor {
 public:
  FieldExtractor(std::shared_ptr<const Algebra> alg, SiteLattice lattice)
      : alg_(std::move(alg)), lattice_(std::move(lattice)) {
    for (int s = 0; s < lattice_.size(); ++s) {
      const RedBlock& blk = lattice_.site(s);
      sv_start_.push_back(red_basis(alg_->rep(blk.m), blk, ChainEnd::FromStart));
      sv_end_.push_back(red_basis(alg_->rep(blk.mbar()), blk, ChainEnd::FromEnd));
    }
    // Grid scans evaluate correction blocks at every point; scalarize their
    // composite generators once instead of per call.  The cache is complete
    // after construction, so lookups are safe under concurrent use.
    for (int i = 0; i < lattice_.size(); ++i)
      for (int j = 0; j < i; ++j)
        for (int ref : {lattice_.site(i).m - 1, lattice_.site(j).black_after()})
          for (int alpha = 1; alpha <= lattice_.site(i).R + 1; ++alpha)
            for (int beta = 1; beta <= lattice_.site(j).R + 1; ++beta) {
              int a = lattice_.site(j).m + beta - 1, b = lattice_.site(i).m + alpha - 2;
              comp_cache_[{ref, a, b, true}] =
                  scalarize<T>(alg_->composite_raise(ref, a, b));
              comp_cache_[{ref, a, b, false}] =
                  scalarize<T>(alg_->composite_lower(ref, a, b));
            }
  }

  const Algebra& algebra() const { return *alg_; }
  const SiteLattice& lattice() const { return lattice_; }
  int sites() const { return lattice_.size(); }
  const std::vector<VecQ>& start_basis(int site) const { return sv_start_[site]; }
  const std::vector<VecQ>& end_basis(int site) const { return sv_end_[site]; }

  /// Gram matrix over the start-side chain basis, in representation m_i.
  Mat<T> u_start(const KPoint<T>& k, int site) const {
    return gram_matrix<T>(k, lattice_.site(site).m, sv_start_[site], sv_start_[site]);
  }

  /// Gram matrix over the end-side chain basis, in representation mbar_i.
  Mat<T> u_end(const KPoint<T>& k, int site) const {
    return gram_matrix<T>(k, lattice_.site(site).mbar(), sv_end_[site], sv_end_[site]);
  }

  /// Block field y_i = u_start / <m_i - 1>.
  Mat<T> y_field(const KPoint<T>& k, int site) const {
    return u_start(k, site) / k.highest(lattice_.site(site).m - 1);
  }

  /// Mirror block field z_i = u_end / <b_i>.
  Mat<T> z_field(const KPoint<T>& k, int site) const {
    return u_end(k, site) / k.highest(lattice_.site(site).black_after());
  }

  /// Raising-side correction block, reference vector at the black root below
  /// site i; identity when j = i.
  Mat<T> abar_corr(const KPoint<T>& k, int i, int j) const {
    return raising_corr(k, i, j, lattice_.site(i).m - 1);
  }

  /// Raising-side correction block, reference vector at the black root above
  /// site j; identity when j = i.
  Mat<T> bbar_corr(const KPoint<T>& k, int i, int j) const {
    return raising_corr(k, i, j, lattice_.site(j).black_after());
  }

  /// Transpose-side partners of the two raising corrections.
  Mat<T> a_corr(const KPoint<T>& k, int j, int i) const {
    return lowering_corr(k, i, j, lattice_.site(i).m - 1);
  }
  Mat<T> b_corr(const KPoint<T>& k, int a, int b) const {
    return lowering_corr(k, b, a, lattice_.site(a).black_after());
  }

 private:
  // Common core: rows indexed by slots of site i, columns by slots of site j
  // (j <= i), composite roots spanning m_j+beta-1 .. m_i+alpha-2, all matrix
  // elements taken on the highest vector of ref_rep.
  Mat<T> raising_corr(const KPoint<T>& k, int i, int j, int ref_rep) const {
    if (j > i) throw ConstructionError("correction block needs source site below target");
    int rows = lattice_.site(i).R + 1, cols = lattice_.site(j).R + 1;
    if (j == i) return Mat<T>::Identity(rows, cols);
    Mat<T> out(rows, cols);
    const Mat<T>& g = k.rep(ref_rep);
    T denom = k.highest(ref_rep);
    for (int alpha = 1; alpha <= rows; ++alpha)
      for (int beta = 1; beta <= cols; ++beta) {
        const Mat<T>& root = comp_cache_.at(
            {ref_rep, lattice_.site(j).m + beta - 1, lattice_.site(i).m + alpha - 2, true});
        out(alpha - 1, beta - 1) = root.row(0).dot(g.col(0)) / denom;
      }
    return out;
  }

  Mat<T> lowering_corr(const KPoint<T>& k, int i, int j, int ref_rep) const {
    if (j > i) throw ConstructionError("correction block needs source site below target");
    int rows = lattice_.site(j).R + 1, cols = lattice_.site(i).R + 1;
    if (j == i) return Mat<T>::Identity(rows, cols);
    Mat<T> out(rows, cols);
    const Mat<T>& g = k.rep(ref_rep);
    T denom = k.highest(ref_rep);
    for (int beta = 1; beta <= rows; ++beta)
      for (int alpha = 1; alpha <= cols; ++alpha) {
        const Mat<T>& root = comp_cache_.at(
            {ref_rep, lattice_.site(j).m + beta - 1, lattice_.site(i).m + alpha - 2, false});
        out(beta - 1, alpha - 1) = g.row(0).dot(root.col(0)) / denom;
      }
    return out;
  }

  std::shared_ptr<const Algebra> alg_;
  SiteLattice lattice_;
  std::vector<std::vector<VecQ>> sv_start_, sv_end_;
  std::map<std::tuple<int, int, int, bool>, Mat<T>> comp_cache_;
};

/// All per-point data the lattice equations refer to.
template <class T>
struct PointFields {
  std::vector<Mat<T>> y;                          // per site
  std::map<std::pair<int, int>, Mat<T>> pibar;    // dressed raising coefficients (k,i)
  std::map<std::pair<int, int>, Mat<T>> pi;       // dressed lowering coefficients (k,i)
  std::map<std::pair<int, int>, Mat<T>> abar;     // adjacent raising corrections (i+1,i)
  std::map<std::pair<int, int>, Mat<T>> alow;     // adjacent lowering corrections (i,i+1)
};

/// Dress the evaluated ladder coefficient blocks with the correction
/// matrices.  The top grade stays undressed; terms whose site indices leave
/// the lattice are dropped.
template <class T>
void dress_coefficients(const FieldExtractor<T>& ex, const KPoint<T>& k,
                        const std::map<std::pair<int, int>, Mat<T>>& pbar_eval,
                        const std::map<std::pair<int, int>, Mat<T>>& p_eval, int max_grade,
                        std::map<std::pair<int, int>, Mat<T>>& pibar_out,
                        std::map<std::pair<int, int>, Mat<T>>& pi_out) {
  int bmax = ex.lattice().size() - 1;
  for (int kk = 1; kk <= max_grade; ++kk)
    for (int i = 0; i + kk <= bmax; ++i) {
      Mat<T> dbar = pbar_eval.at({kk, i});
      Mat<T> dlow = p_eval.at({kk, i});
      for (int s = kk + 1; s <= max_grade; ++s)
        for (int t = 0; t <= s - kk; ++t) {
          if (i - t < 0 || i + s - t > bmax) continue;
          T sign = (t % 2 == 0) ? T(1) : T(-1);
          dbar += sign * (ex.abar_corr(k, i, i - t) * pbar_eval.at({s, i - t}) *
                          ex.bbar_corr(k, i + s - t, i + kk));
          dlow += sign * (ex.b_corr(k, i + kk, i + s - t) * p_eval.at({s, i - t}) *
                          ex.a_corr(k, i - t, i));
        }
      pibar_out[{kk, i}] = std::move(dbar);
      pi_out[{kk, i}] = std::move(dlow);
    }
}

/// Evaluate every field the lattice equations use at one point.
template <class T>
PointFields<T> point_fields(const FieldExtractor<T>& ex, const KPoint<T>& k,
                            const CoefficientSet<T>& coeffs, const T& x, const T& y) {
  PointFields<T> out;
  int bmax = ex.lattice().size() - 1;
  for (int s = 0; s <= bmax; ++s) out.y.push_back(ex.y_field(k, s));
  std::map<std::pair<int, int>, Mat<T>> pbar_eval, p_eval;
  for (const auto& [key, pm] : coeffs.pbar) pbar_eval[key] = pm.eval(y);
  for (const auto& [key, pm] : coeffs.p) p_eval[key] = pm.eval(x);
  dress_coefficients<T>(ex, k, pbar_eval, p_eval, coeffs.max_grade, out.pibar, out.pi);
  for (int i = 0; i + 1 <= bmax; ++i) {
    out.abar[{i + 1, i}] = ex.abar_corr(k, i + 1, i);
    out.alow[{i, i + 1}] = ex.a_corr(k, i, i + 1);
  }
  return out;
}

/// Right side of the second-order lattice equation for site i: the bracketed
/// part of d/dy(y_i^-1 d/dx y_i) = y_i^-1 sum pibar y pi - sum pi y^-1 pibar y_i.
template <class T>
Mat<T> toda_rhs(const PointFields<T>& f, int max_grade, int i) {
  int bmax = static_cast<int>(f.y.size()) - 1;
  int dim = static_cast<int>(f.y[i].rows());
  Mat<T> out = Mat<T>::Zero(dim, dim);
  Mat<T> yinv = inverse<T>(f.y[i]);
  for (int r = 1; r <= max_grade; ++r) {
    if (i + r <= bmax)
      out += yinv * f.pibar.at({r, i}) * f.y[i + r] * f.pi.at({r, i});
    if (i - r >= 0)
      out -= f.pi.at({r, i - r}) * inverse<T>(f.y[i - r]) * f.pibar.at({r, i - r}) * f.y[i];
  }
  return out;
}

/// Pinned orientation of the x-flow of the dressed raising coefficients:
/// d/dx pibar^{r,i} = sum_q (pibar^{q+r,i} y_{i+q+r} pi^{q,i+r} y_{i+r}^-1
///                          - y_i pi^{q,i-q} y_{i-q}^-1 pibar^{q+r,i-q}).
template <class T>
Mat<T> pibar_x_rhs(const PointFields<T>& f, int max_grade, int r, int i) {
  int bmax = static_cast<int>(f.y.size()) - 1;
  Mat<T> out = Mat<T>::Zero(f.y[i].rows(), f.y[i + r].rows());
  for (int q = 1; q <= max_grade - r; ++q) {
    if (i + q + r <= bmax)
      out += f.pibar.at({q + r, i}) * f.y[i + q + r] * f.pi.at({q, i + r}) *
             inverse<T>(f.y[i + r]);
    if (i - q >= 0)
      out -= f.y[i] * f.pi.at({q, i - q}) * inverse<T>(f.y[i - q]) * f.pibar.at({q + r, i - q});
  }
  return out;
}

/// y-flow of the dressed lowering coefficients:
/// d/dy pi^{r,i} = sum_q (y_{i+r}^-1 pibar^{q,i+r} y_{i+q+r} pi^{q+r,i}
///                        - pi^{q+r,i-q} y_{i-q}^-1 pibar^{q,i-q} y_i).
template <class T>
Mat<T> pi_y_rhs(const PointFields<T>& f, int max_grade, int r, int i) {
  int bmax = static_cast<int>(f.y.size()) - 1;
  Mat<T> out = Mat<T>::Zero(f.y[i + r].rows(), f.y[i].rows());
  for (int q = 1; q <= max_grade - r; ++q) {
    if (i + q + r <= bmax)
      out += inverse<T>(f.y[i + r]) * f.pibar.at({q, i + r}) * f.y[i + q + r] *
             f.pi.at({q + r, i});
    if (i - q >= 0)
      out -= f.pi.at({q + r, i - q}) * inverse<T>(f.y[i - q]) * f.pibar.at({q, i - q}) * f.y[i];
  }
  return out;
}

/// Flows of the adjacent correction blocks:
/// d/dx abar^{i+1,i} = y_{i+1} pi^{1,i} y_i^-1 and
/// d/dy a^{i,i+1} = y_i^-1 pibar^{1,i} y_{i+1}.
template <class T>
Mat<T> abar_x_rhs(const PointFields<T>& f, int i) {
  return f.y[i + 1] * f.pi.at({1, i}) * inverse<T>(f.y[i]);
}
template <class T>
Mat<T> alow_y_rhs(const PointFields<T>& f, int i) {
  return inverse<T>(f.y[i]) * f.pibar.at({1, i}) * f.y[i + 1];
}

/// Antidiagonal sign conjugator tying a block field to its mirror:
/// y_i^-1 = t z_i^T t^-1 with t_{p, R-p} = (-1)^p.
inline MatQ antidiagonal_conjugator(int R) {
  MatQ t = MatQ::Zero(R + 1, R + 1);
  for (int p = 0; p <= R; ++p) t(p, R - p) = (p % 2 == 0) ? 1 : -1;
  return t;
}

template <class T>
struct MatrixCheck {
  Mat<T> lhs, rhs;
  double rel() const {
    Mat<T> d = lhs - rhs;
    double scale = std::max({abs_max(lhs), abs_max(rhs), 1.0});
    return abs_max(d) / scale;
  }
  bool exact() const { return lhs == rhs; }
};

/// y_i^-1 against the sign-conjugated transpose of z_i.
template <class T>
MatrixCheck<T> inverse_transpose_check(const FieldExtractor<T>& ex, const KPoint<T>& k,
                                       int site) {
  MatrixCheck<T> out;
  out.lhs = inverse<T>(ex.y_field(k, site));
  Mat<T> t = scalarize<T>(antidiagonal_conjugator(ex.lattice().site(site).R));
  out.rhs = t * ex.z_field(k, site).transpose() * inverse<T>(t);
  return out;
}

// ---------------------------------------------------------------------------
// Extension vectors and bordered determinants.
//
// All of these work on a pseudo block {m, R} (consecutive red roots m..m+R-1
// between black roots m-1 and b = m+R); they are identities of an arbitrary
// group element and do not need the block to come from a grading.

inline VecQ subset_vector(const FundamentalRep& rep, std::vector<int> members) {
  std::sort(members.begin(), members.end());
  for (int p = 0; p < rep.dim; ++p)
    if (rep.subsets[p] == members) {
      VecQ v = VecQ::Zero(rep.dim);
      v(p) = 1;
      return v;
    }
  throw ConstructionError("subset is not a basis label of this representation");
}

/// {1..m-1, b+1}: the chain basis continued through the black root.
inline VecQ forward_vector(const FundamentalRep& rep, int m, int R) {
  std::vector<int> s;
  for (int i = 1; i < m; ++i) s.push_back(i);
  s.push_back(m + R + 1);
  return subset_vector(rep, s);
}

/// {1..m-2, m, m+1}: the chain basis pushed backwards through the black root
/// below.
inline VecQ backward_vector(const FundamentalRep& rep, int m) {
  std::vector<int> s;
  for (int i = 1; i + 1 < m; ++i) s.push_back(i);
  s.push_back(m);
  s.push_back(m + 1);
  return subset_vector(rep, s);
}

/// {1..m-2, m, b+1}: both ends moved at once.
inline VecQ spanning_vector(const FundamentalRep& rep, int m, int R) {
  std::vector<int> s;
  for (int i = 1; i + 1 < m; ++i) s.push_back(i);
  s.push_back(m);
  s.push_back(m + R + 1);
  return subset_vector(rep, s);
}

enum class Extension { Forward, Backward, Spanning };

template <class T>
Mat<T> extended_gram(const FieldExtractor<T>& ex, const KPoint<T>& k, int site, Extension bra_ext,
                     Extension ket_ext) {
  const RedBlock& blk = ex.lattice().site(site);
  if (blk.m > ex.lattice().rank)
    throw ConstructionError("extensions are not defined past the last black root");
  const FundamentalRep& rep = ex.algebra().rep(blk.m);
  auto pick = [&](Extension e) {
    switch (e) {
      case Extension::Forward:
        return forward_vector(rep, blk.m, blk.R);
      case Extension::Backward:
        return backward_vector(rep, blk.m);
      case Extension::Spanning:
        return spanning_vector(rep, blk.m, blk.R);
    }
    throw ConstructionError("unknown extension");
  };
  std::vector<VecQ> bras = ex.start_basis(site), kets = ex.start_basis(site);
  bras.push_back(pick(bra_ext));
  kets.push_back(pick(ket_ext));
  return gram_matrix<T>(k, blk.m, bras, kets);
}

/// det of the forward-extended gram = <m-1>^{R+1} <b+1>.
template <class T>
CheckPair<T> ext_det_ff_check(const FieldExtractor<T>& ex, const KPoint<T>& k, int site) {
  const RedBlock& blk = ex.lattice().site(site);
  CheckPair<T> out;
  out.lhs = determinant<T>(extended_gram<T>(ex, k, site, Extension::Forward, Extension::Forward));
  out.rhs = pow_int(k.highest(blk.m - 1), blk.R + 1) * k.highest(blk.black_after() + 1);
  return out;
}

/// det of the backward-extended gram = <b> <m-1>^{R-1} <m-2> <m+1>.
template <class T>
CheckPair<T> ext_det_bb_check(const FieldExtractor<T>& ex, const KPoint<T>& k, int site) {
  const RedBlock& blk = ex.lattice().site(site);
  if (blk.m < 2) throw ConstructionError("backward extension needs m >= 2");
  CheckPair<T> out;
  out.lhs =
      determinant<T>(extended_gram<T>(ex, k, site, Extension::Backward, Extension::Backward));
  out.rhs = k.highest(blk.black_after()) * pow_int(k.highest(blk.m - 1), blk.R - 1) *
            k.highest(blk.m - 2) * k.highest(blk.m + 1);
  return out;
}

/// Build a deterministic generic exact sample for constant calibration.  Two
/// stacked random unipotent products keep every principal minor away from
/// the exceptional locus; singular draws are discarded.
inline KPoint<Rational> calibration_point(std::shared_ptr<const Algebra> alg, unsigned long salt) {
  Rng rng = Rng::stream(0x90a7u, salt);
  SampleOptions opt;
  opt.passes = 2;
  return random_regular_point<Rational>(std::move(alg), rng, opt);
}

/// Mixed forward/spanning bordered determinant:
/// <b+1> <m-1>^R <m-1|K X-_{m-1}|m-1>.
template <class T>
CheckPair<T> ext_det_fs_check(const FieldExtractor<T>& ex, const KPoint<T>& k, int site) {
  const RedBlock& blk = ex.lattice().site(site);
  if (blk.m < 2) throw ConstructionError("spanning extension needs m >= 2");
  const FundamentalRep& below = ex.algebra().rep(blk.m - 1);
  CheckPair<T> out;
  out.lhs =
      determinant<T>(extended_gram<T>(ex, k, site, Extension::Forward, Extension::Spanning));
  T ins = (k.rep(blk.m - 1) * scalarize<T>(below.xminus(blk.m - 1)))(0, 0);
  out.rhs = k.highest(blk.black_after() + 1) * pow_int(k.highest(blk.m - 1), blk.R) * ins;
  return out;
}

/// Mixed backward/spanning bordered determinant:
/// <m-1>^{R-1} <m-2> <b> <m+1|K (m+1,b)-|m+1>.
template <class T>
CheckPair<T> ext_det_bs_check(const FieldExtractor<T>& ex, const KPoint<T>& k, int site) {
  const RedBlock& blk = ex.lattice().site(site);
  if (blk.m < 2) throw ConstructionError("spanning extension needs m >= 2");
  int b = blk.black_after();
  CheckPair<T> out;
  out.lhs =
      determinant<T>(extended_gram<T>(ex, k, site, Extension::Backward, Extension::Spanning));
  MatQ root = ex.algebra().composite_lower(blk.m + 1, blk.m + 1, b);
  T ins = (k.rep(blk.m + 1) * scalarize<T>(root))(0, 0);
  out.rhs =
      pow_int(k.highest(blk.m - 1), blk.R - 1) * k.highest(blk.m - 2) * k.highest(b) * ins;
  return out;
}

/// Spanning/spanning bordered determinant: the sum of the two previous
/// structures, one through the root below the block and one through the
/// composite root spanning it.
template <class T>
CheckPair<T> ext_det_ss_check(const FieldExtractor<T>& ex, const KPoint<T>& k, int site) {
  const RedBlock& blk = ex.lattice().site(site);
  if (blk.m < 2) throw ConstructionError("spanning extension needs m >= 2");
  int b = blk.black_after();
  const FundamentalRep& below = ex.algebra().rep(blk.m - 1);
  T up = (scalarize<T>(below.xplus(blk.m - 1)) * k.rep(blk.m - 1))(0, 0);
  T down = (k.rep(blk.m - 1) * scalarize<T>(below.xminus(blk.m - 1)))(0, 0);
  T term1 = pow_int(k.highest(blk.m - 1), blk.R - 1) * k.highest(b + 1) * up * down;
  MatQ cu = ex.algebra().composite_raise(blk.m + 1, blk.m + 1, b);
  MatQ cd = ex.algebra().composite_lower(blk.m + 1, blk.m + 1, b);
  T mid = (scalarize<T>(cu) * k.rep(blk.m + 1) * scalarize<T>(cd))(0, 0);
  T term2 =
      pow_int(k.highest(blk.m - 1), blk.R - 1) * k.highest(blk.m - 2) * mid * k.highest(b);
  CheckPair<T> out;
  out.lhs =
      determinant<T>(extended_gram<T>(ex, k, site, Extension::Spanning, Extension::Spanning));
  out.rhs = term1 + term2;
  return out;
}

/// Bilinear expansion of the through-block element:
/// <m|(m,b)+ K (m,b)-|m> = abar^T u alpha + <m-1><b+1>/<b>, components taken
/// on the highest vector of representation b.
template <class T>
CheckPair<T> cross_term_expansion_check(const FieldExtractor<T>& ex, const KPoint<T>& k,
                                        int site) {
  const RedBlock& blk = ex.lattice().site(site);
  int m = blk.m, b = blk.black_after();
  CheckPair<T> out;
  MatQ up = ex.algebra().composite_raise(m, m, b);
  MatQ down = ex.algebra().composite_lower(m, m, b);
  out.lhs = (scalarize<T>(up) * k.rep(m) * scalarize<T>(down))(0, 0);
  Mat<T> u = ex.u_start(k, site);
  Vec<T> abar(blk.R + 1), alow(blk.R + 1);
  const Mat<T>& gb = k.rep(b);
  for (int s = 1; s <= blk.R + 1; ++s) {
    MatQ cu = ex.algebra().composite_raise(b, m + s - 1, b);
    MatQ cd = ex.algebra().composite_lower(b, m + s - 1, b);
    abar(s - 1) = (scalarize<T>(cu) * gb)(0, 0) / k.highest(b);
    alow(s - 1) = (gb * scalarize<T>(cd))(0, 0) / k.highest(b);
  }
  out.rhs = abar.dot(u * alow) + k.highest(m - 1) * k.highest(b + 1) / k.highest(b);
  return out;
}

}  // namespace lieflow
