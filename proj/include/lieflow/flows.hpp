#pragma once
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "lieflow/group.hpp"
#include "lieflow/poly.hpp"

namespace lieflow {

/// One zero-grade generator term with a polynomial coefficient in the flow
/// variable: Cartan directions always qualify, raising/lowering only at roots
/// whose grading entry is zero.
template <class T>
struct ZeroGradeTerm {
  GeneratorRef gen;
  Poly<T> poly;
};

/// Polynomial coefficient data of the two linear flows.  pbar[k][i] drives the
/// raising side (functions of y), p[k][i] the lowering side (functions of x).
/// Shapes follow the site lattice: pbar (R_i+1) x (R_{i+k}+1), p transposed.
template <class T>
struct CoefficientSet {
  int max_grade = 1;
  std::map<std::pair<int, int>, PolyMat<T>> pbar;
  std::map<std::pair<int, int>, PolyMat<T>> p;
  std::vector<ZeroGradeTerm<T>> zero_minus;  // enters the x-side flow
  std::vector<ZeroGradeTerm<T>> zero_plus;   // enters the y-side flow

  bool has(int k, int i) const { return pbar.count({k, i}) != 0; }
};

template <class T>
void validate_coefficients(const SiteLattice& lattice, const CoefficientSet<T>& coeffs) {
  int bmax = lattice.size() - 1;
  if (coeffs.max_grade < 1 || coeffs.max_grade > bmax)
    throw ConfigError("max grade must lie in 1.." + std::to_string(bmax));
  for (int k = 1; k <= coeffs.max_grade; ++k)
    for (int i = 0; i + k <= bmax; ++i) {
      auto itb = coeffs.pbar.find({k, i});
      auto itp = coeffs.p.find({k, i});
      if (itb == coeffs.pbar.end() || itp == coeffs.p.end())
        throw ConfigError("missing coefficient block k=" + std::to_string(k) +
                          " site=" + std::to_string(i));
      int rows = lattice.site(i).R + 1, cols = lattice.site(i + k).R + 1;
      if (itb->second.rows != rows || itb->second.cols != cols)
        throw ConfigError("raising coefficient block k=" + std::to_string(k) +
                          " site=" + std::to_string(i) + " must be " + std::to_string(rows) +
                          "x" + std::to_string(cols));
      if (itp->second.rows != cols || itp->second.cols != rows)
        throw ConfigError("lowering coefficient block k=" + std::to_string(k) +
                          " site=" + std::to_string(i) + " must be " + std::to_string(cols) +
                          "x" + std::to_string(rows));
    }
  auto check_zero = [&](const std::vector<ZeroGradeTerm<T>>& terms) {
    for (const auto& term : terms) {
      switch (term.gen.kind) {
        case GeneratorRef::Kind::Cartan:
          if (term.gen.a < 1 || term.gen.a > lattice.rank)
            throw ConfigError("Cartan term root out of range");
          break;
        case GeneratorRef::Kind::Raise:
        case GeneratorRef::Kind::Lower:
          if (term.gen.a < 1 || term.gen.a > lattice.rank)
            throw ConfigError("zero-grade term root out of range");
          if (lattice.grading[term.gen.a - 1] != 0)
            throw ConfigError("zero-grade raising/lowering terms must sit at roots with "
                              "grading entry zero");
          break;
        default:
          throw ConfigError("zero-grade terms must be Cartan or simple generators");
      }
    }
  };
  check_zero(coeffs.zero_minus);
  check_zero(coeffs.zero_plus);
}

/// Root span of the grade-k ladder term (k,i,s,j): one consecutive composite
/// root from the s-th slot of site i to the j-th slot of site i+k.
inline std::pair<int, int> ladder_span(const SiteLattice& lattice, int k, int i, int s, int j) {
  int a = lattice.site(i).m + s - 1;
  int b = lattice.site(i + k).m + j - 2;
  return {a, b};
}

/// The same ladder generator built the nested way, as the commutator
/// [A,[B,C]] of the three segment composites, degenerate segments skipped.
inline MatQ nested_ladder_generator(const Algebra& alg, const SiteLattice& lattice, int rep_index,
                                    int k, int i, int s, int j) {
  const RedBlock& si = lattice.site(i);
  const RedBlock& st = lattice.site(i + k);
  bool has_a = s <= si.R;  // s = R_i+1 starts past the site's red roots
  bool has_c = j >= 2;
  MatQ b = alg.composite_raise(rep_index, si.mbar() + 1, lattice.site(i + k - 1).mbar() + 1);
  MatQ inner = b;
  if (has_c) {
    MatQ c = alg.composite_raise(rep_index, st.m, st.m + j - 2);
    inner = commutator<Rational>(inner, c);
  }
  if (has_a) {
    MatQ a = alg.composite_raise(rep_index, si.m + s - 1, si.mbar());
    inner = commutator<Rational>(a, inner);
  }
  return inner;
}

/// Assembled one-sided flow generator in one representation: a sum of
/// polynomial-weighted constant matrices, evaluated per parameter value.
template <class T>
struct FlowAssembly {
  int dim = 0;
  struct Term {
    Poly<T> poly;
    Mat<T> mat;
  };
  std::vector<Term> terms;

  Mat<T> eval(const T& t) const {
    Mat<T> out = Mat<T>::Zero(dim, dim);
    for (const auto& term : terms) out += term.poly(t) * term.mat;
    return out;
  }

  PolyMat<T> as_poly_mat() const {
    PolyMat<T> out(dim, dim);
    for (const auto& term : terms)
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
          if (term.mat(r, c) != T(0)) out.at(r, c) += Poly<T>::constant(term.mat(r, c)) * term.poly;
    return out;
  }
};

enum class FlowSide { Raising, Lowering };

/// Build the grade-k part of one side of the flow generator.  k = 0 gives the
/// zero-grade part.
template <class T>
FlowAssembly<T> assemble_grade(const Algebra& alg, const SiteLattice& lattice,
                               const CoefficientSet<T>& coeffs, int rep_index, FlowSide side,
                               int k) {
  FlowAssembly<T> out;
  out.dim = alg.rep(rep_index).dim;
  if (k == 0) {
    const auto& zero =
        side == FlowSide::Raising ? coeffs.zero_plus : coeffs.zero_minus;
    for (const auto& term : zero)
      out.terms.push_back({term.poly, scalarize<T>(generator_matrix(alg, rep_index, term.gen))});
    return out;
  }
  int bmax = lattice.size() - 1;
  for (int i = 0; i + k <= bmax; ++i) {
    const PolyMat<T>& block =
        side == FlowSide::Raising ? coeffs.pbar.at({k, i}) : coeffs.p.at({k, i});
    for (int s = 1; s <= lattice.site(i).R + 1; ++s)
      for (int j = 1; j <= lattice.site(i + k).R + 1; ++j) {
        auto [a, b] = ladder_span(lattice, k, i, s, j);
        const Poly<T>& w =
            side == FlowSide::Raising ? block.at(s - 1, j - 1) : block.at(j - 1, s - 1);
        if (w.is_zero()) continue;
        MatQ gen = side == FlowSide::Raising ? alg.composite_raise(rep_index, a, b)
                                             : alg.composite_lower(rep_index, a, b);
        out.terms.push_back({w, scalarize<T>(gen)});
      }
  }
  return out;
}

/// Full one-sided generator: zero grade plus all ladder grades.
template <class T>
FlowAssembly<T> assemble_side(const Algebra& alg, const SiteLattice& lattice,
                              const CoefficientSet<T>& coeffs, int rep_index, FlowSide side) {
  FlowAssembly<T> out = assemble_grade<T>(alg, lattice, coeffs, rep_index, side, 0);
  for (int k = 1; k <= coeffs.max_grade; ++k) {
    FlowAssembly<T> part = assemble_grade<T>(alg, lattice, coeffs, rep_index, side, k);
    for (auto& term : part.terms) out.terms.push_back(std::move(term));
  }
  return out;
}

/// Two one-parameter families of group elements, sampled on grid lines; the
/// full two-parameter solution is their pointwise product and is composed on
/// demand, never stored.
template <class T>
struct FlowSolution {
  std::shared_ptr<const Algebra> alg;
  SiteLattice lattice;
  std::vector<T> xs, ys;
  std::vector<std::vector<Mat<T>>> mminus;  // [rep][ix]
  std::vector<std::vector<Mat<T>>> mplus;   // [rep][iy]

  KPoint<T> k_at(int ix, int iy) const {
    KPoint<T> out;
    out.alg = alg;
    out.by_rep.reserve(mminus.size());
    for (std::size_t j = 0; j < mminus.size(); ++j)
      out.by_rep.push_back((mplus[j][iy] * mminus[j][ix]).eval());
    return out;
  }
};

namespace detail {

template <class T>
PolyMat<T> polymat_mul(const PolyMat<T>& a, const PolyMat<T>& b) {
  PolyMat<T> out(a.rows, b.cols);
  for (int r = 0; r < a.rows; ++r)
    for (int c = 0; c < b.cols; ++c) {
      Poly<T> acc;
      for (int t = 0; t < a.cols; ++t) acc += a.at(r, t) * b.at(t, c);
      out.at(r, c) = std::move(acc);
    }
  return out;
}

template <class T>
PolyMat<T> polymat_integrate_from(const PolyMat<T>& a, const T& t0) {
  PolyMat<T> out(a.rows, a.cols);
  for (int r = 0; r < a.rows; ++r)
    for (int c = 0; c < a.cols; ++c) {
      Poly<T> f = a.at(r, c).antiderivative();
      T shift = f(t0);
      f += Poly<T>::constant(T(0) - shift);
      out.at(r, c) = std::move(f);
    }
  return out;
}

template <class T>
bool polymat_equal(const PolyMat<T>& a, const PolyMat<T>& b) {
  if (a.rows != b.rows || a.cols != b.cols) return false;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    if (a.data[i].c != b.data[i].c) return false;
  return true;
}

}  // namespace detail

/// Exact fundamental solutions as polynomial matrices, valid when both sides
/// are purely graded (no zero-grade terms): the iteration
/// M <- I + integral(M L) terminates because the generators are nilpotent.
template <class T>
struct PolyFlowSolution {
  std::shared_ptr<const Algebra> alg;
  SiteLattice lattice;
  std::vector<PolyMat<T>> mminus_poly, mplus_poly;  // [rep]

  Mat<T> mminus_at(int rep, const T& x) const { return mminus_poly[rep].eval(x); }
  Mat<T> mplus_at(int rep, const T& y) const { return mplus_poly[rep].eval(y); }

  KPoint<T> k_at(const T& x, const T& y) const {
    KPoint<T> out;
    out.alg = alg;
    for (std::size_t j = 0; j < mminus_poly.size(); ++j)
      out.by_rep.push_back((mplus_at(static_cast<int>(j), y) *
                            mminus_at(static_cast<int>(j), x))
                               .eval());
    return out;
  }

  FlowSolution<T> sample(std::vector<T> xs, std::vector<T> ys) const {
    FlowSolution<T> out;
    out.alg = alg;
    out.lattice = lattice;
    out.xs = xs;
    out.ys = ys;
    out.mminus.resize(mminus_poly.size());
    out.mplus.resize(mplus_poly.size());
    for (std::size_t j = 0; j < mminus_poly.size(); ++j) {
      for (const T& x : xs) out.mminus[j].push_back(mminus_poly[j].eval(x));
      for (const T& y : ys) out.mplus[j].push_back(mplus_poly[j].eval(y));
    }
    return out;
  }
};

template <class T>
PolyFlowSolution<T> picard_flows(std::shared_ptr<const Algebra> alg, const SiteLattice& lattice,
                                 const CoefficientSet<T>& coeffs, const T& x0, const T& y0) {
  validate_coefficients(lattice, coeffs);
  if (!coeffs.zero_minus.empty() || !coeffs.zero_plus.empty())
    throw ConfigError("exact flow integration requires empty zero-grade parts");
  PolyFlowSolution<T> out;
  out.alg = alg;
  out.lattice = lattice;
  for (int j = 0; j <= alg->rank() + 1; ++j) {
    int dim = alg->rep(j).dim;
    PolyMat<T> lminus = assemble_side<T>(*alg, lattice, coeffs, j, FlowSide::Lowering).as_poly_mat();
    PolyMat<T> lplus = assemble_side<T>(*alg, lattice, coeffs, j, FlowSide::Raising).as_poly_mat();
    PolyMat<T> ident(dim, dim);
    for (int d = 0; d < dim; ++d) ident.at(d, d) = Poly<T>::constant(T(1));
    auto iterate = [&](const PolyMat<T>& gen, bool gen_on_right, const T& t0) {
      PolyMat<T> cur = ident;
      for (int it = 0; it <= dim + 2; ++it) {
        PolyMat<T> prod = gen_on_right ? detail::polymat_mul(cur, gen)
                                       : detail::polymat_mul(gen, cur);
        PolyMat<T> next = detail::polymat_integrate_from(prod, t0);
        for (int d = 0; d < dim; ++d) next.at(d, d) += Poly<T>::constant(T(1));
        if (detail::polymat_equal(next, cur)) return cur;
        cur = std::move(next);
      }
      throw NumericalBreakdown("flow iteration did not close; generator not nilpotent");
    };
    out.mminus_poly.push_back(iterate(lminus, true, x0));
    out.mplus_poly.push_back(iterate(lplus, false, y0));
  }
  return out;
}

/// Classic fourth-order Runge-Kutta with four internal substeps per grid
/// interval; identity initial data at the first grid line.
template <class T>
FlowSolution<T> integrate_flows(std::shared_ptr<const Algebra> alg, const SiteLattice& lattice,
                                const CoefficientSet<T>& coeffs, std::vector<T> xs,
                                std::vector<T> ys) {
  static_assert(std::is_floating_point_v<T>, "grid integration is floating point");
  validate_coefficients(lattice, coeffs);
  FlowSolution<T> out;
  out.alg = alg;
  out.lattice = lattice;
  out.xs = xs;
  out.ys = ys;
  out.mminus.resize(alg->rank() + 2);
  out.mplus.resize(alg->rank() + 2);
  for (int j = 0; j <= alg->rank() + 1; ++j) {
    int dim = alg->rep(j).dim;
    FlowAssembly<T> lminus = assemble_side<T>(*alg, lattice, coeffs, j, FlowSide::Lowering);
    FlowAssembly<T> lplus = assemble_side<T>(*alg, lattice, coeffs, j, FlowSide::Raising);
    auto march = [&](const FlowAssembly<T>& gen, bool gen_on_right, const std::vector<T>& ts,
                     std::vector<Mat<T>>& dest) {
      auto rhs = [&](const T& t, const Mat<T>& m) -> Mat<T> {
        Mat<T> g = gen.eval(t);
        return gen_on_right ? Mat<T>((m * g).eval()) : Mat<T>((g * m).eval());
      };
      Mat<T> m = Mat<T>::Identity(dim, dim);
      dest.push_back(m);
      for (std::size_t p = 0; p + 1 < ts.size(); ++p) {
        T t = ts[p];
        T h = (ts[p + 1] - ts[p]) / T(4);
        for (int sub = 0; sub < 4; ++sub) {
          Mat<T> k1 = rhs(t, m);
          Mat<T> k2 = rhs(t + h / T(2), m + (h / T(2)) * k1);
          Mat<T> k3 = rhs(t + h / T(2), m + (h / T(2)) * k2);
          Mat<T> k4 = rhs(t + h, m + h * k3);
          m += (h / T(6)) * (k1 + T(2) * k2 + T(2) * k3 + k4);
          t += h;
        }
        dest.push_back(m);
      }
    };
    march(lminus, true, xs, out.mminus[j]);
    march(lplus, false, ys, out.mplus[j]);
  }
  return out;
}

/// Mixed second derivative of log of a principal highest element: the finite
/// difference over the four diagonal neighbours against the analytic 2x2
/// determinant formula with the full one-sided generators.
struct MixedLogCheck {
  double fd = 0, analytic = 0;
  double rel() const {
    double scale = std::max({std::abs(fd), std::abs(analytic), 1.0});
    return std::abs(fd - analytic) / scale;
  }
};

inline MixedLogCheck mixed_log_check(const FlowSolution<double>& sol,
                                     const CoefficientSet<double>& coeffs, int rep_index, int ix,
                                     int iy) {
  if (ix < 1 || iy < 1 || ix + 1 >= static_cast<int>(sol.xs.size()) ||
      iy + 1 >= static_cast<int>(sol.ys.size()))
    throw ConstructionError("mixed derivative check needs an interior grid point");
  auto corner = [&](int dx, int dy) {
    return std::log((sol.mplus[rep_index][iy + dy] * sol.mminus[rep_index][ix + dx])(0, 0));
  };
  double hx = sol.xs[ix + 1] - sol.xs[ix];
  double hy = sol.ys[iy + 1] - sol.ys[iy];
  MixedLogCheck out;
  out.fd = (corner(1, 1) - corner(1, -1) - corner(-1, 1) + corner(-1, -1)) / (4 * hx * hy);
  FlowAssembly<double> lminus =
      assemble_side<double>(*sol.alg, sol.lattice, coeffs, rep_index, FlowSide::Lowering);
  FlowAssembly<double> lplus =
      assemble_side<double>(*sol.alg, sol.lattice, coeffs, rep_index, FlowSide::Raising);
  Mat<double> k = (sol.mplus[rep_index][iy] * sol.mminus[rep_index][ix]).eval();
  Mat<double> lm = lminus.eval(sol.xs[ix]);
  Mat<double> lp = lplus.eval(sol.ys[iy]);
  double a = k(0, 0);
  double b = (k * lm)(0, 0);
  double c = (lp * k)(0, 0);
  double d = (lp * k * lm)(0, 0);
  out.analytic = (d * a - c * b) / (a * a);
  return out;
}

}  // namespace lieflow
