#pragma once
#include <Eigen/Dense>

#include "lieflow/errors.hpp"
#include "lieflow/rational.hpp"

namespace Eigen {
// Exact-rational scalar support.  Cost constants are rough; only relative
// magnitudes matter and all matrices here are tiny.
template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
  typedef mpq_class Real;
  typedef mpq_class NonInteger;
  typedef mpq_class Nested;
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 150,
    MulCost = 100
  };
};
}  // namespace Eigen

namespace lieflow {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using MatQ = Mat<Rational>;
using VecQ = Vec<Rational>;
using MatD = Eigen::MatrixXd;
using VecD = Eigen::VectorXd;

template <class T>
Mat<T> commutator(const Mat<T>& a, const Mat<T>& b) {
  return a * b - b * a;
}

inline MatD to_float(const MatQ& m) {
  MatD out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).get_d();
  return out;
}

inline VecD to_float(const VecQ& v) {
  VecD out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = v(i).get_d();
  return out;
}

/// Converts an exact matrix into the scalar type of the surrounding computation.
template <class T>
Mat<T> scalarize(const MatQ& m) {
  if constexpr (std::is_same_v<T, Rational>)
    return m;
  else
    return to_float(m);
}

template <class T>
Vec<T> scalarize_vec(const VecQ& v) {
  if constexpr (std::is_same_v<T, Rational>)
    return v;
  else
    return to_float(v);
}

template <class T>
T scalar_cast(const Rational& q) {
  if constexpr (std::is_same_v<T, Rational>)
    return q;
  else
    return q.get_d();
}

/// Determinant by Gaussian elimination with pivoting.  Exact for Rational;
/// for double, delegates to Eigen's LU.
template <class T>
T determinant(Mat<T> m) {
  if (m.rows() != m.cols()) throw ConstructionError("determinant of non-square matrix");
  if constexpr (std::is_same_v<T, double>) {
    return m.determinant();
  } else {
    const Eigen::Index n = m.rows();
    T det = 1;
    for (Eigen::Index c = 0; c < n; ++c) {
      Eigen::Index p = -1;
      for (Eigen::Index r = c; r < n; ++r)
        if (m(r, c) != 0) {
          p = r;
          break;
        }
      if (p < 0) return 0;
      if (p != c) {
        m.row(p).swap(m.row(c));
        det = -det;
      }
      det *= m(c, c);
      for (Eigen::Index r = c + 1; r < n; ++r) {
        if (m(r, c) == 0) continue;
        T f = m(r, c) / m(c, c);
        m.row(r) -= f * m.row(c);
      }
    }
    return det;
  }
}

/// Inverse; throws NumericalBreakdown on singular input.
template <class T>
Mat<T> inverse(const Mat<T>& m) {
  if (m.rows() != m.cols()) throw ConstructionError("inverse of non-square matrix");
  if constexpr (std::is_same_v<T, double>) {
    Eigen::FullPivLU<MatD> lu(m);
    if (!lu.isInvertible()) throw NumericalBreakdown("singular matrix");
    return lu.inverse();
  } else {
    const Eigen::Index n = m.rows();
    Mat<T> a = m, inv = Mat<T>::Identity(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
      Eigen::Index p = -1;
      for (Eigen::Index r = c; r < n; ++r)
        if (a(r, c) != 0) {
          p = r;
          break;
        }
      if (p < 0) throw NumericalBreakdown("singular matrix");
      if (p != c) {
        a.row(p).swap(a.row(c));
        inv.row(p).swap(inv.row(c));
      }
      T piv = a(c, c);
      a.row(c) /= piv;
      inv.row(c) /= piv;
      for (Eigen::Index r = 0; r < n; ++r) {
        if (r == c || a(r, c) == 0) continue;
        T f = a(r, c);
        a.row(r) -= f * a.row(c);
        inv.row(r) -= f * inv.row(c);
      }
    }
    return inv;
  }
}

template <class T>
double abs_max(const Mat<T>& m) {
  double out = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double v = std::abs(to_double(m(i, j)));
      if (v > out) out = v;
    }
  return out;
}

}  // namespace lieflow
