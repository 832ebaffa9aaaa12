#pragma once
#include <vector>

#include "lieflow/matrix.hpp"

namespace lieflow {

/// Dense univariate polynomial, coefficients stored lowest degree first.
template <class T>
struct Poly {
  std::vector<T> c;

  Poly() = default;
  explicit Poly(std::vector<T> coeffs) : c(std::move(coeffs)) { trim(); }
  static Poly constant(const T& v) { return Poly(std::vector<T>{v}); }

  bool is_zero() const { return c.empty(); }
  int degree() const { return static_cast<int>(c.size()) - 1; }

  T operator()(const T& x) const {
    T acc(0);
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  Poly& operator+=(const Poly& o) {
    if (o.c.size() > c.size()) c.resize(o.c.size(), T(0));
    for (std::size_t i = 0; i < o.c.size(); ++i) c[i] += o.c[i];
    trim();
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }

  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    Poly out;
    out.c.assign(a.c.size() + b.c.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c.size(); ++i)
      for (std::size_t j = 0; j < b.c.size(); ++j) out.c[i + j] += a.c[i] * b.c[j];
    out.trim();
    return out;
  }

  friend Poly operator*(const T& s, const Poly& p) {
    Poly out = p;
    for (auto& v : out.c) v = s * v;
    out.trim();
    return out;
  }

  /// Antiderivative vanishing at zero.
  Poly antiderivative() const {
    Poly out;
    out.c.assign(c.size() + 1, T(0));
    for (std::size_t i = 0; i < c.size(); ++i) out.c[i + 1] = c[i] / T(static_cast<long>(i + 1));
    out.trim();
    return out;
  }

  void trim() {
    while (!c.empty() && c.back() == T(0)) c.pop_back();
  }
};

/// Plain row-major matrix of polynomials (storage only, no algebra).
template <class T>
struct PolyMat {
  int rows = 0, cols = 0;
  std::vector<Poly<T>> data;

  PolyMat() = default;
  PolyMat(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c) {}

  Poly<T>& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  const Poly<T>& at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

  Mat<T> eval(const T& t) const {
    Mat<T> out(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) out(r, c) = at(r, c)(t);
    return out;
  }
};

}  // namespace lieflow
