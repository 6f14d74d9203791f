#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "qmaxent/errors.hpp"

namespace qmaxent {

using complexd = std::complex<double>;

/// Dense square complex matrix, row-major storage. Value type; the carrier
/// for operators and states throughout the library.
class ComplexSquareMatrix {
 public:
  explicit ComplexSquareMatrix(std::size_t dim)
      : dim_(dim), entries_(dim * dim, complexd(0.0, 0.0)) {
    if (dim == 0) {
      throw DimensionError("ComplexSquareMatrix: dimension must be >= 1");
    }
  }

  static ComplexSquareMatrix identity(std::size_t dim) {
    ComplexSquareMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t dim() const noexcept { return dim_; }

  complexd& operator()(std::size_t i, std::size_t j) {
    return entries_[i * dim_ + j];
  }
  const complexd& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * dim_ + j];
  }

  const std::vector<complexd>& entries() const noexcept { return entries_; }

 private:
  std::size_t dim_;
  std::vector<complexd> entries_;
};

inline void check_same_dim(const ComplexSquareMatrix& a,
                           const ComplexSquareMatrix& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("matrix dimensions do not match: " +
                         std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()));
  }
}

inline ComplexSquareMatrix operator+(const ComplexSquareMatrix& a,
                                     const ComplexSquareMatrix& b) {
  check_same_dim(a, b);
  ComplexSquareMatrix r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) r(i, j) = a(i, j) + b(i, j);
  return r;
}

inline ComplexSquareMatrix operator-(const ComplexSquareMatrix& a,
                                     const ComplexSquareMatrix& b) {
  check_same_dim(a, b);
  ComplexSquareMatrix r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) r(i, j) = a(i, j) - b(i, j);
  return r;
}

inline ComplexSquareMatrix operator*(const ComplexSquareMatrix& a,
                                     const ComplexSquareMatrix& b) {
  check_same_dim(a, b);
  const std::size_t d = a.dim();
  ComplexSquareMatrix r(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const complexd aik = a(i, k);
      if (aik == complexd(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < d; ++j) r(i, j) += aik * b(k, j);
    }
  }
  return r;
}

inline ComplexSquareMatrix operator*(complexd s, const ComplexSquareMatrix& a) {
  ComplexSquareMatrix r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) r(i, j) = s * a(i, j);
  return r;
}

inline ComplexSquareMatrix operator*(double s, const ComplexSquareMatrix& a) {
  return complexd(s, 0.0) * a;
}

inline ComplexSquareMatrix adjoint(const ComplexSquareMatrix& a) {
  ComplexSquareMatrix r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) r(i, j) = std::conj(a(j, i));
  return r;
}

inline complexd trace(const ComplexSquareMatrix& a) {
  complexd t(0.0, 0.0);
  for (std::size_t i = 0; i < a.dim(); ++i) t += a(i, i);
  return t;
}

/// max_ij |a_ij - b_ij|
inline double max_abs_diff(const ComplexSquareMatrix& a,
                           const ComplexSquareMatrix& b) {
  check_same_dim(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

inline double frobenius_norm(const ComplexSquareMatrix& a) {
  double s = 0.0;
  for (const complexd& e : a.entries()) s += std::norm(e);
  return std::sqrt(s);
}

inline bool is_hermitian(const ComplexSquareMatrix& a, double tol) {
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = i; j < a.dim(); ++j)
      if (std::abs(a(i, j) - std::conj(a(j, i))) > tol) return false;
  return true;
}

inline ComplexSquareMatrix hermitian_part(const ComplexSquareMatrix& a) {
  ComplexSquareMatrix r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      r(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
  return r;
}

/// |u><v| for column vectors u, v of equal length.
inline ComplexSquareMatrix outer_product(const std::vector<complexd>& u,
                                         const std::vector<complexd>& v) {
  if (u.size() != v.size() || u.empty()) {
    throw DimensionError("outer_product: vector lengths must match");
  }
  ComplexSquareMatrix r(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      r(i, j) = u[i] * std::conj(v[j]);
  return r;
}

/// <v|A|v>
inline complexd quadratic_form(const ComplexSquareMatrix& a,
                               const std::vector<complexd>& v) {
  if (v.size() != a.dim()) {
    throw DimensionError("quadratic_form: vector length must equal dim");
  }
  complexd s(0.0, 0.0);
  for (std::size_t i = 0; i < a.dim(); ++i) {
    complexd row(0.0, 0.0);
    for (std::size_t j = 0; j < a.dim(); ++j) row += a(i, j) * v[j];
    s += std::conj(v[i]) * row;
  }
  return s;
}

inline ComplexSquareMatrix commutator(const ComplexSquareMatrix& a,
                                      const ComplexSquareMatrix& b) {
  return a * b - b * a;
}

}  // namespace qmaxent
