#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

#include "qmaxent/complex_matrix.hpp"
#include "qmaxent/errors.hpp"

namespace qmaxent {

/// Eigendecomposition of a Hermitian matrix: eigenvalues in ascending order,
/// eigenvectors as the matching orthonormal columns of `eigenvectors`.
struct Spectrum {
  std::vector<double> eigenvalues;
  ComplexSquareMatrix eigenvectors;
};

namespace detail {

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// Each rotation annihilates one off-diagonal pair (p,q): the complex phase
/// of a_pq is absorbed first, then a real Givens rotation zeroes the
/// remaining symmetric 2x2 block. Sweeps run until the off-diagonal
/// Frobenius norm drops below 1e-14 relative to the matrix scale.
inline Spectrum jacobi_hermitian(const ComplexSquareMatrix& input) {
  const std::size_t d = input.dim();
  ComplexSquareMatrix a = hermitian_part(input);
  ComplexSquareMatrix v = ComplexSquareMatrix::identity(d);

  const double scale = std::max(1.0, frobenius_norm(a));
  const double off_tol = 1e-14 * scale;
  constexpr int max_sweeps = 100;

  auto off_diag_norm = [&a, d]() {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) s += 2.0 * std::norm(a(i, j));
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off_diag_norm() <= off_tol) break;

    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double r = std::abs(a(p, q));
        if (r <= 1e-300 * scale) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const complexd phase = a(p, q) / r;  // a_pq = r * phase
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();

        // Real 2x2 rotation for [[app, r], [r, aqq]].
        const double tau = (aqq - app) / (2.0 * r);
        const double t = (tau >= 0.0)
                             ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                             : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // Unitary on the (p,q) plane:  U = [[c, s], [-s*conj(phase), c*conj(phase)]]
        const complexd u10 = -s * std::conj(phase);
        const complexd u11 = c * std::conj(phase);

        // Columns: A <- A U
        for (std::size_t k = 0; k < d; ++k) {
          const complexd akp = a(k, p);
          const complexd akq = a(k, q);
          a(k, p) = c * akp + u10 * akq;
          a(k, q) = s * akp + u11 * akq;
        }
        // Rows: A <- U^H A
        for (std::size_t k = 0; k < d; ++k) {
          const complexd apk = a(p, k);
          const complexd aqk = a(q, k);
          a(p, k) = c * apk + std::conj(u10) * aqk;
          a(q, k) = s * apk + std::conj(u11) * aqk;
        }
        // Closed forms for the rotated 2x2 block.
        a(p, p) = app - t * r;
        a(q, q) = aqq + t * r;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        // Accumulate eigenvectors: V <- V U
        for (std::size_t k = 0; k < d; ++k) {
          const complexd vkp = v(k, p);
          const complexd vkq = v(k, q);
          v(k, p) = c * vkp + u10 * vkq;
          v(k, q) = s * vkp + u11 * vkq;
        }
      }
    }
  }

  // Sort ascending, permuting eigenvector columns alongside.
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&a](std::size_t i, std::size_t j) {
    return a(i, i).real() < a(j, j).real();
  });

  Spectrum spec{std::vector<double>(d), ComplexSquareMatrix(d)};
  for (std::size_t j = 0; j < d; ++j) {
    spec.eigenvalues[j] = a(order[j], order[j]).real();
    for (std::size_t i = 0; i < d; ++i)
      spec.eigenvectors(i, j) = v(i, order[j]);
  }
  return spec;
}

}  // namespace detail

/// V f(w) V^H for a spectral decomposition (w, V).
inline ComplexSquareMatrix apply_spectral_function(
    const Spectrum& spec, const std::function<double(double)>& f) {
  const std::size_t d = spec.eigenvalues.size();
  ComplexSquareMatrix r(d);
  for (std::size_t k = 0; k < d; ++k) {
    const double fk = f(spec.eigenvalues[k]);
    if (fk == 0.0) continue;
    for (std::size_t i = 0; i < d; ++i) {
      const complexd vik = spec.eigenvectors(i, k);
      for (std::size_t j = 0; j < d; ++j)
        r(i, j) += fk * vik * std::conj(spec.eigenvectors(j, k));
    }
  }
  return r;
}

}  // namespace qmaxent
