#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qmaxent/complex_matrix.hpp"
#include "qmaxent/errors.hpp"
#include "qmaxent/hermitian_eigen.hpp"

namespace qmaxent {

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;

/// A Hermitian matrix, validated on construction (max entry deviation from
/// the conjugate transpose at most 1e-12).
class HermitianObservable {
 public:
  explicit HermitianObservable(ComplexSquareMatrix m) : m_(std::move(m)) {
    if (!is_hermitian(m_, kHermitianTol)) {
      throw InvariantError("HermitianObservable: matrix is not Hermitian");
    }
  }

  const ComplexSquareMatrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return m_.dim(); }

 private:
  ComplexSquareMatrix m_;
};

/// A quantum state: Hermitian, unit trace, positive semidefinite
/// (eigenvalues >= -1e-10), all checked on construction.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexSquareMatrix m) : m_(std::move(m)) {
    if (!is_hermitian(m_, kHermitianTol)) {
      throw InvariantError("DensityMatrix: matrix is not Hermitian");
    }
    const complexd t = trace(m_);
    if (std::abs(t.real() - 1.0) > kTraceTol || std::abs(t.imag()) > kTraceTol) {
      throw InvariantError("DensityMatrix: trace must be 1, got (" +
                           std::to_string(t.real()) + ", " +
                           std::to_string(t.imag()) + ")");
    }
    const Spectrum spec = detail::jacobi_hermitian(m_);
    if (spec.eigenvalues.front() < -kPsdTol) {
      throw InvariantError("DensityMatrix: negative eigenvalue " +
                           std::to_string(spec.eigenvalues.front()));
    }
  }

  const ComplexSquareMatrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return m_.dim(); }

  static DensityMatrix maximally_mixed(std::size_t dim) {
    return DensityMatrix((1.0 / static_cast<double>(dim)) *
                         ComplexSquareMatrix::identity(dim));
  }

 private:
  ComplexSquareMatrix m_;
};

/// Eigendecomposition of a Hermitian observable; eigenvalues ascending,
/// reconstruction V diag(w) V^H accurate to 1e-10 in max entry error.
inline Spectrum hermitian_eigendecompose(const HermitianObservable& h) {
  return detail::jacobi_hermitian(h.matrix());
}

/// Re Tr(rho A). The imaginary part of the trace is a numerical artifact
/// and must stay below 1e-10.
inline double expectation(const DensityMatrix& rho,
                          const HermitianObservable& a) {
  if (rho.dim() != a.dim()) {
    throw DimensionError("expectation: state and observable dims differ");
  }
  complexd t(0.0, 0.0);
  const std::size_t d = rho.dim();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) t += rho.matrix()(i, j) * a.matrix()(j, i);
  if (std::abs(t.imag()) > 1e-10) {
    throw InvariantError("expectation: non-real trace, Im = " +
                         std::to_string(t.imag()));
  }
  return t.real();
}

namespace detail {

/// Eigenvalues of a state, clamped to [0, 1]. Values below -1e-10 are an
/// invariant violation and rejected by the DensityMatrix constructor.
inline std::vector<double> clamped_state_eigenvalues(const Spectrum& spec) {
  std::vector<double> p(spec.eigenvalues.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    p[i] = std::clamp(spec.eigenvalues[i], 0.0, 1.0);
  return p;
}

inline double entropy_of_probabilities(const std::vector<double>& p) {
  double s = 0.0;
  for (double pi : p) {
    if (pi > 0.0) s -= pi * std::log(pi);
  }
  return s;
}

}  // namespace detail

/// S(rho) = -Tr rho ln rho in nats, with the convention 0 ln 0 = 0.
/// Result lies in [0, ln d].
inline double von_neumann_entropy(const DensityMatrix& rho) {
  const Spectrum spec = detail::jacobi_hermitian(rho.matrix());
  const double s =
      detail::entropy_of_probabilities(detail::clamped_state_eigenvalues(spec));
  return std::clamp(s, 0.0, std::log(static_cast<double>(rho.dim())));
}

/// K(rho1, rho2) = Tr rho2 (ln rho2 - ln rho1) >= 0.
///
/// Returns +infinity when the support of rho2 is not contained in the
/// support of rho1 (rho1 eigenvalue below 1e-12 where rho2 carries weight
/// above 1e-12).
inline double relative_entropy(const DensityMatrix& rho1,
                               const DensityMatrix& rho2) {
  if (rho1.dim() != rho2.dim()) {
    throw DimensionError("relative_entropy: dims differ");
  }
  const std::size_t d = rho1.dim();
  const Spectrum s1 = detail::jacobi_hermitian(rho1.matrix());
  const Spectrum s2 = detail::jacobi_hermitian(rho2.matrix());

  // Tr rho2 ln rho2 from rho2's own spectrum.
  double tr_rho2_ln_rho2 = 0.0;
  for (double q : detail::clamped_state_eigenvalues(s2)) {
    if (q > 0.0) tr_rho2_ln_rho2 += q * std::log(q);
  }

  // Tr rho2 ln rho1 = sum_i ln(p_i) <v_i|rho2|v_i> over rho1's eigenbasis.
  double tr_rho2_ln_rho1 = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<complexd> vi(d);
    for (std::size_t k = 0; k < d; ++k) vi[k] = s1.eigenvectors(k, i);
    const double weight = quadratic_form(rho2.matrix(), vi).real();
    const double pi = std::clamp(s1.eigenvalues[i], 0.0, 1.0);
    if (pi < 1e-12) {
      if (weight > 1e-12) return std::numeric_limits<double>::infinity();
      continue;  // 0 * ln 0
    }
    tr_rho2_ln_rho1 += weight * std::log(pi);
  }

  return tr_rho2_ln_rho2 - tr_rho2_ln_rho1;
}

/// The four maximally entangled two-qubit states in the fixed order
/// (Phi+, Psi-, Phi-, Psi+), written in the computational basis
/// (uu, ud, du, dd).
inline std::array<std::vector<complexd>, 4> bell_basis_vectors() {
  const double r = 1.0 / std::sqrt(2.0);
  return {{
      {r, 0.0, 0.0, r},    // Phi+ = (uu + dd)/sqrt(2)
      {0.0, r, -r, 0.0},   // Psi- = (ud - du)/sqrt(2)
      {r, 0.0, 0.0, -r},   // Phi- = (uu - dd)/sqrt(2)
      {0.0, r, r, 0.0},    // Psi+ = (ud + du)/sqrt(2)
  }};
}

enum class Subsystem { first, second };

/// Partial transpose of a two-qubit state over one subsystem, in the
/// computational product ordering. Hermitian but in general not positive;
/// applying it twice restores the input.
inline ComplexSquareMatrix partial_transpose(const DensityMatrix& rho,
                                             Subsystem subsystem) {
  if (rho.dim() != 4) {
    throw DimensionError("partial_transpose: only 4x4 (2x2 tensor 2x2) supported");
  }
  ComplexSquareMatrix r(4);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t e = 0; e < 2; ++e) {
          const std::size_t row = 2 * a + b;
          const std::size_t col = 2 * c + e;
          if (subsystem == Subsystem::first) {
            r(row, col) = rho.matrix()(2 * c + b, 2 * a + e);
          } else {
            r(row, col) = rho.matrix()(2 * a + e, 2 * c + b);
          }
        }
  return r;
}

}  // namespace qmaxent
