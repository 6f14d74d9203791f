#pragma once

#include <algorithm>
#include <cmath>

#include "qmaxent/bell_chsh.hpp"
#include "qmaxent/errors.hpp"
#include "qmaxent/hermitian_eigen.hpp"
#include "qmaxent/quantum_state.hpp"

namespace qmaxent {

/// Outcome of a separability test. `margin` is the distance of the deciding
/// quantity from its threshold; its sign agrees with the verdict.
struct SeparabilityVerdict {
  bool separable;
  double max_eigenvalue;
  double margin;
};

/// Bell-diagonal criterion: separable iff no probability exceeds 1/2.
/// Boundary states (max p = 1/2) count as separable.
inline SeparabilityVerdict bell_diagonal_separable(
    const BellDiagonalState& state) {
  const auto& p = state.probabilities();
  const double max_p = *std::max_element(p.begin(), p.end());
  return {max_p <= 0.5 + kFeasibilityTol, max_p, 0.5 - max_p};
}

/// The two-constraint state at (b, sigma2) is inseparable iff
/// sigma2 > 8 - 2*sqrt(2) b.
inline double inseparability_threshold(double b) {
  check_mean_in_range(b, "inseparability_threshold");
  return 8.0 - kChshMax * b;
}

/// Peres-Horodecki test for two qubits: separable iff the partial transpose
/// is positive semidefinite. Used as an oracle independent of the
/// Bell-diagonal eigenvalue criterion. `margin` is the minimum eigenvalue
/// of the partial transpose.
inline SeparabilityVerdict ppt_check(const DensityMatrix& rho) {
  const ComplexSquareMatrix pt =
      partial_transpose(rho, Subsystem::second);
  const Spectrum spec = detail::jacobi_hermitian(pt);
  const double min_eig = spec.eigenvalues.front();
  const double max_eig = spec.eigenvalues.back();
  return {min_eig >= -kPsdTol, max_eig, min_eig};
}

}  // namespace qmaxent
