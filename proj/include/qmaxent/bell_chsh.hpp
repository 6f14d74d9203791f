#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "qmaxent/complex_matrix.hpp"
#include "qmaxent/errors.hpp"
#include "qmaxent/quantum_state.hpp"

namespace qmaxent {

/// 2*sqrt(2): the largest reachable CHSH mean and the top of the operator
/// spectrum.
inline constexpr double kChshMax = 2.0 * std::numbers::sqrt2;

/// Tolerance for feasible-region membership and boundary classification.
inline constexpr double kFeasibilityTol = 1e-12;

/// Margin inside which the closed-form multipliers are treated as divergent.
inline constexpr double kMultiplierBoundaryEps = 1e-9;

/// B = 2*sqrt(2) (|Phi+><Phi+| - |Psi-><Psi-|), a 4x4 traceless Hermitian
/// with spectrum {-2*sqrt(2), 0, 0, 2*sqrt(2)}.
inline HermitianObservable bell_chsh_operator() {
  const auto bell = bell_basis_vectors();
  ComplexSquareMatrix m = kChshMax * (outer_product(bell[0], bell[0]) -
                                      outer_product(bell[1], bell[1]));
  return HermitianObservable(std::move(m));
}

/// B^2 = 8 (|Phi+><Phi+| + |Psi-><Psi-|), spectrum {0, 0, 8, 8}.
inline HermitianObservable bell_chsh_squared() {
  const auto bell = bell_basis_vectors();
  ComplexSquareMatrix m = 8.0 * (outer_product(bell[0], bell[0]) +
                                 outer_product(bell[1], bell[1]));
  return HermitianObservable(std::move(m));
}

inline void check_mean_in_range(double b, const char* where) {
  if (!(b >= -kFeasibilityTol && b <= kChshMax + kFeasibilityTol)) {
    throw DomainError(std::string(where) + ": mean b = " + std::to_string(b) +
                      " outside [0, 2*sqrt(2)]");
  }
}

/// Minimum admissible dispersion for a given mean: sigma2 >= 2*sqrt(2)*b.
inline double uncertainty_lower_bound(double b) {
  check_mean_in_range(b, "uncertainty_lower_bound");
  return kChshMax * b;
}

enum class RegionClass {
  interior,
  min_uncertainty_boundary,
  sigma_max_boundary,
  pure_state_corner,
  infeasible,
};

inline const char* to_string(RegionClass r) {
  switch (r) {
    case RegionClass::interior: return "interior";
    case RegionClass::min_uncertainty_boundary: return "min_uncertainty_boundary";
    case RegionClass::sigma_max_boundary: return "sigma_max_boundary";
    case RegionClass::pure_state_corner: return "pure_state_corner";
    case RegionClass::infeasible: return "infeasible";
  }
  return "unknown";
}

/// Locate (b, sigma2) relative to the admissible region
/// 0 <= b <= 2*sqrt(2), 2*sqrt(2)*b <= sigma2 <= 8, with tolerance 1e-12.
inline RegionClass classify_constraint_point(double b, double sigma2) {
  const double tol = kFeasibilityTol;
  if (b < -tol || b > kChshMax + tol) return RegionClass::infeasible;
  if (sigma2 < kChshMax * b - tol || sigma2 > 8.0 + tol)
    return RegionClass::infeasible;
  const bool min_active = sigma2 - kChshMax * b <= tol;
  const bool max_active = 8.0 - sigma2 <= tol;
  if (min_active && max_active) return RegionClass::pure_state_corner;
  if (min_active) return RegionClass::min_uncertainty_boundary;
  if (max_active) return RegionClass::sigma_max_boundary;
  return RegionClass::interior;
}

/// A feasible pair of constraint targets: CHSH mean b and raw second
/// moment sigma2. Validated on construction.
class ConstraintPoint {
 public:
  ConstraintPoint(double b, double sigma2) : b_(b), sigma2_(sigma2) {
    if (classify_constraint_point(b, sigma2) == RegionClass::infeasible) {
      throw DomainError("ConstraintPoint: (b = " + std::to_string(b) +
                        ", sigma2 = " + std::to_string(sigma2) +
                        ") is infeasible");
    }
  }

  double b() const noexcept { return b_; }
  double sigma2() const noexcept { return sigma2_; }
  RegionClass region() const { return classify_constraint_point(b_, sigma2_); }

 private:
  double b_;
  double sigma2_;
};

/// A state diagonal in the Bell basis, held as four probabilities in the
/// fixed order (Phi+, Psi-, Phi-, Psi+). Inputs may carry round-off of up
/// to 1e-12 outside [0, 1] and are clamped; the sum must be 1 to 1e-12.
class BellDiagonalState {
 public:
  BellDiagonalState(double p_phi_plus, double p_psi_minus, double p_phi_minus,
                    double p_psi_plus)
      : p_{p_phi_plus, p_psi_minus, p_phi_minus, p_psi_plus} {
    double sum = 0.0;
    for (double& p : p_) {
      if (p < -kFeasibilityTol || p > 1.0 + kFeasibilityTol) {
        throw DomainError("BellDiagonalState: probability " +
                          std::to_string(p) + " outside [0, 1]");
      }
      sum += p;
      p = std::clamp(p, 0.0, 1.0);
    }
    if (std::abs(sum - 1.0) > kFeasibilityTol) {
      throw DomainError("BellDiagonalState: probabilities sum to " +
                        std::to_string(sum));
    }
  }

  double p_phi_plus() const noexcept { return p_[0]; }
  double p_psi_minus() const noexcept { return p_[1]; }
  double p_phi_minus() const noexcept { return p_[2]; }
  double p_psi_plus() const noexcept { return p_[3]; }
  const std::array<double, 4>& probabilities() const noexcept { return p_; }

  /// <B> = 2*sqrt(2) (p_Phi+ - p_Psi-)
  double chsh_mean() const noexcept { return kChshMax * (p_[0] - p_[1]); }

  /// <B^2> = 8 (p_Phi+ + p_Psi-)
  double chsh_dispersion() const noexcept { return 8.0 * (p_[0] + p_[1]); }

  double entropy() const noexcept {
    double s = 0.0;
    for (double p : p_) {
      if (p > 0.0) s -= p * std::log(p);
    }
    return s;
  }

  DensityMatrix to_density_matrix() const {
    const auto bell = bell_basis_vectors();
    ComplexSquareMatrix m(4);
    for (std::size_t k = 0; k < 4; ++k) {
      if (p_[k] == 0.0) continue;
      m = m + p_[k] * outer_product(bell[k], bell[k]);
    }
    return DensityMatrix(std::move(m));
  }

 private:
  std::array<double, 4> p_;
};

/// Maximum-entropy state for a fixed pair (b, sigma2):
///   ((sigma2 + 2*sqrt(2) b)/16, (sigma2 - 2*sqrt(2) b)/16,
///    (1 - sigma2/8)/2, (1 - sigma2/8)/2).
inline BellDiagonalState two_constraint_state(const ConstraintPoint& point) {
  const double s = point.sigma2();
  const double m = kChshMax * point.b();
  const double tail = 0.5 * (1.0 - s / 8.0);
  return BellDiagonalState((s + m) / 16.0, (s - m) / 16.0, tail, tail);
}

/// Maximum-entropy state for a fixed mean alone. With t = b / (2*sqrt(2)):
///   ((1+t)^2/4, (1-t)^2/4, (1-t^2)/4, (1-t^2)/4).
inline BellDiagonalState one_constraint_state(double b) {
  check_mean_in_range(b, "one_constraint_state");
  const double t = b / kChshMax;
  const double cross = (1.0 - t * t) / 4.0;
  return BellDiagonalState((1.0 + t) * (1.0 + t) / 4.0,
                           (1.0 - t) * (1.0 - t) / 4.0, cross, cross);
}

/// Dispersion of the one-constraint state: 4 (1 + b^2/8).
inline double one_constraint_dispersion(double b) {
  check_mean_in_range(b, "one_constraint_dispersion");
  return 4.0 * (1.0 + b * b / 8.0);
}

/// Excess of the one-constraint dispersion over the admissible minimum:
/// (1/2)(b - 2*sqrt(2))^2 >= 0.
inline double dispersion_gap(double b) {
  check_mean_in_range(b, "dispersion_gap");
  const double d = b - kChshMax;
  return 0.5 * d * d;
}

struct BellMultipliers {
  double lambda1;
  double lambda2;
};

/// Dual multipliers at a strictly interior point:
///   lambda1 = -(1/(4*sqrt(2))) [ln(sigma2 + 2*sqrt(2) b) - ln(sigma2 - 2*sqrt(2) b)]
///   lambda2 = -(1/16) [ln(sigma2 + 2*sqrt(2) b) + ln(sigma2 - 2*sqrt(2) b)
///                      - 2 ln(8 - sigma2)]
/// The logs diverge on the region boundary; within 1e-9 of it this refuses
/// and callers should use two_constraint_state, which stays finite.
inline BellMultipliers closed_form_multipliers(const ConstraintPoint& point) {
  const double plus = point.sigma2() + kChshMax * point.b();
  const double minus = point.sigma2() - kChshMax * point.b();
  const double room = 8.0 - point.sigma2();
  if (plus <= kMultiplierBoundaryEps || minus <= kMultiplierBoundaryEps ||
      room <= kMultiplierBoundaryEps) {
    throw BoundaryError(
        "closed_form_multipliers: point within 1e-9 of the feasible boundary; "
        "multipliers diverge (use two_constraint_state instead)");
  }
  const double lambda1 =
      -(std::log(plus) - std::log(minus)) / (4.0 * std::numbers::sqrt2);
  const double lambda2 =
      -(std::log(plus) + std::log(minus) - 2.0 * std::log(room)) / 16.0;
  return {lambda1, lambda2};
}

/// Z(lambda1, lambda2) = exp(-2*sqrt(2) l1 - 8 l2) + exp(2*sqrt(2) l1 - 8 l2) + 2.
/// Always > 2; reaches 2 only in the limit lambda2 -> +infinity.
inline double partition_function(double lambda1, double lambda2) {
  const double a1 = -kChshMax * lambda1 - 8.0 * lambda2;
  const double a2 = kChshMax * lambda1 - 8.0 * lambda2;
  constexpr double exp_max = 709.0;  // log(DBL_MAX) ~ 709.78
  if (a1 > exp_max || a2 > exp_max) {
    throw OverflowError("partition_function: exp argument " +
                        std::to_string(std::max(a1, a2)) +
                        " exceeds double range (lambda1 = " +
                        std::to_string(lambda1) + ", lambda2 = " +
                        std::to_string(lambda2) + ")");
  }
  return std::exp(a1) + std::exp(a2) + 2.0;
}

}  // namespace qmaxent
