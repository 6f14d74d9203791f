#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "qmaxent/bell_chsh.hpp"
#include "qmaxent/quantum_state.hpp"
#include "qmaxent/separability.hpp"
#include "qmaxent/solver.hpp"

namespace qmaxent {

/// Result of one self-check suite: closed forms against the numeric dual
/// solver, exact identities over parameter grids, and randomized bound
/// checks. All randomized suites use fixed seeds.
struct SuiteResult {
  std::string name;
  bool passed;
  double worst_residual;
  double tolerance;
  std::string detail;
};

namespace detail {

inline std::vector<double> linspace(double start, double stop, int count) {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) {
    v[i] = (count == 1)
               ? start
               : start + (stop - start) * static_cast<double>(i) /
                     static_cast<double>(count - 1);
  }
  return v;
}

/// Interior grid points (b, sigma2), midpoints of an n x n subdivision so no
/// point touches the feasible boundary.
inline std::vector<ConstraintPoint> interior_grid(int n) {
  std::vector<ConstraintPoint> pts;
  pts.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    const double b = kChshMax * (i + 0.5) / n;
    const double lo = kChshMax * b;
    for (int j = 0; j < n; ++j) {
      const double f = (j + 0.5) / n;
      pts.emplace_back(b, lo + f * (8.0 - lo));
    }
  }
  return pts;
}

inline ComplexSquareMatrix random_complex_matrix(std::mt19937& rng,
                                                 std::size_t d) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexSquareMatrix g(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) g(i, j) = complexd(gauss(rng), gauss(rng));
  return g;
}

inline HermitianObservable random_hermitian(std::mt19937& rng, std::size_t d) {
  return HermitianObservable(hermitian_part(random_complex_matrix(rng, d)));
}

/// Full-rank random state G G^H / Tr(G G^H).
inline DensityMatrix random_density_matrix(std::mt19937& rng, std::size_t d) {
  const ComplexSquareMatrix g = random_complex_matrix(rng, d);
  ComplexSquareMatrix m = g * adjoint(g);
  m = (1.0 / trace(m).real()) * m;
  return DensityMatrix(hermitian_part(m));
}

inline BellDiagonalState random_bell_diagonal(std::mt19937& rng) {
  std::uniform_real_distribution<double> uni(1e-12, 1.0);
  double w[4];
  double sum = 0.0;
  for (double& x : w) {
    x = -std::log(uni(rng));
    sum += x;
  }
  return BellDiagonalState(w[0] / sum, w[1] / sum, w[2] / sum, w[3] / sum);
}

inline ConstraintSet canonical_constraints(double b, double sigma2) {
  return ConstraintSet({bell_chsh_operator(), bell_chsh_squared()},
                       {b, sigma2});
}

inline std::array<double, 4> bell_probabilities(const DensityMatrix& rho) {
  const auto bell = bell_basis_vectors();
  std::array<double, 4> p{};
  for (std::size_t i = 0; i < 4; ++i)
    p[i] = quadratic_form(rho.matrix(), bell[i]).real();
  return p;
}

}  // namespace detail

/// Criterion: solver states reproduce the closed-form probabilities to 1e-8
/// and hit their targets to 1e-10 on a 20x20 interior grid.
inline SuiteResult verify_state_oracle_equivalence() {
  double worst_prob = 0.0;
  double worst_target = 0.0;
  std::string where;
  for (const ConstraintPoint& pt : detail::interior_grid(20)) {
    const MaxEntSolution sol =
        solve_dual(detail::canonical_constraints(pt.b(), pt.sigma2()));
    const auto closed = two_constraint_state(pt).probabilities();
    const auto numeric = detail::bell_probabilities(sol.state);
    for (std::size_t i = 0; i < 4; ++i) {
      const double dev = std::abs(numeric[i] - closed[i]);
      if (dev > worst_prob) {
        worst_prob = dev;
        where = "b=" + std::to_string(pt.b()) +
                " sigma2=" + std::to_string(pt.sigma2());
      }
    }
    for (double r : sol.residuals)
      worst_target = std::max(worst_target, std::abs(r));
    if (!sol.converged) {
      return {"state-oracle-equivalence", false, 1.0, 1e-8,
              "solver did not converge at " + where};
    }
  }
  const bool pass = worst_prob <= 1e-8 && worst_target <= 1e-10;
  return {"state-oracle-equivalence", pass, worst_prob, 1e-8,
          "worst probability deviation " + std::to_string(worst_prob) +
              " at " + where + "; worst constraint residual " +
              std::to_string(worst_target) + " (tol 1e-10)"};
}

/// Criterion: solver multipliers match the closed forms to 1e-6, and the
/// Gibbs state built from the closed-form multipliers reproduces the
/// closed-form probabilities to 1e-10.
inline SuiteResult verify_multiplier_oracle_equivalence() {
  double worst_lambda = 0.0;
  double worst_round_trip = 0.0;
  std::string where;
  const auto obs = std::vector<HermitianObservable>{bell_chsh_operator(),
                                                    bell_chsh_squared()};
  for (const ConstraintPoint& pt : detail::interior_grid(20)) {
    const BellMultipliers closed = closed_form_multipliers(pt);
    const MaxEntSolution sol =
        solve_dual(detail::canonical_constraints(pt.b(), pt.sigma2()));
    const double dev = std::max(std::abs(sol.multipliers[0] - closed.lambda1),
                                std::abs(sol.multipliers[1] - closed.lambda2));
    if (dev > worst_lambda) {
      worst_lambda = dev;
      where = "b=" + std::to_string(pt.b()) +
              " sigma2=" + std::to_string(pt.sigma2());
    }

    const auto [gibbs, ln_z] =
        gibbs_state(obs, {closed.lambda1, closed.lambda2});
    (void)ln_z;
    const auto round_trip = detail::bell_probabilities(gibbs);
    const auto target = two_constraint_state(pt).probabilities();
    for (std::size_t i = 0; i < 4; ++i)
      worst_round_trip =
          std::max(worst_round_trip, std::abs(round_trip[i] - target[i]));
  }
  const bool pass = worst_lambda <= 1e-6 && worst_round_trip <= 1e-10;
  return {"multiplier-oracle-equivalence", pass, worst_lambda, 1e-6,
          "worst multiplier deviation " + std::to_string(worst_lambda) +
              " at " + where + "; worst Gibbs round trip " +
              std::to_string(worst_round_trip) + " (tol 1e-10)"};
}

/// Criterion: the one-constraint state's dispersion equals 4 (1 + b^2/8)
/// to 1e-12 across 100 mean values.
inline SuiteResult verify_dispersion_identity() {
  double worst = 0.0;
  for (double b : detail::linspace(0.0, kChshMax, 100)) {
    const double from_state = one_constraint_state(b).chsh_dispersion();
    const double formula = one_constraint_dispersion(b);
    worst = std::max(worst, std::abs(from_state - formula));
  }
  return {"dispersion-identity", worst <= 1e-12, worst, 1e-12,
          "worst |state dispersion - 4(1+b^2/8)| over 100 b values"};
}

/// Criterion: dispersion excess equals (1/2)(b - 2*sqrt(2))^2 to 1e-12 and
/// is never negative.
inline SuiteResult verify_dispersion_gap() {
  double worst = 0.0;
  bool nonnegative = true;
  for (double b : detail::linspace(0.0, kChshMax, 100)) {
    const double gap = dispersion_gap(b);
    nonnegative = nonnegative && gap >= 0.0;
    const double direct = one_constraint_dispersion(b) - uncertainty_lower_bound(b);
    worst = std::max(worst, std::abs(direct - gap));
  }
  return {"dispersion-gap", worst <= 1e-12 && nonnegative, worst, 1e-12,
          "worst |(sigma2_J1 - sigma2_min) - (b - 2*sqrt(2))^2 / 2| over 100 b values"};
}

/// Criterion: every valid state obeys 2*sqrt(2) <B> <= <B^2> <= 8, checked
/// on 1000 seeded random 4x4 density matrices.
inline SuiteResult verify_uncertainty_universality() {
  std::mt19937 rng(190341);
  const HermitianObservable b_op = bell_chsh_operator();
  const HermitianObservable b2_op = bell_chsh_squared();
  double worst = -1.0;
  for (int i = 0; i < 1000; ++i) {
    const DensityMatrix rho = detail::random_density_matrix(rng, 4);
    const double b = expectation(rho, b_op);
    const double s2 = expectation(rho, b2_op);
    worst = std::max({worst, kChshMax * b - s2, s2 - 8.0});
  }
  return {"uncertainty-universality", worst <= 1e-10, worst, 1e-10,
          "worst violation of 2*sqrt(2) b <= sigma2 <= 8 over 1000 random states"};
}

/// Criterion: the separability verdict along the minimum-uncertainty line
/// flips at b = sqrt(2) (located by bisection to 1e-9); the max-probability
/// criterion agrees with sigma2 > 8 - 2*sqrt(2) b across the grid, and with
/// the partial-transpose test on 1000 random Bell-diagonal states.
inline SuiteResult verify_separability_thresholds() {
  // Bisect the verdict flip along sigma2 = 2*sqrt(2) b.
  auto separable_at = [](double b) {
    return bell_diagonal_separable(
               two_constraint_state(ConstraintPoint(b, kChshMax * b)))
        .separable;
  };
  double lo = 1.0, hi = 2.0;  // separable at 1, inseparable at 2
  if (!separable_at(lo) || separable_at(hi)) {
    return {"separability-thresholds", false, 1.0, 1e-9,
            "bisection bracket invalid"};
  }
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (separable_at(mid) ? lo : hi) = mid;
  }
  const double flip_error = std::abs(0.5 * (lo + hi) - std::numbers::sqrt2);

  // Grid agreement between the eigenvalue criterion and the threshold.
  int grid_disagreements = 0;
  for (int i = 0; i <= 20; ++i) {
    const double b = kChshMax * i / 20.0;
    const double low = kChshMax * b;
    for (int j = 0; j <= 20; ++j) {
      const double s2 = low + (8.0 - low) * j / 20.0;
      const double threshold = inseparability_threshold(b);
      if (std::abs(s2 - threshold) <= 1e-9) continue;  // boundary band
      const bool by_eigenvalue =
          bell_diagonal_separable(two_constraint_state(ConstraintPoint(b, s2)))
              .separable;
      const bool by_threshold = s2 <= threshold;
      if (by_eigenvalue != by_threshold) ++grid_disagreements;
    }
  }

  // Partial-transpose cross-check on random Bell-diagonal states.
  std::mt19937 rng(52413);
  int ppt_disagreements = 0;
  for (int i = 0; i < 1000; ++i) {
    const BellDiagonalState state = detail::random_bell_diagonal(rng);
    const SeparabilityVerdict eig = bell_diagonal_separable(state);
    if (std::abs(eig.max_eigenvalue - 0.5) <= 1e-9) continue;  // boundary band
    const SeparabilityVerdict ppt = ppt_check(state.to_density_matrix());
    if (eig.separable != ppt.separable) ++ppt_disagreements;
  }

  const bool pass =
      flip_error <= 1e-9 && grid_disagreements == 0 && ppt_disagreements == 0;
  return {"separability-thresholds", pass, flip_error, 1e-9,
          "flip located " + std::to_string(flip_error) +
              " from sqrt(2); grid disagreements " +
              std::to_string(grid_disagreements) + "; PPT disagreements " +
              std::to_string(ppt_disagreements)};
}

/// Criterion: the dual entropy ln Z + lambda . a equals -Tr rho ln rho to
/// 1e-9 at every converged solution, and the closed-form entropy falls
/// below 1e-3 within 1e-4 of the pure-state corner.
inline SuiteResult verify_entropy_identity() {
  double worst = 0.0;
  std::string where;
  for (const ConstraintPoint& pt : detail::interior_grid(10)) {
    const ConstraintSet cs = detail::canonical_constraints(pt.b(), pt.sigma2());
    const MaxEntSolution sol = solve_dual(cs);
    if (!sol.converged) {
      return {"entropy-identity", false, 1.0, 1e-9, "solver did not converge"};
    }
    const double dual = entropy_from_dual(sol, cs);
    const double direct = von_neumann_entropy(sol.state);
    const double dev = std::abs(dual - direct);
    if (dev > worst) {
      worst = dev;
      where = "b=" + std::to_string(pt.b()) +
              " sigma2=" + std::to_string(pt.sigma2());
    }
  }
  const double corner_entropy =
      two_constraint_state(ConstraintPoint(kChshMax - 1e-4, 8.0)).entropy();
  const bool pass = worst <= 1e-9 && corner_entropy < 1e-3;
  return {"entropy-identity", pass, worst, 1e-9,
          "worst |dual entropy - direct entropy| at " + where +
              "; entropy at 1e-4 from the pure corner " +
              std::to_string(corner_entropy) + " (< 1e-3)"};
}

/// Criterion: adding the dispersion constraint can only lower the entropy:
/// S2 <= S1 + 1e-12 across the feasible grid, with equality where the
/// dispersion target equals the one-constraint dispersion.
inline SuiteResult verify_entropy_ordering() {
  double worst_violation = 0.0;
  double worst_equality = 0.0;
  for (int i = 0; i <= 40; ++i) {
    const double b = kChshMax * i / 40.0;
    const double s1 = one_constraint_state(b).entropy();
    const double low = kChshMax * b;
    for (int j = 0; j <= 40; ++j) {
      const double s2v = low + (8.0 - low) * j / 40.0;
      const double s2 =
          two_constraint_state(ConstraintPoint(b, s2v)).entropy();
      worst_violation = std::max(worst_violation, s2 - s1);
    }
    const double matched = one_constraint_dispersion(b);
    const double s2_at_match =
        two_constraint_state(ConstraintPoint(b, matched)).entropy();
    worst_equality = std::max(worst_equality, std::abs(s2_at_match - s1));
  }
  const bool pass = worst_violation <= 1e-12 && worst_equality <= 1e-12;
  return {"entropy-ordering", pass, std::max(worst_violation, worst_equality),
          1e-12,
          "worst S2 - S1 " + std::to_string(worst_violation) +
              "; worst |S2 - S1| at matched dispersion " +
              std::to_string(worst_equality)};
}

/// Criterion: the constraint pair (2*sqrt(2), 8) pins the pure Phi+ state
/// exactly.
inline SuiteResult verify_pure_state_corner() {
  const BellDiagonalState corner =
      two_constraint_state(ConstraintPoint(kChshMax, 8.0));
  const auto& p = corner.probabilities();
  const bool exact = p[0] == 1.0 && p[1] == 0.0 && p[2] == 0.0 && p[3] == 0.0;
  const auto bell = bell_basis_vectors();
  const double fidelity =
      quadratic_form(corner.to_density_matrix().matrix(), bell[0]).real();
  const double fid_err = std::abs(fidelity - 1.0);
  return {"pure-state-corner", exact && fid_err <= 1e-12, fid_err, 1e-12,
          std::string("probabilities ") + (exact ? "exactly" : "NOT") +
              " (1, 0, 0, 0); |fidelity - 1| = " + std::to_string(fid_err)};
}

/// Criterion: the dual gradient matches central finite differences of ln Z
/// (h = 1e-6) to 1e-6 at 50 random multiplier points, for the commuting
/// canonical pair and for a non-commuting pair.
inline SuiteResult verify_gradient_check() {
  std::mt19937 rng(77001);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double h = 1e-6;

  const std::vector<HermitianObservable> commuting{bell_chsh_operator(),
                                                   bell_chsh_squared()};
  std::vector<HermitianObservable> non_commuting{bell_chsh_operator(),
                                                 detail::random_hermitian(rng, 4)};
  if (frobenius_norm(commutator(non_commuting[0].matrix(),
                                non_commuting[1].matrix())) < 0.1) {
    return {"gradient-check", false, 1.0, 1e-6,
            "generated pair unexpectedly commutes"};
  }

  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto& obs = (trial < 25) ? commuting : non_commuting;
    std::vector<double> lambda{uni(rng), uni(rng)};
    const std::vector<double> achieved =
        dual_gradient(obs, lambda, {0.0, 0.0});
    for (std::size_t i = 0; i < obs.size(); ++i) {
      std::vector<double> up = lambda, down = lambda;
      up[i] += h;
      down[i] -= h;
      const double fd = (detail::ln_partition(obs, up) -
                         detail::ln_partition(obs, down)) /
                        (2.0 * h);
      worst = std::max(worst, std::abs(fd + achieved[i]));
    }
  }
  return {"gradient-check", worst <= 1e-6, worst, 1e-6,
          "worst |d(ln Z)/d(lambda_i) + <A_i>| over 50 random points"};
}

/// Criterion: relative entropy is non-negative on sampled pairs and zero
/// for identical states.
inline SuiteResult verify_relative_entropy() {
  std::mt19937 rng(90125);
  double worst_negative = 0.0;
  for (int i = 0; i < 200; ++i) {
    const DensityMatrix rho1 = detail::random_density_matrix(rng, 4);
    const DensityMatrix rho2 = detail::random_density_matrix(rng, 4);
    const double k = relative_entropy(rho1, rho2);
    worst_negative = std::max(worst_negative, -k);
  }
  double worst_self = 0.0;
  for (int i = 0; i < 50; ++i) {
    const DensityMatrix rho = detail::random_density_matrix(rng, 4);
    worst_self = std::max(worst_self, std::abs(relative_entropy(rho, rho)));
  }
  const bool pass = worst_negative <= 1e-10 && worst_self <= 1e-12;
  return {"relative-entropy", pass, std::max(worst_negative, worst_self), 1e-10,
          "worst negativity " + std::to_string(worst_negative) +
              " (tol 1e-10); worst |K(rho, rho)| " +
              std::to_string(worst_self) + " (tol 1e-12)"};
}

/// The full self-check battery, in reporting order.
inline std::vector<SuiteResult> run_verification_suites() {
  return {
      verify_state_oracle_equivalence(),
      verify_multiplier_oracle_equivalence(),
      verify_dispersion_identity(),
      verify_dispersion_gap(),
      verify_uncertainty_universality(),
      verify_separability_thresholds(),
      verify_entropy_identity(),
      verify_entropy_ordering(),
      verify_pure_state_corner(),
      verify_gradient_check(),
      verify_relative_entropy(),
  };
}

}  // namespace qmaxent
