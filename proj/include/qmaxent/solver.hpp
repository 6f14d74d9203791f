#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qmaxent/complex_matrix.hpp"
#include "qmaxent/errors.hpp"
#include "qmaxent/hermitian_eigen.hpp"
#include "qmaxent/quantum_state.hpp"

namespace qmaxent {

/// Hermitian observables paired with target expectation values. Validated on
/// construction: non-empty, equal dimensions, and every target inside the
/// closed spectral range of its observable (a necessary feasibility
/// condition; targets exactly on a spectral edge are admitted here but make
/// the dual diverge).
class ConstraintSet {
 public:
  ConstraintSet(std::vector<HermitianObservable> observables,
                std::vector<double> targets)
      : observables_(std::move(observables)), targets_(std::move(targets)) {
    if (observables_.empty()) {
      throw DomainError("ConstraintSet: at least one constraint required");
    }
    if (observables_.size() != targets_.size()) {
      throw DimensionError("ConstraintSet: " +
                           std::to_string(observables_.size()) +
                           " observables vs " + std::to_string(targets_.size()) +
                           " targets");
    }
    const std::size_t d = observables_.front().dim();
    for (std::size_t i = 0; i < observables_.size(); ++i) {
      if (observables_[i].dim() != d) {
        throw DimensionError("ConstraintSet: observable dims differ");
      }
      const Spectrum spec = hermitian_eigendecompose(observables_[i]);
      const double lo = spec.eigenvalues.front();
      const double hi = spec.eigenvalues.back();
      const double slack = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
      if (targets_[i] < lo - slack || targets_[i] > hi + slack) {
        throw InfeasibilityError(
            "ConstraintSet: target " + std::to_string(targets_[i]) +
            " for observable " + std::to_string(i) +
            " outside its spectral range [" + std::to_string(lo) + ", " +
            std::to_string(hi) + "]");
      }
    }
  }

  std::size_t size() const noexcept { return observables_.size(); }
  std::size_t dim() const noexcept { return observables_.front().dim(); }
  const std::vector<HermitianObservable>& observables() const noexcept {
    return observables_;
  }
  const std::vector<double>& targets() const noexcept { return targets_; }

 private:
  std::vector<HermitianObservable> observables_;
  std::vector<double> targets_;
};

struct SolverOptions {
  double tolerance = 1e-10;
  int max_iterations = 200;
  double multiplier_cap = 1e4;
};

struct MaxEntSolution {
  std::vector<double> multipliers;
  DensityMatrix state;
  double ln_Z;
  double entropy;                      // nats
  std::vector<double> residuals;       // achieved - target
  int iterations;
  bool converged;
  std::vector<double> dual_objective;  // ln Z + lambda . targets per accepted step
};

namespace detail {

inline void check_gibbs_inputs(const std::vector<HermitianObservable>& obs,
                               const std::vector<double>& lambdas) {
  if (obs.empty()) {
    throw DomainError("gibbs_state: at least one observable required");
  }
  if (obs.size() != lambdas.size()) {
    throw DimensionError("gibbs_state: " + std::to_string(obs.size()) +
                         " observables vs " + std::to_string(lambdas.size()) +
                         " multipliers");
  }
  const std::size_t d = obs.front().dim();
  for (const auto& a : obs) {
    if (a.dim() != d) throw DimensionError("gibbs_state: observable dims differ");
  }
  for (double l : lambdas) {
    if (!std::isfinite(l)) {
      throw DomainError("gibbs_state: non-finite multiplier");
    }
  }
}

/// Spectrum of the exponent -sum_i lambda_i A_i.
inline Spectrum exponent_spectrum(const std::vector<HermitianObservable>& obs,
                                  const std::vector<double>& lambdas) {
  const std::size_t d = obs.front().dim();
  ComplexSquareMatrix h(d);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    h = h + (-lambdas[i]) * obs[i].matrix();
  }
  return jacobi_hermitian(h);
}

/// ln Tr exp(w) with the max-eigenvalue shift, finite for any finite w.
inline double ln_trace_exp(const std::vector<double>& w) {
  const double m = *std::max_element(w.begin(), w.end());
  double s = 0.0;
  for (double wi : w) s += std::exp(wi - m);
  return m + std::log(s);
}

inline double ln_partition(const std::vector<HermitianObservable>& obs,
                           const std::vector<double>& lambdas) {
  check_gibbs_inputs(obs, lambdas);
  return ln_trace_exp(exponent_spectrum(obs, lambdas).eigenvalues);
}

}  // namespace detail

/// Gibbs-form state rho = exp(-sum_i lambda_i A_i) / Z and ln Z, evaluated
/// through the eigendecomposition of the Hermitian exponent with a
/// max-eigenvalue shift, so it stays finite for any finite multipliers.
inline std::pair<DensityMatrix, double> gibbs_state(
    const std::vector<HermitianObservable>& observables,
    const std::vector<double>& lambdas) {
  detail::check_gibbs_inputs(observables, lambdas);
  const Spectrum spec = detail::exponent_spectrum(observables, lambdas);
  const double m =
      *std::max_element(spec.eigenvalues.begin(), spec.eigenvalues.end());
  double z_shifted = 0.0;
  for (double w : spec.eigenvalues) z_shifted += std::exp(w - m);
  const double ln_z = m + std::log(z_shifted);
  ComplexSquareMatrix rho = apply_spectral_function(
      spec, [m, z_shifted](double w) { return std::exp(w - m) / z_shifted; });
  // Round-off symmetrization; the construction is Hermitian analytically.
  return {DensityMatrix(hermitian_part(rho)), ln_z};
}

/// Stationarity residuals Tr(rho(lambda) A_i) - target_i; all components
/// vanish at the dual optimum.
inline std::vector<double> dual_gradient(
    const std::vector<HermitianObservable>& observables,
    const std::vector<double>& lambdas, const std::vector<double>& targets) {
  if (targets.size() != observables.size()) {
    throw DimensionError("dual_gradient: target count mismatch");
  }
  const auto [rho, ln_z] = gibbs_state(observables, lambdas);
  (void)ln_z;
  std::vector<double> res(observables.size());
  for (std::size_t i = 0; i < observables.size(); ++i) {
    res[i] = expectation(rho, observables[i]) - targets[i];
  }
  return res;
}

namespace detail {

/// Symmetrized covariance C_ij = Re Tr(rho A_i A_j) - <A_i><A_j>.
/// Exact dual Hessian for commuting observables, a positive-semidefinite
/// step metric otherwise.
inline std::vector<double> covariance_matrix(
    const DensityMatrix& rho, const std::vector<HermitianObservable>& obs,
    const std::vector<double>& achieved) {
  const std::size_t k = obs.size();
  std::vector<double> c(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      const ComplexSquareMatrix prod = obs[i].matrix() * obs[j].matrix();
      complexd t(0.0, 0.0);
      const std::size_t d = rho.dim();
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t s = 0; s < d; ++s) t += rho.matrix()(r, s) * prod(s, r);
      const double cij = t.real() - achieved[i] * achieved[j];
      c[i * k + j] = cij;
      c[j * k + i] = cij;
    }
  }
  return c;
}

/// Solve the symmetric system C x = rhs through its eigendecomposition.
/// Returns nullopt when C is singular by the condition estimate (> 1e12) or
/// not positive definite.
inline std::optional<std::vector<double>> solve_spd(
    const std::vector<double>& c, const std::vector<double>& rhs) {
  const std::size_t k = rhs.size();
  ComplexSquareMatrix m(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) m(i, j) = c[i * k + j];
  const Spectrum spec = jacobi_hermitian(m);
  const double w_min = spec.eigenvalues.front();
  const double w_max = spec.eigenvalues.back();
  if (!(w_min > 0.0) || w_max / w_min > 1e12) return std::nullopt;
  // x = V diag(1/w) V^T rhs
  std::vector<double> x(k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    double proj = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      proj += spec.eigenvectors(i, a).real() * rhs[i];
    proj /= spec.eigenvalues[a];
    for (std::size_t i = 0; i < k; ++i)
      x[i] += spec.eigenvectors(i, a).real() * proj;
  }
  return x;
}

inline double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

/// Solve the convex dual: find multipliers lambda such that the Gibbs state
/// reproduces every target expectation within `tolerance`.
///
/// Damped Newton on the dual objective D(lambda) = ln Z + lambda . targets,
/// with the symmetrized covariance as step metric and a backtracking line
/// search (halving, at most 40 halvings per step). Falls back to a gradient
/// step when the covariance is singular. Starts from lambda = 0 (the
/// maximally mixed state) unless an initial point is supplied.
///
/// Throws BoundaryError when the multiplier norm exceeds
/// options.multiplier_cap, the signature of a target on the feasible
/// boundary. Returns converged = false with the best iterate when the
/// iteration budget runs out or the line search stalls.
inline MaxEntSolution solve_dual(const ConstraintSet& constraints,
                                 const SolverOptions& options = {},
                                 std::vector<double> initial_lambdas = {}) {
  const auto& obs = constraints.observables();
  const auto& targets = constraints.targets();
  const std::size_t k = obs.size();

  // Dependent observables make the dual non-identifiable; reject up front
  // when the Gram matrix Tr(A_i A_j) is rank deficient. Each observable is
  // normalized by its Hilbert-Schmidt norm first so the test is
  // scale-invariant.
  {
    std::vector<double> norms(k);
    for (std::size_t i = 0; i < k; ++i) {
      norms[i] = std::sqrt(trace(obs[i].matrix() * obs[i].matrix()).real());
      if (!(norms[i] > 0.0)) {
        throw DependentConstraintsError(
            "solve_dual: observable " + std::to_string(i) + " is zero");
      }
    }
    ComplexSquareMatrix g(k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        const ComplexSquareMatrix prod = obs[i].matrix() * obs[j].matrix();
        g(i, j) = trace(prod).real() / (norms[i] * norms[j]);
      }
    const Spectrum spec = detail::jacobi_hermitian(g);
    if (spec.eigenvalues.front() <= 1e-10 * spec.eigenvalues.back()) {
      throw DependentConstraintsError(
          "solve_dual: constraint observables are linearly dependent");
    }
  }

  std::vector<double> lambda = initial_lambdas.empty()
                                   ? std::vector<double>(k, 0.0)
                                   : std::move(initial_lambdas);
  if (lambda.size() != k) {
    throw DimensionError("solve_dual: initial multiplier count mismatch");
  }
  for (double l : lambda) {
    if (!std::isfinite(l)) throw DomainError("solve_dual: non-finite initial multiplier");
  }

  auto evaluate = [&](const std::vector<double>& l) {
    auto [rho, ln_z] = gibbs_state(obs, l);
    std::vector<double> achieved(k);
    for (std::size_t i = 0; i < k; ++i) achieved[i] = expectation(rho, obs[i]);
    return std::tuple<DensityMatrix, double, std::vector<double>>(
        std::move(rho), ln_z, std::move(achieved));
  };

  auto [rho, ln_z, achieved] = evaluate(lambda);
  std::vector<double> residuals(k);
  auto refresh_residuals = [&]() {
    for (std::size_t i = 0; i < k; ++i) residuals[i] = achieved[i] - targets[i];
  };
  refresh_residuals();

  double objective = ln_z + detail::dot(lambda, targets);
  std::vector<double> history{objective};

  int iterations = 0;
  bool converged = false;

  for (; iterations < options.max_iterations; ++iterations) {
    double max_res = 0.0;
    for (double r : residuals) max_res = std::max(max_res, std::abs(r));
    if (max_res <= options.tolerance) {
      converged = true;
      break;
    }
    if (detail::norm2(lambda) > options.multiplier_cap) {
      throw BoundaryError(
          "solve_dual: multiplier norm exceeded cap " +
          std::to_string(options.multiplier_cap) +
          "; the targets sit on (or outside) the feasible boundary");
    }

    // Newton direction from C d = residual; gradient fallback on singular C.
    const std::vector<double> cov = detail::covariance_matrix(rho, obs, achieved);
    std::vector<double> direction;
    if (auto newton = detail::solve_spd(cov, residuals)) {
      direction = std::move(*newton);
    } else {
      direction = residuals;
    }
    bool finite = true;
    for (double x : direction) finite = finite && std::isfinite(x);
    if (!finite) direction = residuals;

    // Descent rate for D: grad D = -residuals, so grad D . d = -res . d.
    const double descent = detail::dot(residuals, direction);
    if (!(descent > 0.0)) break;  // no usable direction; report best iterate

    // Near the optimum the true decrease is O(|residual|^2), below what
    // doubles can resolve on an objective of order one; a round-off-sized
    // slack keeps the full Newton step acceptable there.
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() *
                         std::max(1.0, std::abs(objective));
    double step = 1.0;
    bool accepted = false;
    std::vector<double> trial(k);
    for (int halving = 0; halving <= 40; ++halving) {
      for (std::size_t i = 0; i < k; ++i) trial[i] = lambda[i] + step * direction[i];
      const double trial_obj =
          detail::ln_partition(obs, trial) + detail::dot(trial, targets);
      if (trial_obj <= objective - 1e-4 * step * descent + slack) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // stalled; report best iterate

    lambda = trial;
    std::tie(rho, ln_z, achieved) = evaluate(lambda);
    refresh_residuals();
    objective = ln_z + detail::dot(lambda, targets);
    history.push_back(objective);
  }

  if (!converged) {
    double max_res = 0.0;
    for (double r : residuals) max_res = std::max(max_res, std::abs(r));
    converged = max_res <= options.tolerance;
  }

  // S = ln Z + sum_i lambda_i <A_i>, exact for the Gibbs form.
  const double entropy = ln_z + detail::dot(lambda, achieved);

  return MaxEntSolution{std::move(lambda), std::move(rho),   ln_z,
                        entropy,           std::move(residuals), iterations,
                        converged,         std::move(history)};
}

/// S = ln Z + sum_i lambda_i a_i, the entropy of a converged solution
/// expressed through the dual variables and targets.
inline double entropy_from_dual(const MaxEntSolution& solution,
                                const ConstraintSet& constraints) {
  if (!solution.converged) {
    throw DomainError("entropy_from_dual: solution did not converge");
  }
  if (solution.multipliers.size() != constraints.size()) {
    throw DimensionError("entropy_from_dual: multiplier count mismatch");
  }
  return solution.ln_Z +
         detail::dot(solution.multipliers, constraints.targets());
}

/// Thermodynamic reading of the two-multiplier solution:
/// lambda1 = -beta, lambda2 = -beta mu, ln Z as the free energy.
/// mu is undefined at beta = 0 (lambda1 = 0) and reported as absent.
struct ThermoQuantities {
  double beta;
  std::optional<double> mu;
  double free_energy;
};

inline ThermoQuantities thermo_map(double lambda1, double lambda2,
                                   double ln_Z) {
  if (lambda1 == 0.0) {
    return {0.0, std::nullopt, ln_Z};
  }
  return {-lambda1, lambda2 / lambda1, ln_Z};
}

}  // namespace qmaxent
