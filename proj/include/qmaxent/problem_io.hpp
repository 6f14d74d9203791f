#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qmaxent/bell_chsh.hpp"
#include "qmaxent/errors.hpp"
#include "qmaxent/quantum_state.hpp"
#include "qmaxent/separability.hpp"
#include "qmaxent/solver.hpp"
#include "qmaxent/verification.hpp"

namespace qmaxent {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitVerifyFailed = 3;

/// All numbers are printed with 12 significant digits.
inline std::string format_sig(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

/// A parsed inference problem: named observables (builtin or explicit
/// matrices), parallel targets, and solver options.
struct ProblemSpec {
  std::vector<std::string> names;
  std::vector<std::string> builtins;  // "" for explicit matrices
  std::vector<HermitianObservable> observables;
  std::vector<double> targets;
  SolverOptions solver;

  bool is_canonical_pair() const {
    return builtins.size() == 2 && builtins[0] == "bell_chsh" &&
           builtins[1] == "bell_chsh_squared";
  }
  bool is_canonical_mean_only() const {
    return builtins.size() == 1 && builtins[0] == "bell_chsh";
  }
};

struct SweepRange {
  double start;
  double stop;
  int count;
};

enum class Sigma2Mode { absolute, fraction };

/// A sweep over the admissible (b, sigma2) region. In `fraction` mode the
/// sigma2 coordinate interpolates between the per-b bounds 2*sqrt(2) b
/// and 8; in `absolute` mode it is taken literally and clipped per b.
struct SweepSpec {
  SweepRange b;
  Sigma2Mode sigma2_mode;
  SweepRange sigma2;
};

namespace detail {

inline double json_number(const nlohmann::json& j, const std::string& field) {
  if (!j.contains(field) || !j[field].is_number()) {
    throw ParseError("missing or non-numeric field '" + field + "'");
  }
  return j[field].get<double>();
}

inline ComplexSquareMatrix parse_matrix(const nlohmann::json& j,
                                        const std::string& name) {
  if (!j.is_array() || j.empty()) {
    throw ParseError("observable '" + name + "': 'matrix' must be a non-empty array of rows");
  }
  const std::size_t d = j.size();
  ComplexSquareMatrix m(d);
  for (std::size_t i = 0; i < d; ++i) {
    const auto& row = j[i];
    if (!row.is_array() || row.size() != d) {
      throw ParseError("observable '" + name + "': row " + std::to_string(i) +
                       " must hold " + std::to_string(d) + " entries");
    }
    for (std::size_t k = 0; k < d; ++k) {
      const auto& entry = row[k];
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
          !entry[1].is_number()) {
        throw ParseError("observable '" + name + "': entry (" +
                         std::to_string(i) + ", " + std::to_string(k) +
                         ") must be a [re, im] pair");
      }
      m(i, k) = complexd(entry[0].get<double>(), entry[1].get<double>());
    }
  }
  return m;
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open file '" + path + "'");
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

}  // namespace detail

inline ProblemSpec parse_problem(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("observables") ||
      !j["observables"].is_array() || j["observables"].empty()) {
    throw ParseError("problem file must hold a non-empty 'observables' array");
  }
  if (!j.contains("targets") || !j["targets"].is_array()) {
    throw ParseError("problem file must hold a 'targets' array");
  }

  ProblemSpec spec;
  std::set<std::string> seen;
  for (const auto& entry : j["observables"]) {
    if (!entry.is_object() || !entry.contains("name") ||
        !entry["name"].is_string()) {
      throw ParseError("every observable needs a string 'name'");
    }
    const std::string name = entry["name"].get<std::string>();
    if (!seen.insert(name).second) {
      throw ParseError("duplicate observable name '" + name + "'");
    }
    const bool has_builtin = entry.contains("builtin");
    const bool has_matrix = entry.contains("matrix");
    if (has_builtin == has_matrix) {
      throw ParseError("observable '" + name +
                       "': exactly one of 'builtin' or 'matrix' required");
    }
    if (has_builtin) {
      const std::string b = entry["builtin"].get<std::string>();
      if (b == "bell_chsh") {
        spec.observables.push_back(bell_chsh_operator());
      } else if (b == "bell_chsh_squared") {
        spec.observables.push_back(bell_chsh_squared());
      } else {
        throw ParseError("observable '" + name + "': unknown builtin '" + b +
                         "' (expected bell_chsh or bell_chsh_squared)");
      }
      spec.builtins.push_back(b);
    } else {
      try {
        spec.observables.emplace_back(detail::parse_matrix(entry["matrix"], name));
      } catch (const InvariantError& e) {
        throw ParseError("observable '" + name + "': " + e.what());
      }
      spec.builtins.emplace_back();
    }
    spec.names.push_back(name);
  }

  for (const auto& t : j["targets"]) {
    if (!t.is_number()) throw ParseError("'targets' entries must be numbers");
    spec.targets.push_back(t.get<double>());
  }
  if (spec.targets.size() != spec.observables.size()) {
    throw ParseError("'targets' length (" + std::to_string(spec.targets.size()) +
                     ") must match 'observables' length (" +
                     std::to_string(spec.observables.size()) + ")");
  }

  if (j.contains("solver")) {
    const auto& s = j["solver"];
    if (!s.is_object()) throw ParseError("'solver' must be an object");
    if (s.contains("tolerance")) spec.solver.tolerance = detail::json_number(s, "tolerance");
    if (s.contains("max_iterations")) {
      spec.solver.max_iterations = static_cast<int>(detail::json_number(s, "max_iterations"));
    }
    if (s.contains("multiplier_cap")) {
      spec.solver.multiplier_cap = detail::json_number(s, "multiplier_cap");
    }
  }
  return spec;
}

inline ProblemSpec load_problem_file(const std::string& path) {
  return parse_problem(detail::load_json_file(path));
}

inline SweepSpec parse_sweep(const nlohmann::json& j) {
  auto parse_range = [](const nlohmann::json& r, const std::string& which) {
    if (!r.is_object()) throw ParseError("'" + which + "' must be an object");
    SweepRange range{detail::json_number(r, "start"),
                     detail::json_number(r, "stop"),
                     static_cast<int>(detail::json_number(r, "count"))};
    if (range.count < 2) {
      throw ParseError("'" + which + "': count must be >= 2");
    }
    return range;
  };
  if (!j.is_object() || !j.contains("b") || !j.contains("sigma2")) {
    throw ParseError("sweep file must hold 'b' and 'sigma2' objects");
  }
  SweepSpec spec{parse_range(j["b"], "b"), Sigma2Mode::fraction,
                 parse_range(j["sigma2"], "sigma2")};
  const auto& s = j["sigma2"];
  if (!s.contains("mode") || !s["mode"].is_string()) {
    throw ParseError("'sigma2' needs a 'mode' of \"absolute\" or \"fraction\"");
  }
  const std::string mode = s["mode"].get<std::string>();
  if (mode == "absolute") {
    spec.sigma2_mode = Sigma2Mode::absolute;
  } else if (mode == "fraction") {
    spec.sigma2_mode = Sigma2Mode::fraction;
  } else {
    throw ParseError("unknown sigma2 mode '" + mode + "'");
  }
  if (j.contains("outputs")) {
    if (!j["outputs"].is_array()) throw ParseError("'outputs' must be an array");
    for (const auto& o : j["outputs"]) {
      if (!o.is_string() || o.get<std::string>() != "csv") {
        throw ParseError("'outputs' supports only \"csv\"");
      }
    }
  }
  return spec;
}

inline SweepSpec load_sweep_file(const std::string& path) {
  return parse_sweep(detail::load_json_file(path));
}

namespace detail {

inline void print_matrix(std::ostream& out, const ComplexSquareMatrix& m,
                         const std::string& indent) {
  for (std::size_t i = 0; i < m.dim(); ++i) {
    out << indent;
    for (std::size_t j = 0; j < m.dim(); ++j) {
      const complexd e = m(i, j);
      out << "(" << format_sig(e.real()) << ", " << format_sig(e.imag()) << ")";
      if (j + 1 < m.dim()) out << "  ";
    }
    out << "\n";
  }
}

inline ComplexSquareMatrix to_bell_basis(const ComplexSquareMatrix& m) {
  const auto bell = bell_basis_vectors();
  ComplexSquareMatrix r(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      complexd s(0.0, 0.0);
      for (std::size_t a = 0; a < 4; ++a) {
        complexd row(0.0, 0.0);
        for (std::size_t c = 0; c < 4; ++c) row += m(a, c) * bell[j][c];
        s += std::conj(bell[i][a]) * row;
      }
      r(i, j) = s;
    }
  return r;
}

}  // namespace detail

/// Solve the problem in `path` and print a full report: multipliers, ln Z,
/// entropy, the state in both bases, residuals, separability, the
/// dispersion bound, and the thermodynamic reading. Exit 0 on convergence.
inline int cmd_solve(const std::string& path, std::ostream& out,
                     std::ostream& err) {
  ProblemSpec spec;
  try {
    spec = load_problem_file(path);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  // For the canonical constraint pair the admissible region is known in
  // closed form; report infeasible combinations before solving.
  if (spec.is_canonical_pair()) {
    const RegionClass region =
        classify_constraint_point(spec.targets[0], spec.targets[1]);
    if (region == RegionClass::infeasible) {
      err << "error: infeasible targets: (b = " << format_sig(spec.targets[0])
          << ", sigma2 = " << format_sig(spec.targets[1])
          << ") violates 0 <= b <= 2*sqrt(2), 2*sqrt(2)*b <= sigma2 <= 8\n";
      return kExitInfeasible;
    }
  }

  try {
    const ConstraintSet constraints(spec.observables, spec.targets);
    const MaxEntSolution sol = solve_dual(constraints, spec.solver);

    out << "problem: " << path << "\n";
    out << "dim: " << constraints.dim() << "\n";
    out << "converged: " << (sol.converged ? "true" : "false") << "\n";
    out << "iterations: " << sol.iterations << "\n";
    out << "constraints:\n";
    for (std::size_t i = 0; i < spec.names.size(); ++i) {
      out << "  " << spec.names[i] << ": target " << format_sig(spec.targets[i])
          << ", achieved " << format_sig(spec.targets[i] + sol.residuals[i])
          << ", residual " << format_sig(sol.residuals[i]) << "\n";
    }
    out << "multipliers:\n";
    for (std::size_t i = 0; i < spec.names.size(); ++i) {
      out << "  lambda[" << spec.names[i]
          << "]: " << format_sig(sol.multipliers[i]) << "\n";
    }
    out << "ln_Z: " << format_sig(sol.ln_Z) << "\n";
    out << "entropy: " << format_sig(sol.entropy) << "\n";
    out << "state (computational basis):\n";
    detail::print_matrix(out, sol.state.matrix(), "  ");

    if (constraints.dim() == 4) {
      out << "state (bell basis):\n";
      detail::print_matrix(out, detail::to_bell_basis(sol.state.matrix()), "  ");

      const SeparabilityVerdict ppt = ppt_check(sol.state);
      out << "separability (ppt): "
          << (ppt.separable ? "separable" : "inseparable")
          << ", min partial-transpose eigenvalue " << format_sig(ppt.margin)
          << "\n";

      const double b_achieved = expectation(sol.state, bell_chsh_operator());
      const double s2_achieved = expectation(sol.state, bell_chsh_squared());
      const double bound = kChshMax * b_achieved;
      out << "uncertainty bound: sigma2 " << format_sig(s2_achieved)
          << " >= 2*sqrt(2)*b " << format_sig(bound) << " ("
          << (s2_achieved >= bound - 1e-10 ? "satisfied" : "VIOLATED")
          << ", slack " << format_sig(s2_achieved - bound) << ")\n";

      if (spec.is_canonical_pair()) {
        out << "region: "
            << to_string(classify_constraint_point(spec.targets[0],
                                                   spec.targets[1]))
            << "\n";
        out << "inseparability threshold: "
            << format_sig(inseparability_threshold(spec.targets[0])) << "\n";
      }
    }

    if (sol.multipliers.size() <= 2) {
      const double l1 = sol.multipliers[0];
      const double l2 = sol.multipliers.size() == 2 ? sol.multipliers[1] : 0.0;
      const ThermoQuantities thermo = thermo_map(l1, l2, sol.ln_Z);
      out << "thermo: beta " << format_sig(thermo.beta) << ", mu "
          << (thermo.mu ? format_sig(*thermo.mu) : std::string("undefined"))
          << ", free_energy " << format_sig(thermo.free_energy) << "\n";
    }

    if (!sol.converged) {
      err << "error: solver did not converge after " << sol.iterations
          << " iterations; worst residual "
          << format_sig(*std::max_element(
                 sol.residuals.begin(), sol.residuals.end(),
                 [](double a, double b) { return std::abs(a) < std::abs(b); }))
          << "\n";
      return kExitInfeasible;
    }
    return kExitOk;
  } catch (const InfeasibilityError& e) {
    err << "error: infeasible targets: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const BoundaryError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

namespace detail {

struct SweepRow {
  double b;
  double sigma2;
  std::optional<double> lambda1;
  std::optional<double> lambda2;
  std::optional<double> ln_z;
  double entropy;
  std::array<double, 4> p;
  bool separable;
  RegionClass region;
};

inline SweepRow sweep_row_at(double b, double sigma2, std::ostream& warn) {
  const ConstraintPoint point(b, sigma2);
  const RegionClass region = point.region();
  SweepRow row{b, sigma2, {}, {}, {}, 0.0, {}, false, region};

  bool use_closed_form = region != RegionClass::interior;
  if (!use_closed_form) {
    try {
      const MaxEntSolution sol = solve_dual(canonical_constraints(b, sigma2));
      if (sol.converged) {
        row.lambda1 = sol.multipliers[0];
        row.lambda2 = sol.multipliers[1];
        row.ln_z = sol.ln_Z;
        row.entropy = sol.entropy;
        row.p = bell_probabilities(sol.state);
      } else {
        use_closed_form = true;
        warn << "warning: solver did not converge at (b = " << format_sig(b)
             << ", sigma2 = " << format_sig(sigma2)
             << "); falling back to the closed form\n";
      }
    } catch (const Error& e) {
      use_closed_form = true;
      warn << "warning: solver failed at (b = " << format_sig(b)
           << ", sigma2 = " << format_sig(sigma2) << "): " << e.what()
           << "; falling back to the closed form\n";
    }
  }
  if (use_closed_form) {
    const BellDiagonalState state = two_constraint_state(point);
    row.entropy = state.entropy();
    row.p = state.probabilities();
  }

  double clamped[4];
  for (std::size_t i = 0; i < 4; ++i) row.p[i] = clamped[i] = std::clamp(row.p[i], 0.0, 1.0);
  row.separable =
      bell_diagonal_separable(
          BellDiagonalState(clamped[0], clamped[1], clamped[2], clamped[3]))
          .separable;
  return row;
}

}  // namespace detail

/// Run a (b, sigma2) sweep and write one CSV row per grid point, b-major,
/// both coordinates ascending. Interior points carry solver output; boundary
/// points use the closed-form state and leave the dual fields empty.
inline int cmd_sweep(const std::string& sweep_path, const std::string& csv_path,
                     std::ostream& err) {
  SweepSpec spec;
  try {
    spec = load_sweep_file(sweep_path);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  // Clip the b range into [0, 2*sqrt(2)].
  double b_start = spec.b.start;
  double b_stop = spec.b.stop;
  if (b_start > b_stop) std::swap(b_start, b_stop);
  if (b_start < 0.0 || b_stop > kChshMax) {
    err << "warning: b range [" << format_sig(b_start) << ", "
        << format_sig(b_stop) << "] clipped to [0, 2*sqrt(2)]\n";
    b_start = std::max(b_start, 0.0);
    b_stop = std::min(b_stop, kChshMax);
  }
  if (b_start > b_stop) {
    err << "error: empty feasible intersection for the b range\n";
    return kExitInfeasible;
  }

  std::vector<detail::SweepRow> rows;
  for (double b : detail::linspace(b_start, b_stop, spec.b.count)) {
    const double lo = kChshMax * b;
    double s_start, s_stop;
    if (spec.sigma2_mode == Sigma2Mode::fraction) {
      double f0 = spec.sigma2.start;
      double f1 = spec.sigma2.stop;
      if (f0 > f1) std::swap(f0, f1);
      if (f0 < 0.0 || f1 > 1.0) {
        err << "warning: fraction range clipped to [0, 1] at b = "
            << format_sig(b) << "\n";
        f0 = std::max(f0, 0.0);
        f1 = std::min(f1, 1.0);
      }
      s_start = lo + f0 * (8.0 - lo);
      s_stop = lo + f1 * (8.0 - lo);
    } else {
      s_start = spec.sigma2.start;
      s_stop = spec.sigma2.stop;
      if (s_start > s_stop) std::swap(s_start, s_stop);
      if (s_start < lo || s_stop > 8.0) {
        const double c0 = std::max(s_start, lo);
        const double c1 = std::min(s_stop, 8.0);
        if (c0 > c1) {
          err << "warning: sigma2 range [" << format_sig(s_start) << ", "
              << format_sig(s_stop) << "] has no feasible values at b = "
              << format_sig(b) << "; skipping\n";
          continue;
        }
        err << "warning: sigma2 range clipped to [" << format_sig(c0) << ", "
            << format_sig(c1) << "] at b = " << format_sig(b) << "\n";
        s_start = c0;
        s_stop = c1;
      }
    }
    for (double s2 : detail::linspace(s_start, s_stop, spec.sigma2.count)) {
      rows.push_back(detail::sweep_row_at(b, std::min(s2, 8.0), err));
    }
  }

  if (rows.empty()) {
    err << "error: empty feasible intersection; no rows to write\n";
    return kExitInfeasible;
  }

  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) {
    err << "error: cannot open output file '" << csv_path << "'\n";
    return kExitUsage;
  }
  csv << "b,sigma2,lambda1,lambda2,ln_Z,entropy,p_phi_plus,p_psi_minus,"
         "p_phi_minus,p_psi_plus,separable,region\n";
  for (const auto& row : rows) {
    csv << format_sig(row.b) << "," << format_sig(row.sigma2) << ","
        << (row.lambda1 ? format_sig(*row.lambda1) : "") << ","
        << (row.lambda2 ? format_sig(*row.lambda2) : "") << ","
        << (row.ln_z ? format_sig(*row.ln_z) : "") << ","
        << format_sig(row.entropy) << "," << format_sig(row.p[0]) << ","
        << format_sig(row.p[1]) << "," << format_sig(row.p[2]) << ","
        << format_sig(row.p[3]) << "," << (row.separable ? "true" : "false")
        << "," << to_string(row.region) << "\n";
  }
  return kExitOk;
}

/// Classify one (b, sigma2) point: region, dispersion bound, inseparability
/// threshold, and the verdict for the matching maximum-entropy state.
inline int cmd_check(double b, double sigma2, std::ostream& out) {
  out << "point: b = " << format_sig(b) << ", sigma2 = " << format_sig(sigma2)
      << "\n";
  const RegionClass region = classify_constraint_point(b, sigma2);
  out << "region: " << to_string(region) << "\n";
  if (region == RegionClass::infeasible) {
    out << "feasibility requires 0 <= b <= 2*sqrt(2) and 2*sqrt(2)*b <= "
           "sigma2 <= 8\n";
    return kExitInfeasible;
  }

  const double bound = uncertainty_lower_bound(b);
  const double threshold = inseparability_threshold(b);
  out << "uncertainty_lower_bound: " << format_sig(bound) << "\n";
  out << "inseparability_threshold: " << format_sig(threshold) << "\n";
  if (std::abs(sigma2 - threshold) <= kFeasibilityTol) {
    out << "threshold_status: boundary (sigma2 equals 8 - 2*sqrt(2)*b; along "
           "the minimum-uncertainty line this happens at b = sqrt(2))\n";
  } else if (sigma2 > threshold) {
    out << "threshold_status: above (inseparable)\n";
  } else {
    out << "threshold_status: below (separable)\n";
  }

  const BellDiagonalState state = two_constraint_state(ConstraintPoint(b, sigma2));
  const auto& p = state.probabilities();
  out << "state: p_phi_plus " << format_sig(p[0]) << ", p_psi_minus "
      << format_sig(p[1]) << ", p_phi_minus " << format_sig(p[2])
      << ", p_psi_plus " << format_sig(p[3]) << "\n";
  const SeparabilityVerdict verdict = bell_diagonal_separable(state);
  out << "verdict: " << (verdict.separable ? "separable" : "inseparable")
      << " (max eigenvalue " << format_sig(verdict.max_eigenvalue)
      << ", margin " << format_sig(verdict.margin) << ")\n";
  return kExitOk;
}

/// Run the full self-check battery; one line per suite with its worst
/// residual, exit 0 only if every suite passes.
inline int cmd_verify(std::ostream& out) {
  const std::vector<SuiteResult> results = run_verification_suites();
  bool all_passed = true;
  for (const SuiteResult& r : results) {
    out << "suite " << r.name << ": " << (r.passed ? "PASS" : "FAIL")
        << " (worst residual " << format_sig(r.worst_residual) << ", tolerance "
        << format_sig(r.tolerance) << ")\n";
    if (!r.passed) {
      out << "  " << r.detail << "\n";
      all_passed = false;
    }
  }
  out << "verification: " << (all_passed ? "PASS" : "FAIL") << " ("
      << results.size() << " suites)\n";
  return all_passed ? kExitOk : kExitVerifyFailed;
}

}  // namespace qmaxent
