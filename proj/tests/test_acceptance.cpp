// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fail. Criteria 1-10 run the library's self-check battery in-process;
// criterion 11 drives the installed CLI binary.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "qmaxent/problem_io.hpp"
#include "qmaxent/verification.hpp"

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool passed,
            const std::string& detail) {
  std::cout << (passed ? "[PASS]" : "[FAIL]") << " criterion " << number
            << ": " << name << " | " << detail << "\n";
  if (!passed) ++g_failures;
}

void report_suite(int number, const qmaxent::SuiteResult& r) {
  report(number, r.name, r.passed,
         "worst residual " + qmaxent::format_sig(r.worst_residual) +
             " (tolerance " + qmaxent::format_sig(r.tolerance) + "); " +
             r.detail);
}

int run_command(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status == -1) return -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_11_cli() {
  const std::string cli = QMAXENT_CLI_BIN;
  const auto tmp = std::filesystem::temp_directory_path();
  const auto log = tmp / "qmaxent_accept_verify.log";
  const auto sweep_file = tmp / "qmaxent_accept_sweep.json";
  const auto csv_a = tmp / "qmaxent_accept_a.csv";
  const auto csv_b = tmp / "qmaxent_accept_b.csv";

  {
    std::ofstream out(sweep_file);
    out << R"({"b": {"start": 0.3, "stop": 2.5, "count": 6},
               "sigma2": {"mode": "fraction", "start": 0.0, "stop": 1.0,
                          "count": 5}})";
  }

  const int verify_code =
      run_command("'" + cli + "' verify > '" + log.string() + "' 2>&1");
  const int sweep_a = run_command("'" + cli + "' sweep '" +
                                  sweep_file.string() + "' --out '" +
                                  csv_a.string() + "' 2>/dev/null");
  const int sweep_b = run_command("'" + cli + "' sweep '" +
                                  sweep_file.string() + "' --out '" +
                                  csv_b.string() + "' 2>/dev/null");
  const std::string bytes_a = read_file(csv_a);
  const bool identical = !bytes_a.empty() && bytes_a == read_file(csv_b);

  report(11, "verify-subcommand-and-csv-determinism",
         verify_code == 0 && sweep_a == 0 && sweep_b == 0 && identical,
         "verify exit " + std::to_string(verify_code) + "; sweep exits " +
             std::to_string(sweep_a) + "/" + std::to_string(sweep_b) +
             "; CSV reruns " + (identical ? "byte-identical" : "DIFFER"));

  std::filesystem::remove(log);
  std::filesystem::remove(sweep_file);
  std::filesystem::remove(csv_a);
  std::filesystem::remove(csv_b);
}

}  // namespace

int main() {
  using namespace qmaxent;

  report_suite(1, verify_state_oracle_equivalence());
  report_suite(2, verify_multiplier_oracle_equivalence());
  report_suite(3, verify_dispersion_identity());
  report_suite(4, verify_dispersion_gap());
  report_suite(5, verify_uncertainty_universality());
  report_suite(6, verify_separability_thresholds());

  const SuiteResult identity = verify_entropy_identity();
  const SuiteResult ordering = verify_entropy_ordering();
  report(7, "entropy-identities", identity.passed && ordering.passed,
         identity.detail + "; " + ordering.detail);

  report_suite(8, verify_pure_state_corner());
  report_suite(9, verify_gradient_check());
  report_suite(10, verify_relative_entropy());

  criterion_11_cli();

  std::cout << (g_failures == 0 ? "acceptance: PASS"
                                : "acceptance: FAIL (" +
                                      std::to_string(g_failures) +
                                      " criteria)")
            << "\n";
  return g_failures == 0 ? 0 : 1;
}
