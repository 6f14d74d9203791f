#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qmaxent/problem_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "qmaxent: maximum-entropy quantum-state inference from expectation "
      "values"};
  app.require_subcommand(1);

  std::string problem_path;
  auto* solve = app.add_subcommand(
      "solve", "Solve a problem file and print the inferred state");
  solve->add_option("file", problem_path, "problem file (JSON)")->required();

  std::string sweep_path;
  std::string csv_path;
  auto* sweep = app.add_subcommand(
      "sweep", "Evaluate a (b, sigma2) grid and write a CSV table");
  sweep->add_option("file", sweep_path, "sweep file (JSON)")->required();
  sweep->add_option("--out", csv_path, "output CSV path")->required();

  double b = 0.0;
  double sigma2 = 0.0;
  auto* check = app.add_subcommand(
      "check", "Classify one (b, sigma2) constraint point");
  check->add_option("--b", b, "CHSH mean target")->required();
  check->add_option("--sigma2", sigma2, "CHSH second-moment target")->required();

  auto* verify = app.add_subcommand(
      "verify", "Run the closed-form-vs-solver self-check battery");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    // CLI11 returns 0 for --help; anything else is a usage error.
    return code == 0 ? qmaxent::kExitOk : qmaxent::kExitUsage;
  }

  if (solve->parsed()) {
    return qmaxent::cmd_solve(problem_path, std::cout, std::cerr);
  }
  if (sweep->parsed()) {
    return qmaxent::cmd_sweep(sweep_path, csv_path, std::cerr);
  }
  if (check->parsed()) {
    return qmaxent::cmd_check(b, sigma2, std::cout);
  }
  if (verify->parsed()) {
    return qmaxent::cmd_verify(std::cout);
  }
  return qmaxent::kExitUsage;
}
