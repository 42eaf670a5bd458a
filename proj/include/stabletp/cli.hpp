#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stabletp::cli {

enum ExitCode : int { ok = 0, selftest_failure = 1, usage = 2, numeric_failure = 3, refutation = 10 };

// Parsed command line, merged with an optional JSON config file (command-line flags win).
struct RunConfig {
  std::string command;
  std::optional<double> alpha;
  std::optional<double> rho;
  std::optional<double> beta;
  std::optional<int> dim;
  std::string kernel;
  std::optional<int> order;
  std::uint64_t budget = 10000;
  std::uint64_t seed = 1234;
  int digits = 60;
  std::string grid;
  std::string format = "json";
  std::string out;
  bool quick = false;

  // Rejects missing or out-of-range fields for the chosen command; throws InvalidParams.
  void validate() const;
};

// "a:b:n" gives n equally spaced points from a to b inclusive, "log:a:b:n" n log-spaced points.
// Throws InvalidParams on malformed input, n < 1 or non-positive log bounds.
std::vector<double> parse_grid(const std::string& spec);

// Runs one command. args excludes the program name. Reports go to `out` unless --out is given;
// diagnostics go to `err`. Returns an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stabletp::cli
