#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace graphforms::cli {

enum ExitCode : int { kPassed = 0, kCheckFailed = 1, kInputError = 2 };

struct RunConfig {
  std::string subcommand;
  std::string graph_path;
  /// auto | text | json
  std::string format = "auto";
  std::optional<std::string> tree;
  std::optional<std::string> basis;
  std::uint64_t seed = 0;
  int max_loops = 6;
  int max_edges = 32;
  /// text | json
  std::string output = "text";

  std::string method;
  std::string suite = "all";
  std::vector<std::string> dodgson_a;
  std::vector<std::string> dodgson_b;
  int dipole_i = 1;
  bool integrate = false;
  std::string scheme = "quadrature";
  std::optional<std::uint64_t> samples;
  std::optional<double> tolerance;
  int edge = 1;
};

/// Parses argv, runs the subcommand and writes the report to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Runs an already parsed configuration.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace graphforms::cli
