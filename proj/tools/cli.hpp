#pragma once

// Batch front-end. Exit codes: 0 success, 1 input error, 2 a mathematical
// check failed.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace microlocal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitCheck = 2;

/// Everything a run can be configured with. `--config file.json` supplies the
/// same fields; flags on the command line win.
struct RunConfig {
  std::string command;
  std::string set;       // polyhedral, locally closed or conic set file
  std::string sheaf;     // stratified sheaf file
  std::string instance;  // perversity instance file
  std::string expect;    // expected conic subset file
  std::string f, g, phi;
  std::string x, xi;     // "a,b"
  std::optional<int> k;
  std::string which = "conormal";
  std::size_t samples = 500;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  double hypothesis_tol = 1e-9;
  bool floating = false;
  std::string mode = "exact";
  bool strict = false;
  std::string radius, inner_radius;
  std::string grid;            // "lo,hi,steps"
  std::string stencil_radius;  // rational
  std::string window = "-2,2";
  std::string output;
  std::string svg;
};

/// Reads a JSON run configuration; unknown fields are rejected.
RunConfig load_config(const std::string& path);

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace microlocal::cli
