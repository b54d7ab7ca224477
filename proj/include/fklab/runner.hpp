#pragma once

#include <cstdint>
#include <string>

#include "fklab/io.hpp"

namespace fk {

// One parsed invocation; every field is echoed into the artifact so a run
// can be reproduced from its own output.
struct RunConfig {
  std::string subcommand;
  std::string family = "fk_nn";
  double lambda = 1.0;
  long p = 5;
  long q = 3;
  double eps = 0.01;
  int k = 2;
  int r = 1;
  std::string gamma = "1";
  std::string sigma = "14";
  double tol = 1e-10;
  int starts = 20;
  std::uint64_t seed = 1;
  std::string mode = "exact";    // "exact" or "relaxed:<factor>"
  std::string omega = "golden";  // RotationSpec::parse syntax
  std::string out;               // artifact path ("" = stdout)
  long i1 = 0;
  long i2 = 200;
  double xi_minus = 0.2;
  double xi_plus = 0.5;
  std::string input;  // CSV config or certificate JSON, per subcommand
  long search_bound = 1000000;

  json echo() const;
};

struct RunResult {
  json artifact;
  bool pass = true;
};

// Executes a subcommand in-process (the CLI is a thin wrapper; keeping the
// logic here makes determinism directly testable).  Throws
// std::invalid_argument for unknown subcommands.
RunResult run_config(const RunConfig& rc);

// "3/5", "0.25", "1e-6", "2.5e3", "7" -> exact rational.
Rat parse_rat(const std::string& text);

}  // namespace fk
