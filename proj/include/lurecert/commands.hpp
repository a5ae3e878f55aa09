#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace lurecert {

/// Shared command-line options; unset numeric overrides stay negative.
struct CommandOptions {
  std::string config_path;
  std::string out_dir;
  double dt = -1.0;
  double horizon = -1.0;
  std::int64_t seed = -1;
  double tol = -1.0;
  bool plots = false;
  int threads = 0;  // 0: LURECERT_THREADS or hardware concurrency
  std::ostream* stream = nullptr;  // defaults to std::cout
};

/// Exit codes: 0 success, 1 mathematical failure (infeasible certificate,
/// violated estimate, invalid bracket), 2 usage or configuration error.
int cmd_certify(const CommandOptions& opt);
int cmd_threshold(const CommandOptions& opt);
int cmd_simulate(const CommandOptions& opt);
int cmd_verify(const CommandOptions& opt);
int cmd_equilibrium(const CommandOptions& opt);
int cmd_example1(const CommandOptions& opt);
int cmd_example2(const CommandOptions& opt);

}  // namespace lurecert
