#pragma once

#include <cstdint>
#include <string>

namespace sts::cmd {

// Command implementations shared by the C API and (through it) the CLI.
// Each returns a process exit code:
//   0 success, 1 config error, 2 PE sampling failure, 3 numerical
//   divergence, 4 verification failure.
// Diagnostics go to stderr; verify prints TAP lines to stdout.

int cmd_train(const std::string& config_json, const std::string& out_dir);
int cmd_ode(int T, int q, int d, double eta, long steps, const std::string& out_dir);
int cmd_lengthgen(const std::string& config_json, const std::string& out_dir);
int cmd_fcn(const std::string& config_json, const std::string& out_dir);
int cmd_verify(const std::string& suite, uint64_t seed);
int cmd_heatmap(const std::string& config_json, const std::string& out_dir);

}  // namespace sts::cmd
