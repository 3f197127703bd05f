#pragma once

#include <string>
#include <vector>

#include "sts/error.hpp"

namespace sts::verify {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Property suites behind `sts verify`. Each re-runs a module's invariants
// at a scale that keeps the whole `all` suite within a couple of minutes.
// corrupt_gradients deliberately perturbs the analytic gradient before
// comparison (negative-control fixture used by tests).
std::vector<Check> suite_encoding(uint64_t seed);
std::vector<Check> suite_gradients(uint64_t seed, bool corrupt_gradients = false);
std::vector<Check> suite_reduced(uint64_t seed);
std::vector<Check> suite_bounds(uint64_t seed);

// name in {encoding, gradients, reduced, bounds, all}.
std::vector<Check> run_suite(const std::string& name, uint64_t seed);

bool all_pass(const std::vector<Check>& checks);

}  // namespace sts::verify
