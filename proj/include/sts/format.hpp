#pragma once

#include <cstdio>
#include <string>

namespace sts {

// Shortest round-trip decimal formatting used by every CSV/JSON emitter,
// so reruns are byte-comparable.
inline std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace sts
