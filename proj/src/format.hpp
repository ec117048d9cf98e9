#pragma once

#include <cstdio>
#include <string>

namespace gaitkit {

// All report output goes through one formatter (6 significant digits) so
// repeated runs produce byte-identical files.
inline std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace gaitkit
