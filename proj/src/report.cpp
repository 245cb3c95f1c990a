#include "locc/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace locc {

std::string format_report(double v) {
  if (std::abs(v) < 1e-300) v = 0.0;  // flush denormal dust and negative zero
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double round_report(double v) { return std::strtod(format_report(v).c_str(), nullptr); }

}  // namespace locc
