#ifndef LOCC_REPORT_HPP
#define LOCC_REPORT_HPP

#include <string>

namespace locc {

inline constexpr const char* kToolName = "loccsim";
inline constexpr const char* kToolVersion = "0.1.0";

// Report values are rounded to 12 significant digits before serialization so
// repeated runs and golden files compare byte for byte.
double round_report(double v);

// 12-significant-digit text form (used by the CSV writer).
std::string format_report(double v);

}  // namespace locc

#endif
