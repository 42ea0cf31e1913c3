#pragma once

// Locale-independent number formatting shared by every text output.

#include <cmath>
#include <cstdio>
#include <string>

namespace ccr {

namespace detail {

inline std::string printf_double(const char* fmt, int prec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, prec, v);
  std::string s(buf);
  // "-0.000" and friends read as noise in reports.
  if (s.front() == '-' && s.find_first_not_of("-0.e+") == std::string::npos) s.erase(0, 1);
  return s;
}

}  // namespace detail

/// Fixed-point with `decimals` digits after the point.
inline std::string fixed(double v, int decimals) { return detail::printf_double("%.*f", decimals, v); }

/// At most `digits` significant digits, trailing zeros dropped.
inline std::string compact(double v, int digits = 6) { return detail::printf_double("%.*g", digits, v); }

}  // namespace ccr
