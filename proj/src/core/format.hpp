#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <span>
#include <string>

namespace hesslab {

/// Round-trip text for a double: 17 significant digits, '.' decimal point,
/// independent of the process locale.
inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline void write_joined(std::ostream& os, std::span<const double> xs, char sep = ',') {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) os << sep;
    os << fmt(xs[i]);
  }
}

} // namespace hesslab
