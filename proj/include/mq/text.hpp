#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace mq {

// 17 significant digits, shortest-exact for doubles; infinity renders as "inf".
inline std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

}  // namespace mq
