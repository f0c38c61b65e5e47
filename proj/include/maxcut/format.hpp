#pragma once

#include <charconv>
#include <string>

#include "maxcut/types.hpp"

namespace maxcut {

// Shortest decimal form that parses back to the identical double.
inline std::string format_number(Scalar value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace maxcut
