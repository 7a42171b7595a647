#pragma once

#include <charconv>
#include <ostream>

namespace dlecc::detail {

// Streams a double as the shortest text that parses back to the same value.
struct Num {
  double v;
};

inline std::ostream& operator<<(std::ostream& os, Num n) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, n.v);
  return os.write(buf, r.ptr - buf);
}

}  // namespace dlecc::detail
