#include "riskctl/csv.hpp"

#include <charconv>

namespace riskctl::csv {

std::string number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace riskctl::csv
