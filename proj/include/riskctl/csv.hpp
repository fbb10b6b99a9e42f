#pragma once

#include <string>

namespace riskctl::csv {

/// Shortest text that parses back to the same double.
std::string number(double v);

}  // namespace riskctl::csv
