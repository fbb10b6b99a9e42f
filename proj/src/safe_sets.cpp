#include "riskctl/safe_sets.hpp"

#include <algorithm>

#include "riskctl/csv.hpp"
#include "riskctl/error.hpp"

namespace riskctl {

namespace {

void check_same_grid(const SafeSetMask& a, const SafeSetMask& b) {
  if (!a.grid || !b.grid || a.member.size() != b.member.size() || !(*a.grid == *b.grid))
    throw InputError("safe-set masks are defined on different grids");
}

}  // namespace

std::size_t SafeSetMask::count() const {
  return static_cast<std::size_t>(std::count(member.begin(), member.end(), std::uint8_t{1}));
}

SafeSetMask sublevel_mask(const ValueTable& values, double r) {
  SafeSetMask mask{values.grid, std::vector<std::uint8_t>(values.values.size())};
  for (std::size_t i = 0; i < values.values.size(); ++i) mask.member[i] = values.values[i] <= r ? 1 : 0;
  return mask;
}

bool nesting_check(const SafeSetMask& a, const SafeSetMask& b) {
  check_same_grid(a, b);
  for (std::size_t i = 0; i < a.member.size(); ++i)
    if (a.member[i] && !b.member[i]) return false;
  return true;
}

double agreement_fraction(const SafeSetMask& a, const SafeSetMask& b) {
  check_same_grid(a, b);
  if (a.member.empty()) return 1.0;
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.member.size(); ++i) same += a.member[i] == b.member[i] ? 1 : 0;
  return static_cast<double>(same) / static_cast<double>(a.member.size());
}

void write_safe_set_csv(std::ostream& out, const ValueTable& values, const SafeSetMask& mask) {
  if (values.values.size() != mask.member.size()) throw InputError("mask and value table sizes differ");
  const Grid& g = *values.grid;
  for (std::size_t d = 0; d < g.dimension(); ++d) out << 'x' << (d + 1) << ',';
  out << "value,member\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point p = g.node(i);
    for (double x : p) out << csv::number(x) << ',';
    out << csv::number(values.values[i]) << ',' << int{mask.member[i]} << '\n';
  }
}

}  // namespace riskctl
