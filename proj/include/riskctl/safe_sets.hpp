#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "riskctl/grid.hpp"

namespace riskctl {

/// Membership of every grid node in a sublevel set.
struct SafeSetMask {
  GridPtr grid;
  std::vector<std::uint8_t> member;

  std::size_t count() const;
};

/// {x : value(x) <= r} over the nodes of the table's grid.
SafeSetMask sublevel_mask(const ValueTable& values, double r);

/// True iff every member of a is a member of b. InputError when the grids differ.
bool nesting_check(const SafeSetMask& a, const SafeSetMask& b);

/// Fraction of nodes on which the two masks agree. InputError when the grids differ.
double agreement_fraction(const SafeSetMask& a, const SafeSetMask& b);

/// CSV with header x1,...,xd,value,member and one row per node.
void write_safe_set_csv(std::ostream& out, const ValueTable& values, const SafeSetMask& mask);

}  // namespace riskctl
