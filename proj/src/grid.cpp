#include "riskctl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "riskctl/error.hpp"

namespace riskctl {

Point::Point(std::initializer_list<double> values) {
  if (values.size() > kMaxAxes) throw InputError("point has too many components");
  for (double x : values) v_[size_++] = x;
}

Point::Point(std::span<const double> values) {
  if (values.size() > kMaxAxes) throw InputError("point has too many components");
  for (double x : values) v_[size_++] = x;
}

void Point::push_back(double x) {
  if (size_ == kMaxAxes) throw InputError("point has too many components");
  v_[size_++] = x;
}

bool operator==(const Point& a, const Point& b) {
  return a.size_ == b.size_ && std::equal(a.begin(), a.end(), b.begin());
}

Axis::Axis(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw InputError("grid axis needs at least 2 nodes");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!std::isfinite(nodes_[i])) throw InputError("grid axis node is not finite");
    if (i > 0 && !(nodes_[i] > nodes_[i - 1]))
      throw InputError("grid axis nodes must be strictly increasing (node " + std::to_string(i) + ")");
  }
  if (nodes_.size() > UINT32_MAX) throw InputError("grid axis too large");
}

Axis Axis::uniform(double lo, double hi, std::size_t intervals) {
  if (intervals < 1 || !(hi > lo)) throw InputError("uniform axis needs hi > lo and >= 1 interval");
  std::vector<double> nodes(intervals + 1);
  const double step = (hi - lo) / static_cast<double>(intervals);
  for (std::size_t i = 0; i < intervals; ++i) nodes[i] = lo + static_cast<double>(i) * step;
  nodes[intervals] = hi;
  return Axis(std::move(nodes));
}

double Axis::clamp(double x) const noexcept { return std::clamp(x, nodes_.front(), nodes_.back()); }

AxisLocation Axis::locate(double x) const noexcept {
  x = clamp(x);
  const std::size_t last = nodes_.size() - 1;
  // First node strictly greater than x, so a node hit lands at the left end of its cell.
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - nodes_.begin());
  if (hi > last) hi = last;
  if (hi == 0) hi = 1;
  const std::size_t lo = hi - 1;
  const double w = (x - nodes_[lo]) / (nodes_[hi] - nodes_[lo]);
  return {static_cast<std::uint32_t>(lo), w};
}

std::size_t Axis::nearest(double x) const noexcept {
  const AxisLocation loc = locate(x);
  return loc.weight > 0.5 ? loc.index + 1 : loc.index;
}

Grid::Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > kMaxAxes) throw InputError("grid must have 1 to 3 axes");
  size_ = 1;
  for (std::size_t d = axes_.size(); d-- > 0;) {
    strides_[d] = size_;
    size_ *= axes_[d].size();
  }
}

Point Grid::node(std::size_t flat) const {
  Point p;
  for (std::size_t d = 0; d < axes_.size(); ++d) p.push_back(axes_[d][(flat / strides_[d]) % axes_[d].size()]);
  return p;
}

std::size_t Grid::flat_index(std::span<const std::size_t> multi) const {
  if (multi.size() != axes_.size()) throw InputError("index dimension mismatch");
  std::size_t flat = 0;
  for (std::size_t d = 0; d < axes_.size(); ++d) {
    if (multi[d] >= axes_[d].size()) throw InputError("grid index out of range");
    flat += multi[d] * strides_[d];
  }
  return flat;
}

Point Grid::clamp(const Point& p) const {
  if (p.size() != axes_.size()) throw InputError("point dimension does not match grid");
  Point out;
  for (std::size_t d = 0; d < axes_.size(); ++d) out.push_back(axes_[d].clamp(p[d]));
  return out;
}

std::size_t Grid::nearest(const Point& p) const {
  if (p.size() != axes_.size()) throw InputError("point dimension does not match grid");
  std::size_t flat = 0;
  for (std::size_t d = 0; d < axes_.size(); ++d) flat += axes_[d].nearest(p[d]) * strides_[d];
  return flat;
}

bool Grid::contains(const Point& p) const {
  if (p.size() != axes_.size()) return false;
  for (std::size_t d = 0; d < axes_.size(); ++d)
    if (!(p[d] >= axes_[d].front() && p[d] <= axes_[d].back())) return false;
  return true;
}

std::size_t Grid::stencil(const Point& p, std::span<std::uint32_t> index, std::span<double> weight) const {
  if (p.size() != axes_.size()) throw InputError("point dimension does not match grid");
  const std::size_t dim = axes_.size();
  const std::size_t corners = std::size_t{1} << dim;
  if (index.size() < corners || weight.size() < corners) throw InputError("stencil buffer too small");
  std::array<AxisLocation, kMaxAxes> loc{};
  for (std::size_t d = 0; d < dim; ++d) loc[d] = axes_[d].locate(p[d]);
  for (std::size_t c = 0; c < corners; ++c) {
    std::size_t flat = 0;
    double w = 1.0;
    for (std::size_t d = 0; d < dim; ++d) {
      // Corner bit for axis d; axis 0 is the most significant bit.
      const bool upper = (c >> (dim - 1 - d)) & 1u;
      flat += (loc[d].index + (upper ? 1u : 0u)) * strides_[d];
      w *= upper ? loc[d].weight : 1.0 - loc[d].weight;
    }
    index[c] = static_cast<std::uint32_t>(flat);
    weight[c] = w;
  }
  return corners;
}

ValueTable::ValueTable(int t, GridPtr g) : time(t), grid(std::move(g)), values(grid->size(), 0.0) {}

ValueTable::ValueTable(int t, GridPtr g, std::vector<double> v) : time(t), grid(std::move(g)), values(std::move(v)) {
  if (!grid || values.size() != grid->size()) throw InputError("value table size does not match grid");
}

double ValueTable::min() const { return *std::min_element(values.begin(), values.end()); }
double ValueTable::max() const { return *std::max_element(values.begin(), values.end()); }

double interpolate(const Grid& grid, std::span<const double> values, const Point& point) {
  if (values.size() != grid.size()) throw InputError("value array does not match grid");
  std::array<std::uint32_t, 1u << kMaxAxes> idx{};
  std::array<double, 1u << kMaxAxes> w{};
  const std::size_t corners = grid.stencil(point, idx, w);
  double acc = 0.0;
  for (std::size_t c = 0; c < corners; ++c) acc = acc + w[c] * values[idx[c]];
  return acc;
}

double interpolate(const ValueTable& table, const Point& point) {
  if (!table.grid) throw InputError("value table has no grid");
  return interpolate(*table.grid, table.values, point);
}

}  // namespace riskctl
