#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <vector>

namespace riskctl {

inline constexpr std::size_t kMaxAxes = 3;

/// Small fixed-capacity point used for states (1 or 2 components) and augmented
/// (state, budget) points.
class Point {
 public:
  Point() = default;
  Point(std::initializer_list<double> values);
  explicit Point(std::span<const double> values);

  std::size_t size() const noexcept { return size_; }
  double operator[](std::size_t i) const noexcept { return v_[i]; }
  double& operator[](std::size_t i) noexcept { return v_[i]; }
  void push_back(double x);

  const double* begin() const noexcept { return v_.data(); }
  const double* end() const noexcept { return v_.data() + size_; }

  friend bool operator==(const Point& a, const Point& b);

 private:
  std::array<double, kMaxAxes> v_{};
  std::size_t size_ = 0;
};

using State = Point;

/// Cell location of a coordinate on one axis: value = (1-weight)*node[index] + weight*node[index+1].
struct AxisLocation {
  std::uint32_t index;
  double weight;
};

/// Strictly increasing node coordinates along one axis.
class Axis {
 public:
  explicit Axis(std::vector<double> nodes);

  /// Nodes lo, lo+step, ..., hi computed as lo + i*step with the last node pinned to hi.
  static Axis uniform(double lo, double hi, std::size_t intervals);

  std::size_t size() const noexcept { return nodes_.size(); }
  double front() const noexcept { return nodes_.front(); }
  double back() const noexcept { return nodes_.back(); }
  double operator[](std::size_t i) const noexcept { return nodes_[i]; }
  std::span<const double> nodes() const noexcept { return nodes_; }

  double clamp(double x) const noexcept;
  /// Locates x after clamping; nodes are hit with weight 0 exactly.
  AxisLocation locate(double x) const noexcept;
  /// Index of the nearest node after clamping; midpoints resolve to the lower node.
  std::size_t nearest(double x) const noexcept;

  friend bool operator==(const Axis& a, const Axis& b) { return a.nodes_ == b.nodes_; }

 private:
  std::vector<double> nodes_;
};

/// Tensor-product grid, row-major (the last axis varies fastest).
class Grid {
 public:
  explicit Grid(std::vector<Axis> axes);

  std::size_t dimension() const noexcept { return axes_.size(); }
  std::size_t size() const noexcept { return size_; }
  const Axis& axis(std::size_t d) const noexcept { return axes_[d]; }
  std::span<const Axis> axes() const noexcept { return axes_; }
  std::size_t stride(std::size_t d) const noexcept { return strides_[d]; }

  Point node(std::size_t flat) const;
  std::size_t flat_index(std::span<const std::size_t> multi) const;
  Point clamp(const Point& p) const;
  std::size_t nearest(const Point& p) const;
  bool contains(const Point& p) const;

  /// Corner indices/weights of the multilinear stencil at p (clamped); 2^dimension entries.
  std::size_t stencil(const Point& p, std::span<std::uint32_t> index, std::span<double> weight) const;

  friend bool operator==(const Grid& a, const Grid& b) { return a.axes_ == b.axes_; }

 private:
  std::vector<Axis> axes_;
  std::array<std::size_t, kMaxAxes> strides_{};
  std::size_t size_ = 0;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Dense values over the nodes of a grid at one time index.
struct ValueTable {
  int time = 0;
  GridPtr grid;
  std::vector<double> values;

  ValueTable() = default;
  ValueTable(int t, GridPtr g);
  ValueTable(int t, GridPtr g, std::vector<double> v);

  double operator[](std::size_t i) const noexcept { return values[i]; }
  double min() const;
  double max() const;
};

/// Control indices (into the control set) per time step over the nodes of a grid.
struct PolicyTable {
  GridPtr grid;
  std::vector<std::vector<std::uint16_t>> steps;

  std::uint16_t at(int t, std::size_t node) const { return steps.at(static_cast<std::size_t>(t))[node]; }
  int horizon() const noexcept { return static_cast<int>(steps.size()); }
};

/// Multilinear interpolation of a table at a point (clamped into the grid box first).
double interpolate(const ValueTable& table, const Point& point);
double interpolate(const Grid& grid, std::span<const double> values, const Point& point);

}  // namespace riskctl
