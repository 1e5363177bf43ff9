#pragma once

#include <cstddef>
#include <vector>

#include "proxverify/vecspace.hpp"

namespace proxverify {

/// Regular grid over [-radius, radius]^dim with an odd number of points per axis,
/// so the origin is always a grid point.
class GridSpec {
 public:
  static constexpr std::size_t kMaxDim = 3;
  static constexpr std::size_t kDefaultPointsPerAxis = 2001;
  /// Cap on the total number of points of a budgeted grid.
  static constexpr std::size_t kPointBudget = 100'000;

  GridSpec(double radius, std::size_t points_per_axis, std::size_t dim);

  /// Largest odd resolution <= requested whose total point count stays within kPointBudget.
  /// In dim 1 the requested resolution is kept as is.
  static GridSpec budgeted(double radius, std::size_t requested_points_per_axis, std::size_t dim);

  double radius() const noexcept { return radius_; }
  std::size_t points_per_axis() const noexcept { return points_; }
  std::size_t dim() const noexcept { return dim_; }
  double step() const noexcept { return step_; }
  std::size_t size() const noexcept { return size_; }

  /// Coordinate of index k along one axis.
  double coordinate(std::size_t k) const noexcept;
  /// Grid point for a flat index; axis 0 varies slowest (lexicographic order).
  Vector point(std::size_t flat) const;
  void point_into(std::size_t flat, std::vector<double>& out) const;
  bool on_boundary(std::size_t flat) const noexcept;

 private:
  double radius_;
  std::size_t points_;
  std::size_t dim_;
  double step_;
  std::size_t size_;
};

}  // namespace proxverify
