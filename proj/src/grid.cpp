#include "proxverify/grid.hpp"

#include <cmath>

#include "proxverify/errors.hpp"

namespace proxverify {

GridSpec::GridSpec(double radius, std::size_t points_per_axis, std::size_t dim)
    : radius_(radius), points_(points_per_axis), dim_(dim) {
  if (!(radius > 0) || !std::isfinite(radius)) throw DomainError("GridSpec: radius must be positive");
  if (points_per_axis < 3 || points_per_axis % 2 == 0)
    throw DomainError("GridSpec: points_per_axis must be odd and >= 3");
  if (dim == 0 || dim > kMaxDim) throw DimensionError("GridSpec: grid oracles support dim 1..3");
  step_ = 2.0 * radius_ / static_cast<double>(points_ - 1);
  size_ = 1;
  for (std::size_t i = 0; i < dim_; ++i) size_ *= points_;
}

GridSpec GridSpec::budgeted(double radius, std::size_t requested, std::size_t dim) {
  if (dim == 0 || dim > kMaxDim) throw DimensionError("GridSpec: grid oracles support dim 1..3");
  std::size_t n = requested;
  if (dim > 1) {
    const auto cap = static_cast<std::size_t>(
        std::floor(std::pow(static_cast<double>(kPointBudget), 1.0 / static_cast<double>(dim)) + 1e-9));
    if (n > cap) n = cap;
  }
  if (n % 2 == 0) --n;
  if (n < 3) n = 3;
  return GridSpec(radius, n, dim);
}

double GridSpec::coordinate(std::size_t k) const noexcept {
  // Symmetric about the centre index so that +c and -c are exact negatives.
  const auto half = static_cast<std::ptrdiff_t>(points_ / 2);
  return static_cast<double>(static_cast<std::ptrdiff_t>(k) - half) * step_;
}

void GridSpec::point_into(std::size_t flat, std::vector<double>& out) const {
  out.resize(dim_);
  for (std::size_t axis = dim_; axis-- > 0;) {
    out[axis] = coordinate(flat % points_);
    flat /= points_;
  }
}

Vector GridSpec::point(std::size_t flat) const {
  std::vector<double> e;
  point_into(flat, e);
  return Vector(std::move(e));
}

bool GridSpec::on_boundary(std::size_t flat) const noexcept {
  for (std::size_t axis = 0; axis < dim_; ++axis) {
    const std::size_t k = flat % points_;
    if (k == 0 || k + 1 == points_) return true;
    flat /= points_;
  }
  return false;
}

}  // namespace proxverify
