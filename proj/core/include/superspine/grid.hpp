#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "superspine/geometry.hpp"

namespace superspine {

/*!
 * Tensor-product grid over a box in R^d, or a single point for
 * homogeneous models. Values attached to the grid are stored row-major
 * with the first coordinate varying slowest.
 */
class SpatialGrid {
 public:
  SpatialGrid();  //!< singleton grid at the origin
  SpatialGrid(int dim, std::array<double, kMaxDim> lo, std::array<double, kMaxDim> hi,
              std::array<int, kMaxDim> counts);

  bool singleton() const { return singleton_; }
  int dim() const { return dim_; }
  std::size_t size() const { return size_; }
  int count(int axis) const { return counts_[axis]; }
  double lo(int axis) const { return lo_[axis]; }
  double hi(int axis) const { return hi_[axis]; }
  double spacing(int axis) const { return step_[axis]; }

  Point point(std::size_t index) const;
  std::vector<Point> points() const;

  //! Multilinear interpolation with coordinates clamped into the box.
  double interpolate_linear(std::span<const double> values, const Point& x) const;
  /*!
   * Cubic convolution (Keys, a = -1/2) per axis, limited to the range of
   * the enclosing cell's corner values so the interpolant stays positive
   * and order-preserving. Coordinates are clamped into the box.
   */
  double interpolate_cubic(std::span<const double> values, const Point& x) const;

  std::string describe() const;

 private:
  bool singleton_ = true;
  int dim_ = 1;
  std::array<double, kMaxDim> lo_{};
  std::array<double, kMaxDim> hi_{};
  std::array<int, kMaxDim> counts_{1, 1, 1};
  std::array<double, kMaxDim> step_{};
  std::array<std::size_t, kMaxDim> stride_{};
  std::size_t size_ = 1;
};

}  // namespace superspine
