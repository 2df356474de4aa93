#pragma once

#include <array>
#include <cmath>

namespace superspine {

inline constexpr int kMaxDim = 3;

//! A location in E (a subset of R^d, d <= 3) or the cemetery state.
struct Point {
  std::array<double, kMaxDim> x{};
  bool cemetery = false;

  double operator[](int i) const { return x[i]; }
  double& operator[](int i) { return x[i]; }

  static Point dead() {
    Point p;
    p.cemetery = true;
    return p;
  }
  static Point at(double x1, double x2 = 0.0, double x3 = 0.0) {
    Point p;
    p.x = {x1, x2, x3};
    return p;
  }
};

inline double squared_norm(const Point& p) {
  return p.x[0] * p.x[0] + p.x[1] * p.x[1] + p.x[2] * p.x[2];
}

//! Axis-aligned box in the first `dim` coordinates.
struct Box {
  int dim = 1;
  std::array<double, kMaxDim> lo{};
  std::array<double, kMaxDim> hi{};

  bool contains(const Point& p) const {
    if (p.cemetery) return false;
    for (int i = 0; i < dim; ++i) {
      if (!(p.x[i] > lo[i] && p.x[i] < hi[i])) return false;
    }
    return true;
  }
};

}  // namespace superspine
