#include "superspine/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "superspine/errors.hpp"

namespace superspine {

namespace {

// Keys cubic convolution weights for offsets -1, 0, 1, 2 at fraction t.
void keys_weights(double t, double w[4]) {
  double t2 = t * t;
  double t3 = t2 * t;
  w[0] = -0.5 * t3 + t2 - 0.5 * t;
  w[1] = 1.5 * t3 - 2.5 * t2 + 1.0;
  w[2] = -1.5 * t3 + 2.0 * t2 + 0.5 * t;
  w[3] = 0.5 * t3 - 0.5 * t2;
}

}  // namespace

SpatialGrid::SpatialGrid() { stride_ = {1, 1, 1}; }

SpatialGrid::SpatialGrid(int dim, std::array<double, kMaxDim> lo, std::array<double, kMaxDim> hi,
                         std::array<int, kMaxDim> counts)
    : singleton_(false), dim_(dim), lo_(lo), hi_(hi), counts_(counts) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("grid dimension must be 1, 2 or 3");
  for (int i = dim; i < kMaxDim; ++i) {
    counts_[i] = 1;
    lo_[i] = hi_[i] = 0.0;
  }
  for (int i = 0; i < dim; ++i) {
    if (counts_[i] < 2) throw ConfigError("grid needs at least 2 points per axis");
    if (!(hi_[i] > lo_[i])) throw ConfigError("grid box has an empty side");
    step_[i] = (hi_[i] - lo_[i]) / (counts_[i] - 1);
  }
  size_ = 1;
  for (int i = kMaxDim - 1; i >= 0; --i) {
    stride_[i] = size_;
    size_ *= static_cast<std::size_t>(counts_[i]);
  }
}

Point SpatialGrid::point(std::size_t index) const {
  Point p;
  if (singleton_) return p;
  for (int i = 0; i < dim_; ++i) {
    std::size_t k = (index / stride_[i]) % static_cast<std::size_t>(counts_[i]);
    p.x[i] = k + 1 == static_cast<std::size_t>(counts_[i]) ? hi_[i] : lo_[i] + step_[i] * k;
  }
  return p;
}

std::vector<Point> SpatialGrid::points() const {
  std::vector<Point> out(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = point(i);
  return out;
}

double SpatialGrid::interpolate_linear(std::span<const double> values, const Point& x) const {
  if (singleton_) return values[0];
  std::array<std::size_t, kMaxDim> base{};
  std::array<double, kMaxDim> frac{};
  for (int i = 0; i < dim_; ++i) {
    double u = (std::clamp(x.x[i], lo_[i], hi_[i]) - lo_[i]) / step_[i];
    int k = std::min(static_cast<int>(u), counts_[i] - 2);
    base[i] = static_cast<std::size_t>(k);
    frac[i] = u - k;
  }
  double total = 0.0;
  for (int corner = 0; corner < (1 << dim_); ++corner) {
    double weight = 1.0;
    std::size_t index = 0;
    for (int i = 0; i < dim_; ++i) {
      int bit = (corner >> i) & 1;
      weight *= bit ? frac[i] : 1.0 - frac[i];
      index += (base[i] + bit) * stride_[i];
    }
    if (weight != 0.0) total += weight * values[index];
  }
  return total;
}

double SpatialGrid::interpolate_cubic(std::span<const double> values, const Point& x) const {
  if (singleton_) return values[0];
  std::array<int, kMaxDim> base{};
  std::array<std::array<double, 4>, kMaxDim> weights{};
  for (int i = 0; i < dim_; ++i) {
    double u = (std::clamp(x.x[i], lo_[i], hi_[i]) - lo_[i]) / step_[i];
    int k = std::min(static_cast<int>(u), counts_[i] - 2);
    base[i] = k;
    keys_weights(u - k, weights[i].data());
  }
  double total = 0.0;
  double cell_lo = std::numeric_limits<double>::infinity();
  double cell_hi = -cell_lo;
  int n_terms = 1;
  for (int i = 0; i < dim_; ++i) n_terms *= 4;
  for (int term = 0; term < n_terms; ++term) {
    double weight = 1.0;
    std::size_t index = 0;
    bool corner = true;
    int rest = term;
    for (int i = 0; i < dim_; ++i) {
      int off = rest % 4;
      rest /= 4;
      weight *= weights[i][off];
      int k = std::clamp(base[i] + off - 1, 0, counts_[i] - 1);
      index += static_cast<std::size_t>(k) * stride_[i];
      corner = corner && (off == 1 || off == 2);
    }
    double v = values[index];
    total += weight * v;
    if (corner) {
      cell_lo = std::min(cell_lo, v);
      cell_hi = std::max(cell_hi, v);
    }
  }
  return std::clamp(total, cell_lo, cell_hi);
}

std::string SpatialGrid::describe() const {
  if (singleton_) return "singleton";
  std::ostringstream os;
  os.precision(17);
  os << "box(d=" << dim_;
  for (int i = 0; i < dim_; ++i) os << "," << lo_[i] << ":" << hi_[i] << ":" << counts_[i];
  os << ")";
  return os.str();
}

}  // namespace superspine
