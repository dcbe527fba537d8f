#pragma once

// Dense i-way arrays stored in rvec order (first index varies fastest).
//
// Multi-indices and mode numbers in this header are one-based, so an
// m1 x m2 array has entries (1,1) .. (m1,m2) and modes 1 and 2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arrayvariate/errors.hpp"

namespace arrayvariate {

using Vector = std::vector<double>;

class Shape {
 public:
  Shape() : dims_{1} {}

  explicit Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw ShapeError("shape must have at least one mode");
    std::size_t total = 1;
    for (std::size_t j = 0; j < dims_.size(); ++j) {
      if (dims_[j] == 0)
        throw ShapeError("mode " + std::to_string(j + 1) + " has zero extent");
      if (total > std::numeric_limits<std::size_t>::max() / dims_[j])
        throw ShapeError("shape size overflows the addressable range");
      total *= dims_[j];
    }
    size_ = total;
  }

  Shape(std::initializer_list<std::size_t> dims)
      : Shape(std::vector<std::size_t>(dims)) {}

  std::size_t order() const noexcept { return dims_.size(); }
  std::size_t size() const noexcept { return size_; }
  /// Extent of the one-based mode `j`.
  std::size_t extent(std::size_t j) const { return dims_.at(j - 1); }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }

  /// Product of all extents except the one-based mode `j`.
  std::size_t size_without(std::size_t j) const { return size_ / extent(j); }

  friend bool operator==(const Shape&, const Shape&) = default;

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t j = 0; j < dims_.size(); ++j) {
      if (j) s += ",";
      s += std::to_string(dims_[j]);
    }
    return s + ")";
  }

 private:
  std::vector<std::size_t> dims_;
  std::size_t size_ = 1;
};

/// One-based rvec position of a one-based multi-index:
/// j = j1 + (j2-1) m1 + (j3-1) m1 m2 + ...
inline std::size_t linear_index(std::span<const std::size_t> idx, const Shape& shape) {
  if (idx.size() != shape.order())
    throw IndexError("multi-index has " + std::to_string(idx.size()) +
                     " components for an order-" + std::to_string(shape.order()) + " array");
  std::size_t pos = 0;
  std::size_t stride = 1;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const std::size_t extent = shape.dims()[k];
    if (idx[k] < 1 || idx[k] > extent) throw IndexError(k + 1, idx[k], extent);
    pos += (idx[k] - 1) * stride;
    stride *= extent;
  }
  return pos + 1;
}

inline std::size_t linear_index(std::initializer_list<std::size_t> idx, const Shape& shape) {
  return linear_index(std::span<const std::size_t>(idx.begin(), idx.size()), shape);
}

/// Inverse of linear_index: one-based position to one-based multi-index.
inline std::vector<std::size_t> multi_index(std::size_t pos, const Shape& shape) {
  if (pos < 1 || pos > shape.size())
    throw IndexError("position " + std::to_string(pos) + " out of range 1.." +
                     std::to_string(shape.size()));
  std::vector<std::size_t> idx(shape.order());
  std::size_t rest = pos - 1;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    idx[k] = rest % shape.dims()[k] + 1;
    rest /= shape.dims()[k];
  }
  return idx;
}

class DataArray {
 public:
  DataArray() : data_(1, 0.0) {}
  explicit DataArray(Shape shape, double fill = 0.0)
      : shape_(std::move(shape)), data_(shape_.size(), fill) {}

  /// Adopts `data` as the rvec of an array with the given shape.
  DataArray(Shape shape, Vector data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_.size())
      throw ShapeError("data length " + std::to_string(data_.size()) +
                       " does not match shape " + shape_.to_string());
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t order() const noexcept { return shape_.order(); }

  /// rvec-ordered storage.
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  /// Zero-based flat access in rvec order.
  double operator[](std::size_t k) const { return data_[k]; }
  double& operator[](std::size_t k) { return data_[k]; }

  /// One-based multi-index access, bounds checked.
  double at(std::span<const std::size_t> idx) const { return data_[linear_index(idx, shape_) - 1]; }
  double& at(std::span<const std::size_t> idx) { return data_[linear_index(idx, shape_) - 1]; }
  double at(std::initializer_list<std::size_t> idx) const {
    return at(std::span<const std::size_t>(idx.begin(), idx.size()));
  }
  double& at(std::initializer_list<std::size_t> idx) {
    return at(std::span<const std::size_t>(idx.begin(), idx.size()));
  }

  DataArray& operator+=(const DataArray& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  DataArray& operator-=(const DataArray& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  DataArray& operator*=(double a) {
    for (double& v : data_) v *= a;
    return *this;
  }

  friend DataArray operator+(DataArray a, const DataArray& b) { return a += b; }
  friend DataArray operator-(DataArray a, const DataArray& b) { return a -= b; }
  friend DataArray operator*(double s, DataArray a) { return a *= s; }

  friend bool operator==(const DataArray&, const DataArray&) = default;

 private:
  void require_same_shape(const DataArray& o) const {
    if (o.shape_ != shape_)
      throw ShapeError("shape mismatch: " + shape_.to_string() + " vs " + o.shape_.to_string());
  }

  Shape shape_;
  Vector data_;
};

inline Vector rvec(const DataArray& x) { return Vector(x.data().begin(), x.data().end()); }

inline DataArray unrvec(Vector x, const Shape& shape) {
  if (x.size() != shape.size())
    throw ShapeError("vector of length " + std::to_string(x.size()) +
                     " cannot fill shape " + shape.to_string());
  return DataArray(shape, std::move(x));
}

inline double sq_norm(const DataArray& x) {
  double s = 0.0;
  for (double v : x.data()) s += v * v;
  return s;
}

inline double distance(const DataArray& a, const DataArray& b) {
  if (a.shape() != b.shape())
    throw ShapeError("distance between shapes " + a.shape().to_string() + " and " +
                     b.shape().to_string());
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

/// The mode-`mode` fiber through `fixed`. `fixed` holds one index per mode;
/// the entry at position `mode` is ignored (the ':' slot).
inline Vector fiber(const DataArray& x, std::size_t mode, std::span<const std::size_t> fixed) {
  const Shape& s = x.shape();
  if (mode < 1 || mode > s.order())
    throw IndexError("mode " + std::to_string(mode) + " out of range 1.." +
                     std::to_string(s.order()));
  if (fixed.size() != s.order())
    throw IndexError("fiber needs " + std::to_string(s.order()) + " index components");
  std::vector<std::size_t> idx(fixed.begin(), fixed.end());
  idx[mode - 1] = 1;
  const std::size_t start = linear_index(idx, s) - 1;
  std::size_t stride = 1;
  for (std::size_t k = 0; k + 1 < mode; ++k) stride *= s.dims()[k];
  Vector out(s.extent(mode));
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = x[start + r * stride];
  return out;
}

inline Vector fiber(const DataArray& x, std::size_t mode, std::initializer_list<std::size_t> fixed) {
  return fiber(x, mode, std::span<const std::size_t>(fixed.begin(), fixed.size()));
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("length mismatch in max_abs_diff");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace arrayvariate
