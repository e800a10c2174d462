#include "convshield/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <utility>

#include "convshield/error.hpp"
#include "convshield/simd/dispatch.hpp"

namespace convshield {

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_to_string(const Shape& shape) {
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(shape[i]);
  }
  return out + ")";
}

namespace {

void check_shape(const Shape& shape) {
  require(!shape.empty(), "tensor shape must have at least one dimension");
  for (auto d : shape) require(d > 0, "tensor dimensions must be positive, got " + shape_to_string(shape));
}

}  // namespace

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  check_shape(shape_);
  data_.assign(shape_size(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  check_shape(shape_);
  require(shape_size(shape_) == data_.size(),
          "tensor data length " + std::to_string(data_.size()) + " does not match shape " +
              shape_to_string(shape_));
}

Tensor Tensor::reshaped(Shape shape) const& { return Tensor(std::move(shape), data_); }

Tensor Tensor::reshaped(Shape shape) && { return Tensor(std::move(shape), std::move(data_)); }

bool Tensor::all_finite() const noexcept {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

namespace {

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape())
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_to_string(a.shape()) + " vs " +
                     shape_to_string(b.shape()));
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "add");
  Tensor out(a.shape());
  simd::active_kernels().add(a.data(), b.data(), out.data(), a.size());
  return out;
}

Tensor subtract(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "subtract");
  Tensor out(a.shape());
  simd::active_kernels().subtract(a.data(), b.data(), out.data(), a.size());
  return out;
}

Tensor scaled(const Tensor& a, double factor) {
  Tensor out = a;
  for (double& v : out.values()) v *= factor;
  return out;
}

double linf_norm(const Tensor& t) { return simd::active_kernels().max_abs(t.data(), t.size()); }

double linf_distance(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "linf_distance");
  return simd::active_kernels().max_abs_diff(a.data(), b.data(), a.size());
}

}  // namespace convshield
