#pragma once

#include <cstddef>

#include "convshield/nn/layers.hpp"
#include "convshield/tensor.hpp"

namespace convshield::nn {

struct Extent {
  std::size_t height;
  std::size_t width;
  friend bool operator==(const Extent&, const Extent&) = default;
};

/// floor((in + 2p - k) / s + 1) per axis; throws if either result is < 1.
Extent output_dims(Extent in, const ConvLayerSpec& spec);
inline Extent output_dims(std::size_t h_in, std::size_t w_in, const ConvLayerSpec& spec) {
  return output_dims(Extent{h_in, w_in}, spec);
}

/// Strided cross-correlation with zero padding:
///   out[co, i, j] = sum_ci sum_m sum_n w[co, ci, m, n] * x[ci, i*s + m - p, j*s + n - p]
/// input is C x H x W, weights out x in x k x k.
Tensor conv2d(const Tensor& input, const Tensor& weights, const ConvLayerSpec& spec);

void relu_inplace(Tensor& t);
Tensor apply_activation(const Tensor& input, ActivationKind kind);

/// C x H x W -> flat vector of C per-channel means or maxima.
Tensor global_pool(const Tensor& input, PoolKind kind);

/// Integer-factor resize. Nearest replicates each pixel into a scale x scale
/// block; bilinear samples src = (dst + 0.5) / scale - 0.5 clamped to the
/// valid range.
Tensor upsample(const Tensor& input, UpsampleMode mode, std::size_t scale);

/// y = W x over the flattened input; weights are out x in.
Tensor linear(const Tensor& input, const Tensor& weights, const Linear& spec);

/// Index of the largest element; ties go to the lowest index.
std::size_t argmax(const Tensor& t);

}  // namespace convshield::nn
