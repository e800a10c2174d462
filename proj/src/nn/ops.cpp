#include "convshield/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "convshield/error.hpp"
#include "convshield/simd/dispatch.hpp"

namespace convshield::nn {

Extent output_dims(Extent in, const ConvLayerSpec& spec) {
  require(in.height >= 1 && in.width >= 1, "output_dims: input extent must be positive");
  require(spec.kernel >= 1 && spec.stride >= 1, "output_dims: kernel and stride must be positive");
  auto axis = [&](std::size_t n) -> std::size_t {
    const std::size_t padded = n + 2 * spec.padding;
    if (padded < spec.kernel)
      throw ShapeError("convolution output would be empty: input " + std::to_string(n) +
                       " + 2*" + std::to_string(spec.padding) + " padding < kernel " +
                       std::to_string(spec.kernel));
    return (padded - spec.kernel) / spec.stride + 1;
  };
  return {axis(in.height), axis(in.width)};
}

namespace {

void require_chw(const Tensor& t, const char* op) {
  if (t.rank() != 3)
    throw ShapeError(std::string(op) + ": expected a C x H x W tensor, got " +
                     shape_to_string(t.shape()));
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& weights, const ConvLayerSpec& spec) {
  require_chw(input, "conv2d");
  if (input.dim(0) != spec.in_channels)
    throw ShapeError("conv2d: input has " + std::to_string(input.dim(0)) +
                     " channels, layer expects " + std::to_string(spec.in_channels));
  const Shape expected{spec.out_channels, spec.in_channels, spec.kernel, spec.kernel};
  if (weights.shape() != expected)
    throw ShapeError("conv2d: weights " + shape_to_string(weights.shape()) + ", expected " +
                     shape_to_string(expected));
  const Extent out = output_dims({input.dim(1), input.dim(2)}, spec);
  Tensor result({spec.out_channels, out.height, out.width});
  const simd::ConvGeometry geom{spec.in_channels, input.dim(1), input.dim(2),
                                spec.out_channels, out.height,   out.width,
                                spec.kernel,       spec.stride,  spec.padding};
  simd::active_kernels().conv2d(geom, input.data(), weights.data(), result.data());
  return result;
}

void relu_inplace(Tensor& t) { simd::active_kernels().relu(t.data(), t.size()); }

Tensor apply_activation(const Tensor& input, ActivationKind kind) {
  Tensor out = input;
  if (kind == ActivationKind::kRelu) relu_inplace(out);
  return out;
}

Tensor global_pool(const Tensor& input, PoolKind kind) {
  require_chw(input, "global_pool");
  const std::size_t channels = input.dim(0);
  const std::size_t plane = input.dim(1) * input.dim(2);
  Tensor out({channels});
  const auto& k = simd::active_kernels();
  for (std::size_t c = 0; c < channels; ++c) {
    const double* p = input.data() + c * plane;
    if (kind == PoolKind::kMax) {
      out[c] = k.max(p, plane);
    } else {
      double sum = 0.0;
      for (std::size_t i = 0; i < plane; ++i) sum += p[i];
      out[c] = sum / static_cast<double>(plane);
    }
  }
  return out;
}

namespace {

struct Tap {
  std::size_t lo;
  std::size_t hi;
  double frac;
};

// Half-pixel-centre source coordinate, clamped to [0, n - 1].
Tap bilinear_tap(std::size_t dst, std::size_t scale, std::size_t n) {
  double src = (static_cast<double>(dst) + 0.5) / static_cast<double>(scale) - 0.5;
  src = std::clamp(src, 0.0, static_cast<double>(n - 1));
  const auto lo = static_cast<std::size_t>(std::floor(src));
  const std::size_t hi = std::min(lo + 1, n - 1);
  return {lo, hi, src - static_cast<double>(lo)};
}

}  // namespace

Tensor upsample(const Tensor& input, UpsampleMode mode, std::size_t scale) {
  require(scale >= 1, "upsample: scale must be a positive integer");
  require_chw(input, "upsample");
  if (scale == 1) return input;
  const std::size_t channels = input.dim(0), h = input.dim(1), w = input.dim(2);
  const std::size_t oh = h * scale, ow = w * scale;
  Tensor out({channels, oh, ow});

  if (mode == UpsampleMode::kNearest) {
    for (std::size_t c = 0; c < channels; ++c)
      for (std::size_t y = 0; y < oh; ++y)
        for (std::size_t x = 0; x < ow; ++x) out.at(c, y, x) = input.at(c, y / scale, x / scale);
    return out;
  }

  std::vector<Tap> rows(oh), cols(ow);
  for (std::size_t y = 0; y < oh; ++y) rows[y] = bilinear_tap(y, scale, h);
  for (std::size_t x = 0; x < ow; ++x) cols[x] = bilinear_tap(x, scale, w);
  for (std::size_t c = 0; c < channels; ++c)
    for (std::size_t y = 0; y < oh; ++y) {
      const Tap& ry = rows[y];
      for (std::size_t x = 0; x < ow; ++x) {
        const Tap& cx = cols[x];
        const double top = input.at(c, ry.lo, cx.lo) * (1.0 - cx.frac) + input.at(c, ry.lo, cx.hi) * cx.frac;
        const double bottom =
            input.at(c, ry.hi, cx.lo) * (1.0 - cx.frac) + input.at(c, ry.hi, cx.hi) * cx.frac;
        out.at(c, y, x) = top * (1.0 - ry.frac) + bottom * ry.frac;
      }
    }
  return out;
}

Tensor linear(const Tensor& input, const Tensor& weights, const Linear& spec) {
  if (input.size() != spec.in_features)
    throw ShapeError("linear: input has " + std::to_string(input.size()) + " features, layer expects " +
                     std::to_string(spec.in_features));
  const Shape expected{spec.out_features, spec.in_features};
  if (weights.shape() != expected)
    throw ShapeError("linear: weights " + shape_to_string(weights.shape()) + ", expected " +
                     shape_to_string(expected));
  Tensor out({spec.out_features});
  for (std::size_t o = 0; o < spec.out_features; ++o) {
    const double* row = weights.data() + o * spec.in_features;
    double acc = 0.0;
    for (std::size_t i = 0; i < spec.in_features; ++i) acc += row[i] * input[i];
    out[o] = acc;
  }
  return out;
}

std::size_t argmax(const Tensor& t) {
  require(!t.empty(), "argmax of an empty tensor");
  std::size_t best = 0;
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t[i] > t[best]) best = i;
  return best;
}

}  // namespace convshield::nn
