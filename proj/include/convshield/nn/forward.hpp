#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "convshield/init.hpp"
#include "convshield/nn/layers.hpp"
#include "convshield/tensor.hpp"

namespace convshield::nn {

/// One entry per layer; set for conv and linear layers, empty otherwise.
using Weights = std::vector<std::optional<Tensor>>;

/// Parameter tensor shape of a layer, or nullopt for parameter-free layers.
std::optional<Shape> parameter_shape(const LayerSpec& layer);

/// Layer i draws from RngStream(derive_seed(seed, kWeights), i), so adding a
/// layer never reshuffles the weights of the others.
Weights init_network(const ArchSpec& arch, const InitStrategy& strategy, std::uint64_t seed);

/// Shapes produced by every layer for the given input shape. Throws
/// ShapeError naming the offending layer.
std::vector<Shape> infer_shapes(const ArchSpec& arch, const Shape& input_shape);

Tensor apply_layer(const LayerSpec& layer, const std::optional<Tensor>& weights, const Tensor& input);

Tensor forward(const ArchSpec& arch, const Weights& weights, const Tensor& input);

/// Like forward, but keeps every intermediate: result[i] is the output of
/// layer i, so result.back() is the network output.
std::vector<Tensor> forward_trace(const ArchSpec& arch, const Weights& weights, const Tensor& input);

}  // namespace convshield::nn
