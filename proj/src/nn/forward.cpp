#include "convshield/nn/forward.hpp"

#include <string>

#include "convshield/error.hpp"
#include "convshield/nn/ops.hpp"

namespace convshield::nn {

namespace {
template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::string layer_prefix(std::size_t i, const LayerSpec& layer) {
  return "layer " + std::to_string(i) + " (" + std::string(layer_type_name(layer)) + "): ";
}
}  // namespace

std::optional<Shape> parameter_shape(const LayerSpec& layer) {
  if (const auto* c = std::get_if<ConvLayerSpec>(&layer))
    return Shape{c->out_channels, c->in_channels, c->kernel, c->kernel};
  if (const auto* l = std::get_if<Linear>(&layer)) return Shape{l->out_features, l->in_features};
  return std::nullopt;
}

Weights init_network(const ArchSpec& arch, const InitStrategy& strategy, std::uint64_t seed) {
  validate(arch);
  const std::uint64_t weight_seed = derive_seed(seed, seed_purpose::kWeights);
  Weights weights(arch.layers.size());
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    if (auto shape = parameter_shape(arch.layers[i])) {
      RngStream rng(weight_seed, i);
      weights[i] = init_weights(*shape, strategy, rng);
    }
  }
  return weights;
}

std::vector<Shape> infer_shapes(const ArchSpec& arch, const Shape& input_shape) {
  std::vector<Shape> shapes;
  shapes.reserve(arch.layers.size());
  Shape current = input_shape;
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    const LayerSpec& layer = arch.layers[i];
    auto need_chw = [&] {
      if (current.size() != 3)
        throw ShapeError(layer_prefix(i, layer) + "expected a C x H x W input, got " +
                         shape_to_string(current));
    };
    try {
      std::visit(Overloaded{[&](const ConvLayerSpec& c) {
                              need_chw();
                              if (current[0] != c.in_channels)
                                throw ShapeError("input has " + std::to_string(current[0]) +
                                                 " channels, layer expects " + std::to_string(c.in_channels));
                              const Extent out = output_dims({current[1], current[2]}, c);
                              current = {c.out_channels, out.height, out.width};
                            },
                            [](const Activation&) {},
                            [&](const GlobalPool&) {
                              need_chw();
                              current = {current[0]};
                            },
                            [&](const Upsample& u) {
                              need_chw();
                              require(u.scale >= 1, "upsample scale must be positive");
                              current = {current[0], current[1] * u.scale, current[2] * u.scale};
                            },
                            [&](const Linear& l) {
                              if (shape_size(current) != l.in_features)
                                throw ShapeError("input has " + std::to_string(shape_size(current)) +
                                                 " features, layer expects " + std::to_string(l.in_features));
                              current = {l.out_features};
                            }},
                 layer);
    } catch (const ShapeError& e) {
      const std::string msg = e.what();
      if (msg.rfind("layer ", 0) == 0) throw;
      throw ShapeError(layer_prefix(i, layer) + msg);
    }
    shapes.push_back(current);
  }
  return shapes;
}

Tensor apply_layer(const LayerSpec& layer, const std::optional<Tensor>& weights, const Tensor& input) {
  auto need_weights = [&]() -> const Tensor& {
    if (!weights) throw ShapeError("missing weights");
    return *weights;
  };
  return std::visit(
      Overloaded{[&](const ConvLayerSpec& c) { return conv2d(input, need_weights(), c); },
                 [&](const Activation& a) { return apply_activation(input, a.kind); },
                 [&](const GlobalPool& p) { return global_pool(input, p.kind); },
                 [&](const Upsample& u) { return upsample(input, u.mode, u.scale); },
                 [&](const Linear& l) { return linear(input, need_weights(), l); }},
      layer);
}

namespace {

template <class Sink>
Tensor run(const ArchSpec& arch, const Weights& weights, const Tensor& input, Sink&& sink) {
  if (weights.size() != arch.layers.size())
    throw ShapeError("weights list has " + std::to_string(weights.size()) + " entries for " +
                     std::to_string(arch.layers.size()) + " layers");
  Tensor current = input;
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    try {
      current = apply_layer(arch.layers[i], weights[i], current);
    } catch (const InvalidArgument& e) {
      throw ShapeError(layer_prefix(i, arch.layers[i]) + e.what());
    }
    sink(current);
  }
  return current;
}

}  // namespace

Tensor forward(const ArchSpec& arch, const Weights& weights, const Tensor& input) {
  return run(arch, weights, input, [](const Tensor&) {});
}

std::vector<Tensor> forward_trace(const ArchSpec& arch, const Weights& weights, const Tensor& input) {
  std::vector<Tensor> trace;
  trace.reserve(arch.layers.size());
  run(arch, weights, input, [&](const Tensor& t) { trace.push_back(t); });
  return trace;
}

}  // namespace convshield::nn
