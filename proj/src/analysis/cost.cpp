#include <variant>

#include "convshield/analysis.hpp"
#include "convshield/error.hpp"
#include "convshield/nn/forward.hpp"

namespace convshield::analysis {

namespace {
constexpr std::uint64_t kBytesPerElement = 8;
}

Shape default_input_shape(const ArchSpec& arch, Extent input) {
  for (const auto& layer : arch.layers)
    if (const auto* conv = std::get_if<nn::ConvLayerSpec>(&layer))
      return {conv->in_channels, input.height, input.width};
  return {3, input.height, input.width};
}

CostReport cost(const ArchSpec& arch, const Shape& input_shape) {
  nn::validate(arch);
  const auto shapes = nn::infer_shapes(arch, input_shape);
  CostReport report;
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    const auto& layer = arch.layers[i];
    const std::uint64_t elements = shape_size(shapes[i]);
    LayerCost entry{i, std::string(nn::layer_type_name(layer)), shapes[i], elements,
                    elements * kBytesPerElement, 0};
    if (const auto* c = std::get_if<nn::ConvLayerSpec>(&layer)) {
      const std::uint64_t macs_per_output = c->in_channels * c->kernel * c->kernel;
      entry.flops = 2 * macs_per_output * elements;
      entry.param_count = c->out_channels * macs_per_output;
    } else if (const auto* l = std::get_if<nn::Linear>(&layer)) {
      entry.flops = 2 * l->in_features * l->out_features;
      entry.param_count = l->in_features * l->out_features;
    }
    report.total_flops += entry.flops;
    report.total_activation_memory_bytes += entry.activation_memory_bytes;
    report.total_param_count += entry.param_count;
    report.layers.push_back(std::move(entry));
  }
  return report;
}

CostReport cost(const ArchSpec& arch, Extent input) {
  return cost(arch, default_input_shape(arch, input));
}

}  // namespace convshield::analysis
