#include "convshield/nn/layers.hpp"

#include <sstream>

#include "convshield/error.hpp"

namespace convshield::nn {

namespace {
template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
}  // namespace

std::string_view to_string(ActivationKind kind) {
  return kind == ActivationKind::kRelu ? "relu" : "identity";
}

std::string_view to_string(PoolKind kind) { return kind == PoolKind::kMax ? "max" : "avg"; }

std::string_view to_string(UpsampleMode mode) {
  return mode == UpsampleMode::kBilinear ? "bilinear" : "nearest";
}

PoolKind parse_pool_kind(std::string_view name) {
  if (name == "avg" || name == "average") return PoolKind::kAverage;
  if (name == "max") return PoolKind::kMax;
  throw InvalidArgument("unknown pooling kind '" + std::string(name) + "' (expected avg or max)");
}

UpsampleMode parse_upsample_mode(std::string_view name) {
  if (name == "nearest") return UpsampleMode::kNearest;
  if (name == "bilinear") return UpsampleMode::kBilinear;
  throw InvalidArgument("unknown upsample mode '" + std::string(name) +
                        "' (expected nearest or bilinear)");
}

ActivationKind parse_activation_kind(std::string_view name) {
  if (name == "relu") return ActivationKind::kRelu;
  if (name == "none" || name == "identity") return ActivationKind::kIdentity;
  throw InvalidArgument("unknown activation '" + std::string(name) + "' (expected none or relu)");
}

std::string_view layer_type_name(const LayerSpec& layer) {
  return std::visit(Overloaded{[](const ConvLayerSpec&) { return std::string_view("conv"); },
                               [](const Activation& a) { return to_string(a.kind); },
                               [](const GlobalPool&) { return std::string_view("pool"); },
                               [](const Upsample&) { return std::string_view("upsample"); },
                               [](const Linear&) { return std::string_view("linear"); }},
                    layer);
}

std::string describe(const LayerSpec& layer) {
  std::ostringstream out;
  std::visit(Overloaded{[&](const ConvLayerSpec& c) {
                          out << "conv " << c.in_channels << "->" << c.out_channels << " k"
                              << c.kernel << " s" << c.stride << " p" << c.padding;
                        },
                        [&](const Activation& a) { out << to_string(a.kind); },
                        [&](const GlobalPool& p) { out << "pool " << to_string(p.kind); },
                        [&](const Upsample& u) { out << "upsample " << to_string(u.mode) << " x" << u.scale; },
                        [&](const Linear& l) { out << "linear " << l.in_features << "->" << l.out_features; }},
             layer);
  return out.str();
}

std::size_t conv_count(const ArchSpec& arch) {
  std::size_t n = 0;
  for (const auto& layer : arch.layers) n += std::holds_alternative<ConvLayerSpec>(layer);
  return n;
}

void validate(const ArchSpec& arch) {
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    const auto where = "layer " + std::to_string(i) + ": ";
    std::visit(Overloaded{[&](const ConvLayerSpec& c) {
                            require(c.in_channels > 0 && c.out_channels > 0,
                                    where + "conv channels must be positive");
                            require(c.kernel > 0, where + "conv kernel must be positive");
                            require(c.stride > 0, where + "conv stride must be positive");
                          },
                          [](const Activation&) {}, [](const GlobalPool&) {},
                          [&](const Upsample& u) { require(u.scale > 0, where + "upsample scale must be positive"); },
                          [&](const Linear& l) {
                            require(l.in_features > 0 && l.out_features > 0,
                                    where + "linear features must be positive");
                          }},
               arch.layers[i]);
  }
  for (std::size_t s = 0; s < arch.stage_markers.size(); ++s) {
    const std::size_t idx = arch.stage_markers[s];
    require(idx < arch.layers.size(), "stage marker " + std::to_string(idx) + " is out of range");
    require(std::holds_alternative<ConvLayerSpec>(arch.layers[idx]),
            "stage marker " + std::to_string(idx) + " does not point at a conv layer");
    require(s == 0 || arch.stage_markers[s - 1] < idx, "stage markers must be strictly increasing");
  }
}

}  // namespace convshield::nn
