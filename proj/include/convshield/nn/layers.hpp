#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace convshield::nn {

struct ConvLayerSpec {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;

  friend bool operator==(const ConvLayerSpec&, const ConvLayerSpec&) = default;
};

enum class ActivationKind { kIdentity, kRelu };
enum class PoolKind { kAverage, kMax };
enum class UpsampleMode { kNearest, kBilinear };

struct Activation {
  ActivationKind kind = ActivationKind::kRelu;
  friend bool operator==(const Activation&, const Activation&) = default;
};

/// Reduces each channel's full H x W map to one value.
struct GlobalPool {
  PoolKind kind = PoolKind::kAverage;
  friend bool operator==(const GlobalPool&, const GlobalPool&) = default;
};

struct Upsample {
  UpsampleMode mode = UpsampleMode::kNearest;
  std::size_t scale = 1;
  friend bool operator==(const Upsample&, const Upsample&) = default;
};

/// Bias-free fully connected layer over the flattened input.
struct Linear {
  std::size_t in_features = 1;
  std::size_t out_features = 1;
  friend bool operator==(const Linear&, const Linear&) = default;
};

using LayerSpec = std::variant<ConvLayerSpec, Activation, GlobalPool, Upsample, Linear>;

/// Layer list plus the index of the first convolution of every stage, used
/// for the s1-s2-... stride notation.
struct ArchSpec {
  std::vector<LayerSpec> layers;
  std::vector<std::size_t> stage_markers;

  friend bool operator==(const ArchSpec&, const ArchSpec&) = default;
};

/// Throws InvalidArgument when markers are not strictly increasing or do not
/// point at convolutions, or when a layer has a zero-valued field.
void validate(const ArchSpec& arch);

std::string_view to_string(ActivationKind kind);
std::string_view to_string(PoolKind kind);
std::string_view to_string(UpsampleMode mode);
PoolKind parse_pool_kind(std::string_view name);          // "avg"/"average", "max"
UpsampleMode parse_upsample_mode(std::string_view name);  // "nearest", "bilinear"
ActivationKind parse_activation_kind(std::string_view name);  // "none"/"identity", "relu"

std::string_view layer_type_name(const LayerSpec& layer);
std::string describe(const LayerSpec& layer);

std::size_t conv_count(const ArchSpec& arch);

}  // namespace convshield::nn
