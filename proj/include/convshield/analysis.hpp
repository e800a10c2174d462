#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "convshield/nn/layers.hpp"
#include "convshield/nn/ops.hpp"
#include "convshield/tensor.hpp"

namespace convshield::analysis {

using nn::ArchSpec;
using nn::Extent;

// ---------------------------------------------------------------------------
// Receptive field

struct RfEntry {
  std::size_t conv_index;   // 1-based, counting conv layers only
  std::size_t layer_index;  // position in ArchSpec::layers
  double receptive_field;   // in input pixels
  double jump;              // input pixels between neighbouring outputs
  Extent feature;           // output map of this conv
};

struct RfReport {
  Extent input;
  std::vector<RfEntry> entries;
  /// conv_index of the first conv whose receptive field covers the input.
  std::optional<std::size_t> global_layer;
};

/// r_l = r_{l-1} + (k_l - 1) j_{l-1}, j_l = j_{l-1} s_l, r_0 = j_0 = 1.
/// Upsampling by s divides the jump by s (tracked as an exact fraction).
/// Everything from the first global pool or linear layer on is ignored.
RfReport receptive_field(const ArchSpec& arch, Extent input);

// ---------------------------------------------------------------------------
// Cost model: 1 MAC = 2 flops, 8 bytes per activation element and parameter.

struct LayerCost {
  std::size_t layer_index;
  std::string type;
  Shape output_shape;
  std::uint64_t flops;
  std::uint64_t activation_memory_bytes;
  std::uint64_t param_count;
};

struct CostReport {
  std::vector<LayerCost> layers;
  std::uint64_t total_flops = 0;
  std::uint64_t total_activation_memory_bytes = 0;
  std::uint64_t total_param_count = 0;

  std::uint64_t total_param_bytes() const { return total_param_count * 8; }
  std::uint64_t total_memory_bytes() const {
    return total_activation_memory_bytes + total_param_bytes();
  }
};

CostReport cost(const ArchSpec& arch, const Shape& input_shape);
/// Input channels taken from the first conv or linear layer.
CostReport cost(const ArchSpec& arch, Extent input);

/// Channels x height x width input matching the first parameterised layer.
Shape default_input_shape(const ArchSpec& arch, Extent input);

// ---------------------------------------------------------------------------
// Stride configurations

struct StrideConfig {
  std::vector<std::size_t> strides;

  /// "1,1,2,2" or "1-1-2-2".
  static StrideConfig parse(std::string_view text);
  std::string to_string() const;  // dash notation

  friend bool operator==(const StrideConfig&, const StrideConfig&) = default;
};

/// Current stride of the first conv of each stage.
StrideConfig stride_config(const ArchSpec& arch);

/// Copy of `arch` with the first conv of stage i using stride config[i].
ArchSpec rewrite_strides(const ArchSpec& arch, const StrideConfig& config);

/// `arch` preceded by an upsampling layer.
ArchSpec with_input_upsampling(const ArchSpec& arch, nn::UpsampleMode mode, std::size_t scale);

// ---------------------------------------------------------------------------
// Redundancy introduced by nearest-neighbour upsampling (1-D, stride-1 valid conv)

struct RedundancyProfile {
  std::size_t scale;
  std::size_t kernel;
  std::size_t input_len;
  std::size_t apparent_dims;
  std::size_t distinct_dims;
  /// Output positions (1-based) sharing an identical input window, groups of
  /// size >= 2 only, in order of first position.
  std::vector<std::vector<std::size_t>> duplicate_groups;
  /// Source index read by each tap, per output position.
  std::vector<std::vector<std::size_t>> windows;
};

RedundancyProfile redundancy_profile(std::size_t scale, std::size_t kernel, std::size_t input_len);

}  // namespace convshield::analysis
