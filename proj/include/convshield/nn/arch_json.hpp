#pragma once

#include <string>
#include <string_view>

#include "convshield/nn/layers.hpp"

namespace convshield::nn {

// Schema:
//   {"layers": [
//      {"type": "conv", "in_channels": 3, "out_channels": 16, "kernel": 3,
//       "stride": 1, "padding": 1},
//      {"type": "relu"}, {"type": "identity"},
//      {"type": "pool", "kind": "avg" | "max"},
//      {"type": "upsample", "mode": "nearest" | "bilinear", "scale": 2},
//      {"type": "linear", "in_features": 64, "out_features": 10}],
//    "stage_markers": [1, 5, 9, 13]}
// "stride" defaults to 1 and "padding" to 0 when omitted.
std::string arch_to_json(const ArchSpec& arch, int indent = 2);

/// Throws InvalidArgument on malformed JSON, unknown layer types, missing or
/// mistyped fields, or an inconsistent architecture.
ArchSpec arch_from_json(std::string_view text);

ArchSpec load_arch_file(const std::string& path);

}  // namespace convshield::nn
