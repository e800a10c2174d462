#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "convshield/nn/layers.hpp"

namespace convshield::nn {

enum class Preset { kToyCnn, kAlexNet, kVgg16, kResNet18, kPreActResNet18 };

std::string_view to_string(Preset preset);
/// "toy", "alexnet", "vgg16", "resnet18", "preactresnet18" (case-insensitive).
Preset parse_preset(std::string_view name);

/// Baseline first-conv stride per stage: AlexNet 2-2-2-2, VGG16 2-2-2-2-2,
/// ResNet18 and PreActResNet18 1-2-2-2. The toy CNN has a single stage.
std::vector<std::size_t> default_strides(Preset preset);

struct ToyCnnOptions {
  /// Channel count before and after each conv; four convs by default.
  std::vector<std::size_t> channels{3, 3, 16, 32, 64};
  std::size_t kernel = 3;
  std::size_t stride = 1;
  std::size_t padding = 1;
  ActivationKind activation = ActivationKind::kIdentity;
  PoolKind pooling = PoolKind::kAverage;
};

/// Conv trunk followed by a global pool; no classifier head.
ArchSpec toy_cnn(const ToyCnnOptions& options = {});

/// Convolutional chain of the named network (skip connections omitted),
/// global average pooling and a linear head with `classes` outputs.
ArchSpec make_preset(Preset preset, std::size_t classes = 10);

}  // namespace convshield::nn
