#include "convshield/nn/presets.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "convshield/error.hpp"

namespace convshield::nn {

std::string_view to_string(Preset preset) {
  switch (preset) {
    case Preset::kToyCnn: return "toy";
    case Preset::kAlexNet: return "alexnet";
    case Preset::kVgg16: return "vgg16";
    case Preset::kResNet18: return "resnet18";
    case Preset::kPreActResNet18: return "preactresnet18";
  }
  return "unknown";
}

Preset parse_preset(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto p : {Preset::kToyCnn, Preset::kAlexNet, Preset::kVgg16, Preset::kResNet18,
                 Preset::kPreActResNet18})
    if (lower == to_string(p)) return p;
  if (lower == "toycnn") return Preset::kToyCnn;
  throw InvalidArgument("unknown preset '" + std::string(name) +
                        "' (expected toy, alexnet, vgg16, resnet18 or preactresnet18)");
}

std::vector<std::size_t> default_strides(Preset preset) {
  switch (preset) {
    case Preset::kToyCnn: return {1};
    case Preset::kAlexNet: return {2, 2, 2, 2};
    case Preset::kVgg16: return {2, 2, 2, 2, 2};
    case Preset::kResNet18:
    case Preset::kPreActResNet18: return {1, 2, 2, 2};
  }
  return {};
}

namespace {

class Builder {
 public:
  void conv(std::size_t in, std::size_t out, std::size_t stride = 1, std::size_t kernel = 3,
            bool stage_start = false) {
    if (stage_start) arch_.stage_markers.push_back(arch_.layers.size());
    arch_.layers.push_back(ConvLayerSpec{in, out, kernel, stride, kernel / 2});
  }
  void relu() { arch_.layers.push_back(Activation{ActivationKind::kRelu}); }
  void head(std::size_t features, std::size_t classes) {
    arch_.layers.push_back(GlobalPool{PoolKind::kAverage});
    arch_.layers.push_back(Linear{features, classes});
  }
  ArchSpec take() { return std::move(arch_); }

 private:
  ArchSpec arch_;
};

// 3x3 stem plus four stages of two basic blocks (two convs each). Shortcut
// convolutions are not part of the chain.
ArchSpec resnet18(bool pre_activation, std::size_t classes) {
  Builder b;
  const std::size_t widths[] = {64, 128, 256, 512};
  const auto strides = default_strides(Preset::kResNet18);
  b.conv(3, 64);
  if (!pre_activation) b.relu();
  std::size_t in = 64;
  for (std::size_t stage = 0; stage < 4; ++stage) {
    for (std::size_t i = 0; i < 4; ++i) {
      if (pre_activation) b.relu();
      b.conv(i == 0 ? in : widths[stage], widths[stage], i == 0 ? strides[stage] : 1, 3, i == 0);
      if (!pre_activation) b.relu();
    }
    in = widths[stage];
  }
  if (pre_activation) b.relu();
  b.head(512, classes);
  return b.take();
}

ArchSpec vgg16(std::size_t classes) {
  Builder b;
  const std::vector<std::vector<std::size_t>> stages{
      {64, 64}, {128, 128}, {256, 256, 256}, {512, 512, 512}, {512, 512, 512}};
  const auto strides = default_strides(Preset::kVgg16);
  std::size_t in = 3;
  for (std::size_t s = 0; s < stages.size(); ++s)
    for (std::size_t i = 0; i < stages[s].size(); ++i) {
      b.conv(in, stages[s][i], i == 0 ? strides[s] : 1, 3, i == 0);
      b.relu();
      in = stages[s][i];
    }
  b.head(512, classes);
  return b.take();
}

ArchSpec alexnet(std::size_t classes) {
  Builder b;
  const auto s = default_strides(Preset::kAlexNet);
  b.conv(3, 64, s[0], 3, true);
  b.relu();
  b.conv(64, 192, s[1], 3, true);
  b.relu();
  b.conv(192, 384, s[2], 3, true);
  b.relu();
  b.conv(384, 256);
  b.relu();
  b.conv(256, 256, s[3], 3, true);
  b.relu();
  b.head(256, classes);
  return b.take();
}

}  // namespace

ArchSpec toy_cnn(const ToyCnnOptions& options) {
  require(options.channels.size() >= 2, "toy CNN needs at least one convolution");
  ArchSpec arch;
  for (std::size_t i = 0; i + 1 < options.channels.size(); ++i) {
    if (i == 0) arch.stage_markers.push_back(arch.layers.size());
    arch.layers.push_back(ConvLayerSpec{options.channels[i], options.channels[i + 1], options.kernel,
                                        options.stride, options.padding});
    if (options.activation == ActivationKind::kRelu) arch.layers.push_back(Activation{ActivationKind::kRelu});
  }
  arch.layers.push_back(GlobalPool{options.pooling});
  validate(arch);
  return arch;
}

ArchSpec make_preset(Preset preset, std::size_t classes) {
  require(classes >= 1, "preset head needs at least one class");
  switch (preset) {
    case Preset::kToyCnn: {
      ArchSpec arch = toy_cnn();
      arch.layers.push_back(Linear{64, classes});
      return arch;
    }
    case Preset::kAlexNet: return alexnet(classes);
    case Preset::kVgg16: return vgg16(classes);
    case Preset::kResNet18: return resnet18(false, classes);
    case Preset::kPreActResNet18: return resnet18(true, classes);
  }
  throw InvalidArgument("unknown preset");
}

}  // namespace convshield::nn
