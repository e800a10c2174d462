#include <charconv>
#include <variant>

#include "convshield/analysis.hpp"
#include "convshield/error.hpp"

namespace convshield::analysis {

StrideConfig StrideConfig::parse(std::string_view text) {
  StrideConfig config;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find_first_of(",-", start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view token = text.substr(start, end - start);
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() || value == 0)
      throw InvalidArgument("invalid stride configuration '" + std::string(text) +
                            "' (expected positive integers such as 1,1,2,2)");
    config.strides.push_back(value);
    start = end + 1;
  }
  return config;
}

std::string StrideConfig::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < strides.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(strides[i]);
  }
  return out;
}

StrideConfig stride_config(const ArchSpec& arch) {
  nn::validate(arch);
  StrideConfig config;
  for (auto idx : arch.stage_markers) config.strides.push_back(std::get<nn::ConvLayerSpec>(arch.layers[idx]).stride);
  return config;
}

ArchSpec rewrite_strides(const ArchSpec& arch, const StrideConfig& config) {
  nn::validate(arch);
  if (config.strides.size() != arch.stage_markers.size())
    throw InvalidArgument("stride configuration " + config.to_string() + " has " +
                          std::to_string(config.strides.size()) + " entries but the architecture has " +
                          std::to_string(arch.stage_markers.size()) + " stages");
  ArchSpec out = arch;
  for (std::size_t s = 0; s < config.strides.size(); ++s) {
    require(config.strides[s] >= 1, "strides must be positive");
    std::get<nn::ConvLayerSpec>(out.layers[arch.stage_markers[s]]).stride = config.strides[s];
  }
  return out;
}

ArchSpec with_input_upsampling(const ArchSpec& arch, nn::UpsampleMode mode, std::size_t scale) {
  require(scale >= 1, "upsampling scale must be positive");
  ArchSpec out;
  out.layers.reserve(arch.layers.size() + 1);
  out.layers.push_back(nn::Upsample{mode, scale});
  out.layers.insert(out.layers.end(), arch.layers.begin(), arch.layers.end());
  for (auto idx : arch.stage_markers) out.stage_markers.push_back(idx + 1);
  return out;
}

}  // namespace convshield::analysis
