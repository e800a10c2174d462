#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "convshield/analysis.hpp"
#include "convshield/bounds.hpp"
#include "convshield/experiments.hpp"
#include "convshield/nn/layers.hpp"

namespace convshield::report {

// JSON keeps full double precision; CSV prints 6 significant digits with a
// fixed header per report type (see docs/formats.md).
enum class Format { kJson, kCsv };

Format parse_format(std::string_view name);

std::string render_dims(const nn::ArchSpec& arch, const Shape& input_shape, Format format);
std::string render(const analysis::RfReport& report, Format format);
std::string render(const analysis::CostReport& report, Format format);
std::string render(const analysis::RedundancyProfile& profile, Format format);
std::string render(const bounds::BoundAnswer& answer, Format format);
std::string render(const experiments::InvarianceReport& report, Format format);
std::string render(const experiments::LipschitzEstimate& estimate, Format format);

struct DisturbanceOptions {
  bool include_samples = true;
  bool include_per_channel = false;
};
std::string render(std::span<const experiments::DisturbanceReport> arms, Format format,
                   const DisturbanceOptions& options = {});

/// "%.6g"
std::string csv_number(double value);

}  // namespace convshield::report
