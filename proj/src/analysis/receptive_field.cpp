#include <algorithm>
#include <numeric>
#include <variant>

#include "convshield/analysis.hpp"
#include "convshield/error.hpp"

namespace convshield::analysis {

namespace {

// Non-negative fraction kept in lowest terms; jumps become fractional after
// upsampling.
struct Fraction {
  std::int64_t num = 1;
  std::int64_t den = 1;

  Fraction normalized() const {
    const std::int64_t g = std::gcd(num, den);
    return g ? Fraction{num / g, den / g} : *this;
  }
  Fraction operator*(std::int64_t k) const { return Fraction{num * k, den}.normalized(); }
  Fraction operator/(std::int64_t k) const { return Fraction{num, den * k}.normalized(); }
  Fraction operator+(const Fraction& o) const {
    return Fraction{num * o.den + o.num * den, den * o.den}.normalized();
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  // this >= n
  bool covers(std::size_t n) const { return num >= static_cast<std::int64_t>(n) * den; }
};

}  // namespace

RfReport receptive_field(const ArchSpec& arch, Extent input) {
  nn::validate(arch);
  require(input.height >= 1 && input.width >= 1, "receptive_field: input extent must be positive");
  RfReport report{input, {}, std::nullopt};
  Fraction r{1, 1};
  Fraction j{1, 1};
  Extent feature = input;
  std::size_t conv_index = 0;
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    const auto& layer = arch.layers[i];
    if (std::holds_alternative<nn::GlobalPool>(layer) || std::holds_alternative<nn::Linear>(layer)) break;
    if (const auto* up = std::get_if<nn::Upsample>(&layer)) {
      j = j / static_cast<std::int64_t>(up->scale);
      feature = {feature.height * up->scale, feature.width * up->scale};
      continue;
    }
    const auto* conv = std::get_if<nn::ConvLayerSpec>(&layer);
    if (!conv) continue;  // activations leave r and j unchanged
    r = r + j * static_cast<std::int64_t>(conv->kernel - 1);
    j = j * static_cast<std::int64_t>(conv->stride);
    feature = nn::output_dims(feature, *conv);
    ++conv_index;
    report.entries.push_back({conv_index, i, r.value(), j.value(), feature});
    if (!report.global_layer && r.covers(std::max(input.height, input.width)))
      report.global_layer = conv_index;
  }
  return report;
}

}  // namespace convshield::analysis
