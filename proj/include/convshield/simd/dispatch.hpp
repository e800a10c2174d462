#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace convshield::simd {

enum class SimdLevel { kScalar, kAvx2, kAvx512 };

std::string_view to_string(SimdLevel level);
std::optional<SimdLevel> parse_simd_level(std::string_view name);

struct ConvGeometry {
  std::size_t in_channels;
  std::size_t in_height;
  std::size_t in_width;
  std::size_t out_channels;
  std::size_t out_height;
  std::size_t out_width;
  std::size_t kernel;
  std::size_t stride;
  std::size_t padding;
};

// Every variant of a kernel produces bit-identical results: the vector paths
// keep the scalar accumulation order per output element and never fuse
// multiply-add.
struct Kernels {
  SimdLevel level;
  /// Cross-correlation, zero padding, no bias. Each output accumulates
  /// w*x over (in_channel, row, col) in that order starting from +0.0.
  void (*conv2d)(const ConvGeometry& geom, const double* input, const double* weights,
                 double* output);
  void (*relu)(double* data, std::size_t n);
  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  void (*subtract)(const double* a, const double* b, double* out, std::size_t n);
  double (*max)(const double* data, std::size_t n);
  double (*max_abs)(const double* data, std::size_t n);
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
};

/// Variants compiled into this binary and supported by the running CPU.
std::vector<SimdLevel> available_levels();
bool level_available(SimdLevel level);
SimdLevel best_available_level();

const Kernels& kernels_for(SimdLevel level);

/// Kernels used by the library. Starts at CONVSHIELD_SIMD if set and
/// available, otherwise the best available level.
const Kernels& active_kernels();
SimdLevel active_level();
void set_active_level(SimdLevel level);

}  // namespace convshield::simd
