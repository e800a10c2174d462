#include <cmath>
#include <cstddef>

#include "internal.hpp"

namespace convshield::simd::detail {

void conv2d_scalar(const ConvGeometry& g, const double* input, const double* weights,
                   double* output) {
  const std::size_t k = g.kernel;
  const std::size_t in_plane = g.in_height * g.in_width;
  const std::size_t w_per_out = g.in_channels * k * k;
  // Padded taps contribute w*0 to the oracle sum; the accumulator can never
  // hold -0.0, so skipping them is bit-identical.
  for (std::size_t co = 0; co < g.out_channels; ++co) {
    const double* w_co = weights + co * w_per_out;
    double* out_plane = output + co * g.out_height * g.out_width;
    for (std::size_t oh = 0; oh < g.out_height; ++oh) {
      for (std::size_t ow = 0; ow < g.out_width; ++ow) {
        double acc = 0.0;
        for (std::size_t ci = 0; ci < g.in_channels; ++ci) {
          const double* plane = input + ci * in_plane;
          const double* w_ci = w_co + ci * k * k;
          for (std::size_t m = 0; m < k; ++m) {
            const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oh * g.stride + m) -
                                      static_cast<std::ptrdiff_t>(g.padding);
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.in_height)) continue;
            const double* row = plane + static_cast<std::size_t>(iy) * g.in_width;
            for (std::size_t n = 0; n < k; ++n) {
              const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ow * g.stride + n) -
                                        static_cast<std::ptrdiff_t>(g.padding);
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(g.in_width)) continue;
              acc += w_ci[m * k + n] * row[ix];
            }
          }
        }
        out_plane[oh * g.out_width + ow] = acc;
      }
    }
  }
}

namespace {

void relu_scalar(double* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) data[i] = data[i] > 0.0 ? data[i] : 0.0;
}

void add_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void subtract_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

double max_scalar(const double* data, std::size_t n) {
  double m = -INFINITY;
  for (std::size_t i = 0; i < n; ++i) m = data[i] > m ? data[i] : m;
  return m;
}

double max_abs_scalar(const double* data, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::fabs(data[i]);
    m = v > m ? v : m;
  }
  return m;
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::fabs(a[i] - b[i]);
    m = v > m ? v : m;
  }
  return m;
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels table{SimdLevel::kScalar, conv2d_scalar,  relu_scalar,
                             add_scalar,         subtract_scalar, max_scalar,
                             max_abs_scalar,     max_abs_diff_scalar};
  return table;
}

}  // namespace convshield::simd::detail
