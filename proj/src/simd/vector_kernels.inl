// Vector kernels written once against a register-traits type V.  Included by
// each ISA-specific translation unit, which defines V in an anonymous
// namespace so the instantiations never collide across target flags.
//
// V provides: Reg, kLanes, kChannelBlock, zero(), load(), store(),
// broadcast(), add(), sub(), mul(), max(), abs().
//
// The including file must already have <array>, <cmath>, <cstddef> and
// <vector>; this file is textually included inside a namespace.

namespace {

struct ConvPlan {
  const double* src;  // input, zero-padded when padding > 0
  std::size_t src_h;
  std::size_t src_w;
  const double* weights;
  double* output;
  std::size_t in_channels;
  std::size_t out_h;
  std::size_t out_w;
  std::size_t k;
  std::size_t w_per_out;
};

template <class V, std::size_t CB, std::size_t NV>
inline void conv_block(const ConvPlan& p, std::size_t co0, std::size_t oh, std::size_t ow) {
  using Reg = typename V::Reg;
  constexpr std::size_t L = V::kLanes;
  Reg acc[CB][NV];
#pragma GCC unroll 16
  for (std::size_t c = 0; c < CB; ++c)
#pragma GCC unroll 4
    for (std::size_t v = 0; v < NV; ++v) acc[c][v] = V::zero();

  const std::size_t k = p.k;
  const std::size_t plane = p.src_h * p.src_w;
  for (std::size_t ci = 0; ci < p.in_channels; ++ci) {
    const double* src_plane = p.src + ci * plane;
    const double* w_ci = p.weights + co0 * p.w_per_out + ci * k * k;
    for (std::size_t m = 0; m < k; ++m) {
      const double* row = src_plane + (oh + m) * p.src_w + ow;
      const double* w_m = w_ci + m * k;
      for (std::size_t n = 0; n < k; ++n) {
        Reg x[NV];
#pragma GCC unroll 4
        for (std::size_t v = 0; v < NV; ++v) x[v] = V::load(row + n + v * L);
#pragma GCC unroll 16
        for (std::size_t c = 0; c < CB; ++c) {
          const Reg w = V::broadcast(w_m[c * p.w_per_out + n]);
#pragma GCC unroll 4
          for (std::size_t v = 0; v < NV; ++v) acc[c][v] = V::add(acc[c][v], V::mul(w, x[v]));
        }
      }
    }
  }

  const std::size_t out_plane = p.out_h * p.out_w;
#pragma GCC unroll 16
  for (std::size_t c = 0; c < CB; ++c) {
    double* out = p.output + (co0 + c) * out_plane + oh * p.out_w + ow;
#pragma GCC unroll 4
    for (std::size_t v = 0; v < NV; ++v) V::store(out + v * L, acc[c][v]);
  }
}

inline void conv_tail(const ConvPlan& p, std::size_t co, std::size_t oh, std::size_t ow) {
  const std::size_t k = p.k;
  const std::size_t plane = p.src_h * p.src_w;
  const double* w_co = p.weights + co * p.w_per_out;
  double acc = 0.0;
  for (std::size_t ci = 0; ci < p.in_channels; ++ci) {
    const double* src_plane = p.src + ci * plane;
    for (std::size_t m = 0; m < k; ++m) {
      const double* row = src_plane + (oh + m) * p.src_w + ow;
      for (std::size_t n = 0; n < k; ++n) acc += w_co[(ci * k + m) * k + n] * row[n];
    }
  }
  p.output[co * p.out_h * p.out_w + oh * p.out_w + ow] = acc;
}

template <class V, std::size_t CB>
void conv_channel_block(const ConvPlan& p, std::size_t co0) {
  constexpr std::size_t L = V::kLanes;
  for (std::size_t oh = 0; oh < p.out_h; ++oh) {
    std::size_t ow = 0;
    for (; ow + 3 * L <= p.out_w; ow += 3 * L) conv_block<V, CB, 3>(p, co0, oh, ow);
    if (ow + 2 * L <= p.out_w) {
      conv_block<V, CB, 2>(p, co0, oh, ow);
      ow += 2 * L;
    }
    if (ow + L <= p.out_w) {
      conv_block<V, CB, 1>(p, co0, oh, ow);
      ow += L;
    }
    for (; ow < p.out_w; ++ow)
      for (std::size_t c = 0; c < CB; ++c) conv_tail(p, co0 + c, oh, ow);
  }
}

template <class V>
void conv2d_vector(const convshield::simd::ConvGeometry& g, const double* input,
                   const double* weights, double* output) {
  if (g.stride != 1) {
    convshield::simd::detail::conv2d_scalar(g, input, weights, output);
    return;
  }
  const std::size_t pad = g.padding;
  const std::size_t src_h = g.in_height + 2 * pad;
  const std::size_t src_w = g.in_width + 2 * pad;
  const double* src = input;
  thread_local std::vector<double> padded;
  if (pad > 0) {
    padded.assign(g.in_channels * src_h * src_w, 0.0);
    for (std::size_t c = 0; c < g.in_channels; ++c)
      for (std::size_t y = 0; y < g.in_height; ++y) {
        const double* from = input + (c * g.in_height + y) * g.in_width;
        double* to = padded.data() + (c * src_h + y + pad) * src_w + pad;
        for (std::size_t x = 0; x < g.in_width; ++x) to[x] = from[x];
      }
    src = padded.data();
  }

  const ConvPlan plan{src,          src_h,    src_w,        weights,  output,
                      g.in_channels, g.out_height, g.out_width, g.kernel,
                      g.in_channels * g.kernel * g.kernel};
  constexpr std::size_t CB = V::kChannelBlock;
  std::size_t co = 0;
  for (; co + CB <= g.out_channels; co += CB) conv_channel_block<V, CB>(plan, co);
  if constexpr (CB > 4) {
    for (; co + 4 <= g.out_channels; co += 4) conv_channel_block<V, 4>(plan, co);
  }
  for (; co < g.out_channels; ++co) conv_channel_block<V, 1>(plan, co);
}

template <class V>
void relu_vector(double* data, std::size_t n) {
  std::size_t i = 0;
  const auto zero = V::zero();
  for (; i + V::kLanes <= n; i += V::kLanes) V::store(data + i, V::max(V::load(data + i), zero));
  for (; i < n; ++i) data[i] = data[i] > 0.0 ? data[i] : 0.0;
}

template <class V>
void add_vector(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + V::kLanes <= n; i += V::kLanes)
    V::store(out + i, V::add(V::load(a + i), V::load(b + i)));
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

template <class V>
void subtract_vector(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + V::kLanes <= n; i += V::kLanes)
    V::store(out + i, V::sub(V::load(a + i), V::load(b + i)));
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

template <class V>
double horizontal_max(typename V::Reg r, double init) {
  std::array<double, V::kLanes> lanes;
  V::store(lanes.data(), r);
  double m = init;
  for (double v : lanes) m = v > m ? v : m;
  return m;
}

template <class V>
double max_vector(const double* data, std::size_t n) {
  std::size_t i = 0;
  auto acc = V::broadcast(-INFINITY);
  for (; i + V::kLanes <= n; i += V::kLanes) acc = V::max(V::load(data + i), acc);
  double m = horizontal_max<V>(acc, -INFINITY);
  for (; i < n; ++i) m = data[i] > m ? data[i] : m;
  return m;
}

template <class V>
double max_abs_vector(const double* data, std::size_t n) {
  std::size_t i = 0;
  auto acc = V::zero();
  for (; i + V::kLanes <= n; i += V::kLanes) acc = V::max(V::abs(V::load(data + i)), acc);
  double m = horizontal_max<V>(acc, 0.0);
  for (; i < n; ++i) {
    const double v = std::fabs(data[i]);
    m = v > m ? v : m;
  }
  return m;
}

template <class V>
double max_abs_diff_vector(const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  auto acc = V::zero();
  for (; i + V::kLanes <= n; i += V::kLanes)
    acc = V::max(V::abs(V::sub(V::load(a + i), V::load(b + i))), acc);
  double m = horizontal_max<V>(acc, 0.0);
  for (; i < n; ++i) {
    const double v = std::fabs(a[i] - b[i]);
    m = v > m ? v : m;
  }
  return m;
}

}  // namespace
