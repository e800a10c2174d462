#include <immintrin.h>

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "internal.hpp"

namespace convshield::simd::detail {
namespace {

struct Avx512 {
  using Reg = __m512d;
  static constexpr std::size_t kLanes = 8;
  static constexpr std::size_t kChannelBlock = 8;  // 8 x 3 accumulators of 32 zmm

  static Reg zero() { return _mm512_setzero_pd(); }
  static Reg load(const double* p) { return _mm512_loadu_pd(p); }
  static void store(double* p, Reg r) { _mm512_storeu_pd(p, r); }
  static Reg broadcast(double v) { return _mm512_set1_pd(v); }
  static Reg add(Reg a, Reg b) { return _mm512_add_pd(a, b); }
  static Reg sub(Reg a, Reg b) { return _mm512_sub_pd(a, b); }
  static Reg mul(Reg a, Reg b) { return _mm512_mul_pd(a, b); }
  static Reg max(Reg a, Reg b) { return _mm512_max_pd(a, b); }
  static Reg abs(Reg a) { return _mm512_abs_pd(a); }
};

}  // namespace
}  // namespace convshield::simd::detail

namespace convshield::simd::detail {
#include "vector_kernels.inl"

const Kernels& avx512_kernels() {
  static const Kernels table{SimdLevel::kAvx512,
                             conv2d_vector<Avx512>,
                             relu_vector<Avx512>,
                             add_vector<Avx512>,
                             subtract_vector<Avx512>,
                             max_vector<Avx512>,
                             max_abs_vector<Avx512>,
                             max_abs_diff_vector<Avx512>};
  return table;
}

}  // namespace convshield::simd::detail
