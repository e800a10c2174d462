#include <immintrin.h>

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "internal.hpp"

namespace convshield::simd::detail {
namespace {

struct Avx2 {
  using Reg = __m256d;
  static constexpr std::size_t kLanes = 4;
  static constexpr std::size_t kChannelBlock = 4;  // 4 x 3 accumulators of 16 ymm

  static Reg zero() { return _mm256_setzero_pd(); }
  static Reg load(const double* p) { return _mm256_loadu_pd(p); }
  static void store(double* p, Reg r) { _mm256_storeu_pd(p, r); }
  static Reg broadcast(double v) { return _mm256_set1_pd(v); }
  static Reg add(Reg a, Reg b) { return _mm256_add_pd(a, b); }
  static Reg sub(Reg a, Reg b) { return _mm256_sub_pd(a, b); }
  static Reg mul(Reg a, Reg b) { return _mm256_mul_pd(a, b); }
  static Reg max(Reg a, Reg b) { return _mm256_max_pd(a, b); }
  static Reg abs(Reg a) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), a); }
};

}  // namespace
}  // namespace convshield::simd::detail

namespace convshield::simd::detail {
#include "vector_kernels.inl"

const Kernels& avx2_kernels() {
  static const Kernels table{SimdLevel::kAvx2,
                             conv2d_vector<Avx2>,
                             relu_vector<Avx2>,
                             add_vector<Avx2>,
                             subtract_vector<Avx2>,
                             max_vector<Avx2>,
                             max_abs_vector<Avx2>,
                             max_abs_diff_vector<Avx2>};
  return table;
}

}  // namespace convshield::simd::detail
