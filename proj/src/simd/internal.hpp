#pragma once

#include "convshield/simd/dispatch.hpp"

namespace convshield::simd::detail {

const Kernels& scalar_kernels();
#if defined(CONVSHIELD_HAVE_AVX2)
const Kernels& avx2_kernels();
#endif
#if defined(CONVSHIELD_HAVE_AVX512)
const Kernels& avx512_kernels();
#endif

// Reference convolution; the vector variants fall back to it for strides > 1.
void conv2d_scalar(const ConvGeometry& g, const double* input, const double* weights,
                   double* output);

}  // namespace convshield::simd::detail
