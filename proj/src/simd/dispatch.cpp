#include "convshield/simd/dispatch.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "convshield/error.hpp"
#include "internal.hpp"

namespace convshield::simd {

std::string_view to_string(SimdLevel level) {
  switch (level) {
    case SimdLevel::kScalar: return "scalar";
    case SimdLevel::kAvx2: return "avx2";
    case SimdLevel::kAvx512: return "avx512";
  }
  return "unknown";
}

std::optional<SimdLevel> parse_simd_level(std::string_view name) {
  if (name == "scalar") return SimdLevel::kScalar;
  if (name == "avx2") return SimdLevel::kAvx2;
  if (name == "avx512") return SimdLevel::kAvx512;
  return std::nullopt;
}

bool level_available(SimdLevel level) {
  switch (level) {
    case SimdLevel::kScalar: return true;
    case SimdLevel::kAvx2:
#if defined(CONVSHIELD_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case SimdLevel::kAvx512:
#if defined(CONVSHIELD_HAVE_AVX512)
      return __builtin_cpu_supports("avx512f");
#else
      return false;
#endif
  }
  return false;
}

std::vector<SimdLevel> available_levels() {
  std::vector<SimdLevel> levels;
  for (auto level : {SimdLevel::kScalar, SimdLevel::kAvx2, SimdLevel::kAvx512})
    if (level_available(level)) levels.push_back(level);
  return levels;
}

SimdLevel best_available_level() { return available_levels().back(); }

const Kernels& kernels_for(SimdLevel level) {
  if (!level_available(level))
    throw InvalidArgument("SIMD level '" + std::string(to_string(level)) +
                          "' is not available on this machine");
  switch (level) {
#if defined(CONVSHIELD_HAVE_AVX2)
    case SimdLevel::kAvx2: return detail::avx2_kernels();
#endif
#if defined(CONVSHIELD_HAVE_AVX512)
    case SimdLevel::kAvx512: return detail::avx512_kernels();
#endif
    default: return detail::scalar_kernels();
  }
}

namespace {

SimdLevel initial_level() {
  if (const char* env = std::getenv("CONVSHIELD_SIMD")) {
    if (auto level = parse_simd_level(env); level && level_available(*level)) return *level;
  }
  return best_available_level();
}

std::atomic<const Kernels*>& active_slot() {
  static std::atomic<const Kernels*> slot{&kernels_for(initial_level())};
  return slot;
}

}  // namespace

const Kernels& active_kernels() { return *active_slot().load(std::memory_order_acquire); }

SimdLevel active_level() { return active_kernels().level; }

void set_active_level(SimdLevel level) {
  active_slot().store(&kernels_for(level), std::memory_order_release);
}

}  // namespace convshield::simd
