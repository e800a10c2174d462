#pragma once

#include <string>
#include <string_view>

#include "convshield/rng.hpp"
#include "convshield/tensor.hpp"

namespace convshield {

enum class InitKind { kNormal, kUniform, kXavierNormal, kXavierUniform };

std::string_view to_string(InitKind kind);
/// Accepts "normal", "uniform", "xavier_normal", "xavier_uniform".
InitKind parse_init_kind(std::string_view name);

struct InitStrategy {
  InitKind kind = InitKind::kXavierNormal;
  // Normal parameters.
  double mean = 0.0;
  double stddev = 0.05;
  // Uniform bounds.
  double low = -0.05;
  double high = 0.05;

  static InitStrategy normal(double mean = 0.0, double stddev = 0.05) {
    return {InitKind::kNormal, mean, stddev, -0.05, 0.05};
  }
  static InitStrategy uniform(double low = -0.05, double high = 0.05) {
    return {InitKind::kUniform, 0.0, 0.05, low, high};
  }
  static InitStrategy xavier_normal() { return {InitKind::kXavierNormal}; }
  static InitStrategy xavier_uniform() { return {InitKind::kXavierUniform}; }

  std::string describe() const;

  friend bool operator==(const InitStrategy&, const InitStrategy&) = default;
};

struct Fans {
  double fan_in;
  double fan_out;
};

/// Conv filters (out, in, k, k): fan_in = in*k*k, fan_out = out*k*k.
/// Linear weights (out, in): fan_in = in, fan_out = out.
Fans compute_fans(const Shape& shape);

double xavier_normal_stddev(const Fans& fans);
double xavier_uniform_bound(const Fans& fans);

Tensor init_weights(const Shape& shape, const InitStrategy& strategy, RngStream& rng);

/// i.i.d. U[lo, hi) draws.
Tensor sample_uniform(const Shape& shape, double lo, double hi, RngStream& rng);

/// i.i.d. draws from U[-epsilon, epsilon]; epsilon == 0 gives exact zeros.
Tensor sample_uniform_perturbation(const Shape& shape, double epsilon, RngStream& rng);

}  // namespace convshield
