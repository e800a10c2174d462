#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "convshield/nn/layers.hpp"

namespace convshield::bounds {

using nn::PoolKind;

struct BoundResult {
  double value = 0.0;
  /// Probability outputs only: the raw bound exceeded 1 and was clamped.
  bool saturated = false;
};

/// min(1, 2 exp(-2 H W gamma^2 / (b - a)^2)); exactly 0 when a == b.
BoundResult avg_pool_tail_bound(std::size_t height, std::size_t width, double a, double b, double gamma);

/// Smallest gamma with 2 exp(-2 H W gamma^2 / (b - a)^2) <= p, which is
/// (b - a) sqrt(ln(2 / p) / (2 H W)). Returns 0 for p >= 2 or a == b.
BoundResult avg_pool_gamma_min(std::size_t height, std::size_t width, double a, double b, double p);

/// min(1, (b - a) sqrt(ln sqrt(2 H W)) / gamma); natural logarithm.
BoundResult max_pool_tail_bound(std::size_t height, std::size_t width, double a, double b, double gamma);

/// (b - a) sqrt(ln sqrt(2 H W)) / p, for 0 < p <= 1.
BoundResult max_pool_gamma_min(std::size_t height, std::size_t width, double a, double b, double p);

/// Fraction of samples with |value| >= gamma.
double empirical_tail(std::span<const double> samples, double gamma);

/// Exactly one of gamma or p is set; the result is the other quantity.
struct BoundQuery {
  PoolKind pooling = PoolKind::kAverage;
  std::size_t height = 1;
  std::size_t width = 1;
  double a = 0.0;
  double b = 0.0;
  std::optional<double> gamma;
  std::optional<double> p;
};

struct BoundAnswer {
  BoundQuery query;
  double gamma;
  double p;
  bool saturated;
};

BoundAnswer evaluate(const BoundQuery& query);

}  // namespace convshield::bounds
