#include "convshield/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "convshield/error.hpp"

namespace convshield::bounds {

namespace {

void check_query(std::size_t height, std::size_t width, double a, double b) {
  require(height >= 1 && width >= 1, "feature dimensions H and W must be positive");
  require(std::isfinite(a) && std::isfinite(b), "disturbance range must be finite");
  require(a <= b, "disturbance range needs a <= b");
}

void check_gamma(double gamma) {
  require(!std::isnan(gamma) && gamma > 0.0, "gamma must be positive");
}

BoundResult clamp_probability(double raw) {
  if (raw > 1.0) return {1.0, true};
  return {raw, false};
}

double area(std::size_t height, std::size_t width) {
  return static_cast<double>(height) * static_cast<double>(width);
}

// sqrt(ln sqrt(2 H W)), the max-pooling growth term.
double max_pool_factor(std::size_t height, std::size_t width) {
  return std::sqrt(0.5 * std::log(2.0 * area(height, width)));
}

}  // namespace

BoundResult avg_pool_tail_bound(std::size_t height, std::size_t width, double a, double b, double gamma) {
  check_query(height, width, a, b);
  check_gamma(gamma);
  if (a == b) return {0.0, false};
  const double range = b - a;
  const double exponent = -2.0 * area(height, width) * gamma * gamma / (range * range);
  return clamp_probability(2.0 * std::exp(exponent));
}

BoundResult avg_pool_gamma_min(std::size_t height, std::size_t width, double a, double b, double p) {
  check_query(height, width, a, b);
  require(!std::isnan(p) && p > 0.0, "probability p must be positive");
  if (a == b || p >= 2.0) return {0.0, false};
  return {(b - a) * std::sqrt(std::log(2.0 / p) / (2.0 * area(height, width))), false};
}

BoundResult max_pool_tail_bound(std::size_t height, std::size_t width, double a, double b, double gamma) {
  check_query(height, width, a, b);
  check_gamma(gamma);
  if (a == b) return {0.0, false};
  return clamp_probability((b - a) * max_pool_factor(height, width) / gamma);
}

BoundResult max_pool_gamma_min(std::size_t height, std::size_t width, double a, double b, double p) {
  check_query(height, width, a, b);
  require(!std::isnan(p) && p > 0.0 && p <= 1.0, "probability p must lie in (0, 1] for max pooling");
  if (a == b) return {0.0, false};
  return {(b - a) * max_pool_factor(height, width) / p, false};
}

double empirical_tail(std::span<const double> samples, double gamma) {
  require(!samples.empty(), "empirical_tail needs at least one sample");
  require(!std::isnan(gamma), "gamma must not be NaN");
  const auto hits = std::count_if(samples.begin(), samples.end(),
                                  [gamma](double v) { return std::fabs(v) >= gamma; });
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

BoundAnswer evaluate(const BoundQuery& q) {
  require(q.gamma.has_value() != q.p.has_value(), "bound query needs exactly one of gamma or p");
  const bool average = q.pooling == PoolKind::kAverage;
  if (q.gamma) {
    const BoundResult r = average ? avg_pool_tail_bound(q.height, q.width, q.a, q.b, *q.gamma)
                                  : max_pool_tail_bound(q.height, q.width, q.a, q.b, *q.gamma);
    return {q, *q.gamma, r.value, r.saturated};
  }
  const BoundResult r = average ? avg_pool_gamma_min(q.height, q.width, q.a, q.b, *q.p)
                                : max_pool_gamma_min(q.height, q.width, q.a, q.b, *q.p);
  return {q, r.value, *q.p, false};
}

}  // namespace convshield::bounds
