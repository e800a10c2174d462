#include "convshield/init.hpp"

#include <cmath>
#include <sstream>

#include "convshield/error.hpp"

namespace convshield {

std::string_view to_string(InitKind kind) {
  switch (kind) {
    case InitKind::kNormal: return "normal";
    case InitKind::kUniform: return "uniform";
    case InitKind::kXavierNormal: return "xavier_normal";
    case InitKind::kXavierUniform: return "xavier_uniform";
  }
  return "unknown";
}

InitKind parse_init_kind(std::string_view name) {
  if (name == "normal") return InitKind::kNormal;
  if (name == "uniform") return InitKind::kUniform;
  if (name == "xavier_normal") return InitKind::kXavierNormal;
  if (name == "xavier_uniform") return InitKind::kXavierUniform;
  throw InvalidArgument("unknown init strategy '" + std::string(name) +
                        "' (expected normal, uniform, xavier_normal or xavier_uniform)");
}

std::string InitStrategy::describe() const {
  std::ostringstream out;
  out << to_string(kind);
  if (kind == InitKind::kNormal) out << "(mean=" << mean << ",std=" << stddev << ")";
  if (kind == InitKind::kUniform) out << "(" << low << "," << high << ")";
  return out.str();
}

Fans compute_fans(const Shape& shape) {
  require(shape.size() == 2 || shape.size() == 4,
          "weight shape must be (out, in) or (out, in, k, k), got " + shape_to_string(shape));
  const double receptive = shape.size() == 4 ? static_cast<double>(shape[2] * shape[3]) : 1.0;
  return {static_cast<double>(shape[1]) * receptive, static_cast<double>(shape[0]) * receptive};
}

double xavier_normal_stddev(const Fans& fans) {
  return std::sqrt(2.0 / (fans.fan_in + fans.fan_out));
}

double xavier_uniform_bound(const Fans& fans) {
  return std::sqrt(6.0 / (fans.fan_in + fans.fan_out));
}

Tensor init_weights(const Shape& shape, const InitStrategy& strategy, RngStream& rng) {
  for (auto d : shape) require(d > 0, "init_weights: zero-sized shape " + shape_to_string(shape));
  Tensor out(shape);
  switch (strategy.kind) {
    case InitKind::kNormal:
      require(strategy.stddev >= 0.0, "normal init: stddev must be non-negative");
      for (double& v : out.values()) v = strategy.mean + strategy.stddev * rng.normal();
      break;
    case InitKind::kUniform:
      require(strategy.low <= strategy.high, "uniform init: low must not exceed high");
      for (double& v : out.values()) v = rng.uniform(strategy.low, strategy.high);
      break;
    case InitKind::kXavierNormal: {
      const double sd = xavier_normal_stddev(compute_fans(shape));
      for (double& v : out.values()) v = sd * rng.normal();
      break;
    }
    case InitKind::kXavierUniform: {
      const double bound = xavier_uniform_bound(compute_fans(shape));
      for (double& v : out.values()) v = rng.uniform(-bound, bound);
      break;
    }
  }
  return out;
}

Tensor sample_uniform(const Shape& shape, double lo, double hi, RngStream& rng) {
  require(lo <= hi, "sample_uniform: lo must not exceed hi");
  Tensor out(shape);
  for (double& v : out.values()) v = rng.uniform(lo, hi);
  return out;
}

Tensor sample_uniform_perturbation(const Shape& shape, double epsilon, RngStream& rng) {
  require(epsilon >= 0.0 && std::isfinite(epsilon),
          "perturbation epsilon must be finite and non-negative");
  if (epsilon == 0.0) return Tensor(shape, 0.0);
  return sample_uniform(shape, -epsilon, epsilon, rng);
}

}  // namespace convshield
