#include "convshield/error.hpp"
#include "convshield/experiments.hpp"
#include "convshield/rng.hpp"

namespace convshield::experiments {

LipschitzEstimate lipschitz_lower_bound(const ArchSpec& arch, const nn::Weights& weights,
                                        std::span<const Tensor> probes, std::size_t pair_count,
                                        std::uint64_t seed) {
  require(pair_count >= 1, "lipschitz estimate needs at least one pair");
  require(!probes.empty(), "lipschitz estimate needs probe inputs");

  std::vector<Tensor> outputs;
  outputs.reserve(probes.size());
  for (const auto& x : probes) outputs.push_back(nn::forward(arch, weights, x));

  RngStream rng(derive_seed(seed, seed_purpose::kPairs), 0);
  const std::uint64_t n = probes.size();
  LipschitzEstimate best{0.0, 0, 0, 0};
  for (std::size_t k = 0; k < pair_count; ++k) {
    const std::size_t i = static_cast<std::size_t>(rng.next_u64() % n);
    const std::size_t j = static_cast<std::size_t>(rng.next_u64() % n);
    if (i == j) continue;
    const double input_gap = linf_distance(probes[i], probes[j]);
    if (input_gap == 0.0) continue;
    const double ratio = linf_distance(outputs[i], outputs[j]) / input_gap;
    if (best.pairs_evaluated == 0 || ratio > best.lower_bound) {
      best.lower_bound = ratio;
      best.first = i;
      best.second = j;
    }
    ++best.pairs_evaluated;
  }
  if (best.pairs_evaluated == 0)
    throw InvalidArgument("every sampled probe pair was coincident; supply distinct probes");
  return best;
}

}  // namespace convshield::experiments
