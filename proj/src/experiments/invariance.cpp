#include <cmath>
#include <variant>

#include "convshield/error.hpp"
#include "convshield/experiments.hpp"
#include "convshield/nn/ops.hpp"
#include "convshield/parallel.hpp"
#include "convshield/rng.hpp"

namespace convshield::experiments {

InvarianceReport prediction_invariance(const ArchSpec& arch, const nn::Weights& weights,
                                       std::span<const Tensor> inputs,
                                       std::span<const double> epsilons, std::size_t trials,
                                       std::uint64_t seed, std::size_t threads) {
  nn::validate(arch);
  require(!arch.layers.empty() && std::holds_alternative<nn::Linear>(arch.layers.back()),
          "prediction invariance needs an architecture ending in a linear head");
  require(!inputs.empty(), "prediction invariance needs at least one input");
  require(trials >= 1, "prediction invariance needs at least one trial");
  for (double eps : epsilons)
    require(std::isfinite(eps) && eps >= 0.0, "epsilons must be finite and non-negative");

  std::vector<std::size_t> reference(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) reference[i] = nn::argmax(nn::forward(arch, weights, inputs[i]));

  const std::uint64_t pert_seed = derive_seed(seed, seed_purpose::kPerturbation);
  const std::size_t per_epsilon = inputs.size() * trials;
  InvarianceReport report;
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    std::vector<char> same(per_epsilon, 0);
    parallel_for(per_epsilon, threads, [&](std::size_t job) {
      const std::size_t input = job / trials;
      RngStream rng(pert_seed, e * per_epsilon + job);
      const Tensor& x = inputs[input];
      const Tensor perturbed = add(x, sample_uniform_perturbation(x.shape(), epsilons[e], rng));
      same[job] = nn::argmax(nn::forward(arch, weights, perturbed)) == reference[input];
    });
    std::size_t unchanged = 0;
    for (char s : same) unchanged += static_cast<std::size_t>(s);
    report.points.push_back({epsilons[e], unchanged, per_epsilon,
                             static_cast<double>(unchanged) / static_cast<double>(per_epsilon)});
  }
  return report;
}

}  // namespace convshield::experiments
