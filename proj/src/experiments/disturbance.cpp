#include <algorithm>
#include <cmath>
#include <numeric>
#include <variant>

#include "convshield/error.hpp"
#include "convshield/experiments.hpp"
#include "convshield/parallel.hpp"
#include "convshield/rng.hpp"
#include "convshield/simd/dispatch.hpp"

namespace convshield::experiments {

double median(std::vector<double> values) {
  require(!values.empty(), "median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double mean(std::span<const double> values) {
  require(!values.empty(), "mean of an empty sample");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

ArchSpec prepare_trunk(const ArchSpec& arch, ActivationKind activation) {
  nn::validate(arch);
  ArchSpec trunk;
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    const auto& layer = arch.layers[i];
    if (std::holds_alternative<nn::GlobalPool>(layer) || std::holds_alternative<nn::Linear>(layer)) break;
    if (std::holds_alternative<nn::Activation>(layer)) continue;
    if (std::find(arch.stage_markers.begin(), arch.stage_markers.end(), i) != arch.stage_markers.end())
      trunk.stage_markers.push_back(trunk.layers.size());
    trunk.layers.push_back(layer);
    if (activation == ActivationKind::kRelu && std::holds_alternative<nn::ConvLayerSpec>(layer))
      trunk.layers.push_back(nn::Activation{ActivationKind::kRelu});
  }
  return trunk;
}

namespace {

std::uint64_t size_key(Extent e) { return (static_cast<std::uint64_t>(e.height) << 32) ^ e.width; }

std::size_t input_channels(const ExperimentConfig& config, const ArchSpec& trunk) {
  if (config.input_channels) return config.input_channels;
  for (const auto& layer : trunk.layers)
    if (const auto* c = std::get_if<nn::ConvLayerSpec>(&layer)) return c->in_channels;
  return 3;
}

Tensor make_base_input(const ExperimentConfig& config, const Shape& shape, Extent size) {
  if (config.base_input == BaseInputKind::kZeros) return Tensor(shape, 0.0);
  RngStream rng(derive_seed(config.base_seed, seed_purpose::kBaseInput), size_key(size));
  return sample_uniform(shape, 0.0, 1.0, rng);
}

void check_config(const ExperimentConfig& config) {
  require(config.trials >= 1, "experiment needs at least one trial");
  require(std::isfinite(config.epsilon) && config.epsilon >= 0.0, "epsilon must be finite and non-negative");
  require(!config.input_sizes.empty(), "experiment needs at least one input size");
}

struct TrialStats {
  std::vector<double> linf;  // per layer
  std::vector<double> low;
  std::vector<double> high;
  std::vector<double> pooled;         // arms x channels, |P(d)|
  std::vector<double> output_change;  // arms, max over channels
  double final_low = 0.0;             // extremes of the pooled disturbance map
  double final_high = 0.0;
};

void min_max(const Tensor& t, double& lo, double& hi) {
  lo = INFINITY;
  hi = -INFINITY;
  for (double v : t.values()) {
    lo = v < lo ? v : lo;
    hi = v > hi ? v : hi;
  }
}

// Runs every trial for one input size and returns one SizeDisturbance per arm.
std::vector<SizeDisturbance> run_size(const ExperimentConfig& config, const ArchSpec& trunk,
                                      const nn::Weights& weights, Extent size,
                                      std::span<const PoolKind> poolings) {
  const Shape shape{input_channels(config, trunk), size.height, size.width};
  const auto shapes = nn::infer_shapes(trunk, shape);
  const Shape& final_shape = shapes.empty() ? shape : shapes.back();
  if (final_shape.size() != 3)
    throw ShapeError("the simulated trunk must end in a C x H x W feature map");
  const std::size_t channels = final_shape[0];
  const std::size_t n_layers = trunk.layers.size();
  const std::size_t n_arms = poolings.size();

  const Tensor base = make_base_input(config, shape, size);
  const auto base_trace = nn::forward_trace(trunk, weights, base);
  const Tensor& base_final = base_trace.empty() ? base : base_trace.back();
  std::vector<Tensor> base_pooled;
  for (auto kind : poolings) base_pooled.push_back(nn::global_pool(base_final, kind));

  const std::uint64_t pert_seed =
      derive_seed(derive_seed(config.base_seed, seed_purpose::kPerturbation), size_key(size));
  std::vector<TrialStats> trials(config.trials);

  parallel_for(config.trials, config.threads, [&](std::size_t t) {
    RngStream rng(pert_seed, t);
    const Tensor perturbed = add(base, sample_uniform_perturbation(shape, config.epsilon, rng));
    const auto trace = nn::forward_trace(trunk, weights, perturbed);
    TrialStats& stats = trials[t];
    stats.linf.resize(n_layers);
    stats.low.resize(n_layers);
    stats.high.resize(n_layers);
    Tensor d_final;
    for (std::size_t l = 0; l < n_layers; ++l) {
      Tensor d = subtract(trace[l], base_trace[l]);
      min_max(d, stats.low[l], stats.high[l]);
      stats.linf[l] = std::max(std::fabs(stats.low[l]), std::fabs(stats.high[l]));
      if (l + 1 == n_layers) d_final = std::move(d);
    }
    if (n_layers == 0) d_final = subtract(perturbed, base);
    min_max(d_final, stats.final_low, stats.final_high);
    const Tensor& final_map = trace.empty() ? perturbed : trace.back();

    stats.pooled.resize(n_arms * channels);
    stats.output_change.resize(n_arms);
    for (std::size_t arm = 0; arm < n_arms; ++arm) {
      const Tensor pooled_d = nn::global_pool(d_final, poolings[arm]);
      const Tensor pooled_out = nn::global_pool(final_map, poolings[arm]);
      double change = 0.0;
      for (std::size_t c = 0; c < channels; ++c) {
        stats.pooled[arm * channels + c] = std::fabs(pooled_d[c]);
        change = std::max(change, std::fabs(pooled_out[c] - base_pooled[arm][c]));
      }
      stats.output_change[arm] = change;
    }
  });

  // Per-layer statistics are shared by every arm.
  std::vector<LayerDisturbance> layers;
  for (std::size_t l = 0; l < n_layers; ++l) {
    std::vector<double> linf(config.trials);
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t t = 0; t < config.trials; ++t) {
      linf[t] = trials[t].linf[l];
      lo = std::min(lo, trials[t].low[l]);
      hi = std::max(hi, trials[t].high[l]);
    }
    layers.push_back({l, nn::describe(trunk.layers[l]), median(linf), mean(linf),
                      *std::max_element(linf.begin(), linf.end()), lo, hi});
  }

  std::vector<SizeDisturbance> out;
  for (std::size_t arm = 0; arm < n_arms; ++arm) {
    SizeDisturbance s;
    s.input = size;
    s.feature = {final_shape[1], final_shape[2]};
    s.channels = channels;
    s.layers = layers;
    s.pooled.resize(config.trials);
    s.output_change.resize(config.trials);
    s.pooled_per_channel.resize(config.trials * channels);
    for (std::size_t t = 0; t < config.trials; ++t) {
      const double* row = trials[t].pooled.data() + arm * channels;
      std::copy(row, row + channels, s.pooled_per_channel.begin() + static_cast<std::ptrdiff_t>(t * channels));
      s.pooled[t] = *std::max_element(row, row + channels);
      s.output_change[t] = trials[t].output_change[arm];
    }
    s.pooled_median = median(s.pooled);
    s.pooled_mean = mean(s.pooled);
    s.pooled_max = *std::max_element(s.pooled.begin(), s.pooled.end());
    s.output_change_median = median(s.output_change);
    s.output_change_mean = mean(s.output_change);
    s.output_change_max = *std::max_element(s.output_change.begin(), s.output_change.end());
    s.a = INFINITY;
    s.b = -INFINITY;
    for (const auto& trial : trials) {
      s.a = std::min(s.a, trial.final_low);
      s.b = std::max(s.b, trial.final_high);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::vector<DisturbanceReport> run_pooling_arms(const ExperimentConfig& config,
                                                std::span<const PoolKind> poolings) {
  check_config(config);
  require(!poolings.empty(), "at least one pooling kind is required");
  const ArchSpec trunk = prepare_trunk(config.arch, config.activation);
  const nn::Weights weights = nn::init_network(trunk, config.init, config.base_seed);

  std::vector<DisturbanceReport> reports;
  for (auto kind : poolings)
    reports.push_back({kind, config.init, config.activation, config.epsilon, config.trials,
                       config.base_seed, {}});
  for (const Extent& size : config.input_sizes) {
    auto arms = run_size(config, trunk, weights, size, poolings);
    for (std::size_t arm = 0; arm < arms.size(); ++arm) reports[arm].sizes.push_back(std::move(arms[arm]));
  }
  return reports;
}

DisturbanceReport run_disturbance(const ExperimentConfig& config) {
  const PoolKind kinds[] = {config.pooling};
  return std::move(run_pooling_arms(config, kinds).front());
}

std::vector<SweepEntry> run_init_sweep(const ExperimentConfig& base,
                                       std::span<const InitStrategy> strategies,
                                       std::span<const ActivationKind> activations) {
  require(!strategies.empty() && !activations.empty(), "init sweep needs strategies and activations");
  std::vector<SweepEntry> entries;
  for (auto activation : activations)
    for (const auto& strategy : strategies) {
      ExperimentConfig config = base;
      config.init = strategy;
      config.activation = activation;
      entries.push_back({strategy, activation, run_disturbance(config)});
    }
  return entries;
}

}  // namespace convshield::experiments
