#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "convshield/init.hpp"
#include "convshield/nn/forward.hpp"
#include "convshield/nn/layers.hpp"
#include "convshield/nn/ops.hpp"
#include "convshield/tensor.hpp"

namespace convshield::experiments {

using nn::ActivationKind;
using nn::ArchSpec;
using nn::Extent;
using nn::PoolKind;

enum class BaseInputKind {
  kUniformUnit,  // seeded U[0, 1) image, fixed per (seed, input size)
  kZeros,
};

struct ExperimentConfig {
  /// Convolutional trunk g. Anything from the first pool or linear layer on
  /// is dropped; activations are replaced according to `activation`.
  ArchSpec arch;
  InitStrategy init = InitStrategy::xavier_normal();
  ActivationKind activation = ActivationKind::kIdentity;
  double epsilon = 0.1;
  std::size_t trials = 1000;
  std::uint64_t base_seed = 0;
  std::vector<Extent> input_sizes{{16, 16}, {32, 32}, {64, 64}};
  PoolKind pooling = PoolKind::kAverage;
  BaseInputKind base_input = BaseInputKind::kUniformUnit;
  /// Input channel count; 0 takes it from the first conv (3 if there is none).
  std::size_t input_channels = 0;
  std::size_t threads = 1;
};

/// Trunk actually simulated: layers before the first pool/linear, existing
/// activations removed, and a ReLU after every conv when requested.
ArchSpec prepare_trunk(const ArchSpec& arch, ActivationKind activation);

struct LayerDisturbance {
  std::size_t layer_index;
  std::string layer;
  // Statistics of the per-trial l-inf norm of d = g_l(x + delta) - g_l(x).
  double median;
  double mean;
  double max;
  // Extremes of d_ij over all trials and positions.
  double a;
  double b;
};

struct SizeDisturbance {
  Extent input;
  Extent feature;  // final trunk map, the map being pooled
  std::size_t channels;
  std::vector<LayerDisturbance> layers;
  /// Per trial, max over channels of |P(d)|: the pooling operator applied to
  /// the final disturbance map.
  std::vector<double> pooled;
  /// Per trial, max over channels of |P(g(x + delta)) - P(g(x))|.
  std::vector<double> output_change;
  /// |P(d)| per trial and channel, row-major trials x channels.
  std::vector<double> pooled_per_channel;
  double pooled_median;
  double pooled_mean;
  double pooled_max;
  double output_change_median;
  double output_change_mean;
  double output_change_max;
  // Final-layer disturbance range, the empirical estimate of [a, b].
  double a;
  double b;
};

struct DisturbanceReport {
  PoolKind pooling;
  InitStrategy init;
  ActivationKind activation;
  double epsilon;
  std::size_t trials;
  std::uint64_t base_seed;
  std::vector<SizeDisturbance> sizes;
};

/// Trial t perturbs with RngStream(derive_seed(seed, perturbation, size), t),
/// so results depend only on the config, never on thread scheduling.
DisturbanceReport run_disturbance(const ExperimentConfig& config);

/// One report per pooling kind, all computed from the same forward passes
/// (paired design); config.pooling is ignored.
std::vector<DisturbanceReport> run_pooling_arms(const ExperimentConfig& config,
                                                std::span<const PoolKind> poolings);

struct SweepEntry {
  InitStrategy init;
  ActivationKind activation;
  DisturbanceReport report;
};

/// Every (strategy, activation) combination with the same seed, hence the same
/// base inputs and perturbations across arms.
std::vector<SweepEntry> run_init_sweep(const ExperimentConfig& base,
                                       std::span<const InitStrategy> strategies,
                                       std::span<const ActivationKind> activations);

// ---------------------------------------------------------------------------

struct InvariancePoint {
  double epsilon;
  std::size_t unchanged;
  std::size_t total;
  double fraction;
};

struct InvarianceReport {
  std::vector<InvariancePoint> points;
};

/// For every epsilon, input and trial, compares argmax f(x + delta) with
/// argmax f(x) (ties to the lowest index). The arch must end in a linear head.
InvarianceReport prediction_invariance(const ArchSpec& arch, const nn::Weights& weights,
                                       std::span<const Tensor> inputs,
                                       std::span<const double> epsilons, std::size_t trials,
                                       std::uint64_t seed, std::size_t threads = 1);

// ---------------------------------------------------------------------------

struct LipschitzEstimate {
  double lower_bound;
  std::size_t first;   // probe indices achieving it
  std::size_t second;
  std::size_t pairs_evaluated;
};

/// max over sampled probe pairs of |f(x) - f(x')|_inf / |x - x'|_inf. Pairs
/// with identical inputs are skipped; throws if every sampled pair is.
LipschitzEstimate lipschitz_lower_bound(const ArchSpec& arch, const nn::Weights& weights,
                                        std::span<const Tensor> probes, std::size_t pair_count,
                                        std::uint64_t seed);

// ---------------------------------------------------------------------------

double median(std::vector<double> values);
double mean(std::span<const double> values);

}  // namespace convshield::experiments
