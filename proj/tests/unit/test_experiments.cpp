#include <gtest/gtest.h>

#include <cmath>
#include <variant>

#include "../oracles/oracles.hpp"
#include "convshield/bounds.hpp"
#include "convshield/error.hpp"
#include "convshield/experiments.hpp"
#include "convshield/nn/forward.hpp"
#include "convshield/nn/presets.hpp"

using namespace convshield;
using namespace convshield::experiments;
using nn::ConvLayerSpec;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  nn::ToyCnnOptions opt;
  opt.channels = {3, 4, 6};
  c.arch = nn::toy_cnn(opt);
  c.trials = 40;
  c.input_sizes = {{6, 6}, {10, 10}};
  c.base_seed = 17;
  return c;
}

ArchSpec classifier(std::size_t classes) {
  nn::ToyCnnOptions opt;
  opt.channels = {3, 4};
  ArchSpec a = nn::toy_cnn(opt);
  a.layers.push_back(nn::Linear{4, classes});
  return a;
}

}  // namespace

TEST(Stats, MedianAndMean) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 3, 2}), 2.5);
  const std::vector<double> v{1, 2, 6};
  EXPECT_EQ(mean(v), 3.0);
  EXPECT_THROW(median({}), InvalidArgument);
}

TEST(PrepareTrunk, StopsAtPoolAndAppliesActivation) {
  ArchSpec arch = nn::make_preset(nn::Preset::kResNet18);
  const ArchSpec plain = prepare_trunk(arch, ActivationKind::kIdentity);
  EXPECT_EQ(plain.layers.size(), 17u);
  for (const auto& l : plain.layers) EXPECT_TRUE(std::holds_alternative<ConvLayerSpec>(l));
  EXPECT_EQ(plain.stage_markers.size(), 4u);
  const ArchSpec relu = prepare_trunk(arch, ActivationKind::kRelu);
  EXPECT_EQ(relu.layers.size(), 34u);
  EXPECT_TRUE(std::holds_alternative<nn::Activation>(relu.layers[1]));
  nn::validate(relu);
}

TEST(Disturbance, ZeroEpsilonGivesZeros) {
  ExperimentConfig c = small_config();
  c.epsilon = 0.0;
  for (PoolKind pool : {PoolKind::kAverage, PoolKind::kMax}) {
    c.pooling = pool;
    const DisturbanceReport r = run_disturbance(c);
    for (const auto& s : r.sizes) {
      for (double v : s.pooled) EXPECT_EQ(v, 0.0);
      for (double v : s.output_change) EXPECT_EQ(v, 0.0);
      for (const auto& l : s.layers) {
        EXPECT_EQ(l.max, 0.0);
        EXPECT_EQ(l.b - l.a, 0.0);
      }
      EXPECT_EQ(s.b - s.a, 0.0);
    }
  }
}

TEST(Disturbance, ShapesAndCounts) {
  ExperimentConfig c = small_config();
  const DisturbanceReport r = run_disturbance(c);
  ASSERT_EQ(r.sizes.size(), 2u);
  for (const auto& s : r.sizes) {
    EXPECT_EQ(s.pooled.size(), c.trials);
    EXPECT_EQ(s.output_change.size(), c.trials);
    EXPECT_EQ(s.pooled_per_channel.size(), c.trials * 6);
    EXPECT_EQ(s.channels, 6u);
    EXPECT_EQ(s.feature, s.input);
    EXPECT_EQ(s.layers.size(), 2u);
    EXPECT_GT(s.b - s.a, 0.0);
    for (const auto& l : s.layers) {
      EXPECT_GE(l.median, 0.0);
      EXPECT_LE(l.median, l.max);
      EXPECT_GE(l.b, l.a);
    }
  }
}

TEST(Disturbance, LinearTrunkIndependentOfBase) {
  ExperimentConfig c = small_config();
  c.base_input = BaseInputKind::kUniformUnit;
  const DisturbanceReport a = run_disturbance(c);
  c.base_input = BaseInputKind::kZeros;
  const DisturbanceReport b = run_disturbance(c);
  for (std::size_t i = 0; i < a.sizes.size(); ++i)
    for (std::size_t t = 0; t < c.trials; ++t)
      EXPECT_NEAR(a.sizes[i].pooled[t], b.sizes[i].pooled[t], 1e-12);
}

TEST(Disturbance, AveragePooledMatchesOutputChange) {
  // For a linear trunk, P(g(x + d)) - P(g(x)) and P(g(x + d) - g(x)) agree
  // up to rounding under average pooling.
  const DisturbanceReport r = run_disturbance(small_config());
  for (const auto& s : r.sizes)
    for (std::size_t t = 0; t < s.pooled.size(); ++t)
      EXPECT_NEAR(s.pooled[t], s.output_change[t], 1e-12);
}

TEST(Disturbance, ThreadCountDoesNotMatter) {
  ExperimentConfig c = small_config();
  c.activation = ActivationKind::kRelu;
  c.threads = 1;
  const DisturbanceReport one = run_disturbance(c);
  c.threads = 5;
  const DisturbanceReport five = run_disturbance(c);
  for (std::size_t i = 0; i < one.sizes.size(); ++i) {
    EXPECT_EQ(one.sizes[i].pooled, five.sizes[i].pooled);
    EXPECT_EQ(one.sizes[i].pooled_per_channel, five.sizes[i].pooled_per_channel);
    EXPECT_EQ(one.sizes[i].a, five.sizes[i].a);
  }
}

TEST(Disturbance, PoolingArmsShareForwardPasses) {
  ExperimentConfig c = small_config();
  const PoolKind both[] = {PoolKind::kAverage, PoolKind::kMax};
  const auto arms = run_pooling_arms(c, both);
  ASSERT_EQ(arms.size(), 2u);
  c.pooling = PoolKind::kMax;
  const DisturbanceReport single = run_disturbance(c);
  EXPECT_EQ(arms[1].sizes[0].pooled, single.sizes[0].pooled);
  EXPECT_EQ(arms[0].sizes[0].layers[0].median, arms[1].sizes[0].layers[0].median);
}

TEST(Disturbance, IncompatibleInputThrows) {
  ExperimentConfig c = small_config();
  nn::ToyCnnOptions opt;
  opt.padding = 0;
  opt.kernel = 5;
  c.arch = nn::toy_cnn(opt);
  c.input_sizes = {{6, 6}};
  EXPECT_THROW(run_disturbance(c), ShapeError);
  c = small_config();
  c.trials = 0;
  EXPECT_THROW(run_disturbance(c), InvalidArgument);
  c = small_config();
  c.epsilon = -1.0;
  EXPECT_THROW(run_disturbance(c), InvalidArgument);
}

TEST(Disturbance, SyntheticIidRespectsHoeffding) {
  // An empty trunk pools the perturbation itself: means of 64 i.i.d. U[-0.1, 0.1].
  ExperimentConfig c;
  c.arch = ArchSpec{};
  c.input_channels = 1;
  c.trials = 5000;
  c.input_sizes = {{8, 8}};
  const DisturbanceReport r = run_disturbance(c);
  const auto& s = r.sizes[0];
  for (int i = 1; i <= 15; ++i) {
    const double gamma = 0.002 * i;
    const double bound = bounds::avg_pool_tail_bound(8, 8, -0.1, 0.1, gamma).value;
    const double slack = 3.0 * std::sqrt(bound * (1 - bound) / c.trials);
    EXPECT_LE(bounds::empirical_tail(s.pooled, gamma), bound + slack) << gamma;
  }
}

TEST(InitSweep, SingleArmEqualsRunDisturbance) {
  ExperimentConfig c = small_config();
  const InitStrategy strategies[] = {InitStrategy::xavier_uniform()};
  const ActivationKind acts[] = {ActivationKind::kIdentity};
  const auto sweep = run_init_sweep(c, strategies, acts);
  ASSERT_EQ(sweep.size(), 1u);
  c.init = InitStrategy::xavier_uniform();
  const DisturbanceReport direct = run_disturbance(c);
  for (std::size_t i = 0; i < direct.sizes.size(); ++i)
    EXPECT_EQ(sweep[0].report.sizes[i].pooled, direct.sizes[i].pooled);
}

TEST(InitSweep, LargeNormalAmplifiesDisturbance) {
  ExperimentConfig c;
  c.arch = nn::toy_cnn();
  c.trials = 30;
  c.input_sizes = {{16, 16}};
  const InitStrategy strategies[] = {InitStrategy::xavier_normal(), InitStrategy::normal(0.0, 1.0)};
  const ActivationKind acts[] = {ActivationKind::kIdentity, ActivationKind::kRelu};
  const auto sweep = run_init_sweep(c, strategies, acts);
  ASSERT_EQ(sweep.size(), 4u);
  for (ActivationKind act : acts) {
    const SweepEntry* xavier = nullptr;
    const SweepEntry* normal = nullptr;
    for (const auto& e : sweep) {
      if (e.activation != act) continue;
      (e.init.kind == InitKind::kNormal ? normal : xavier) = &e;
    }
    ASSERT_TRUE(xavier && normal);
    EXPECT_GT(normal->report.sizes[0].layers[3].median, xavier->report.sizes[0].layers[3].median);
  }
}

TEST(InitSweep, LayerOneVarianceMatchesAnalytic) {
  // One conv 3 -> 8, k = 3: interior outputs of d are sums of 27 products
  // w * delta with Var = 27 * sigma^2 * eps^2 / 3.
  const double sigma = 1.0, eps = 0.1;
  ArchSpec arch{{ConvLayerSpec{3, 8, 3, 1, 1}}, {0}};
  double sum_sq = 0.0;
  std::size_t count = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const nn::Weights w = nn::init_network(arch, InitStrategy::normal(0.0, sigma), seed);
    RngStream rng(seed, 1);
    const Tensor d = nn::forward(arch, w, sample_uniform_perturbation({3, 20, 20}, eps, rng));
    for (std::size_t c = 0; c < 8; ++c)
      for (std::size_t y = 1; y < 19; ++y)
        for (std::size_t x = 1; x < 19; ++x) {
          sum_sq += d.at(c, y, x) * d.at(c, y, x);
          ++count;
        }
  }
  const double analytic = 27.0 * sigma * sigma * eps * eps / 3.0;
  EXPECT_NEAR(sum_sq / count / analytic, 1.0, 0.1);
}

TEST(Invariance, ZeroEpsilonIsOne) {
  const ArchSpec arch = classifier(10);
  const nn::Weights w = nn::init_network(arch, InitStrategy::xavier_normal(), 3);
  RngStream rng(4, 0);
  const std::vector<Tensor> inputs{sample_uniform({3, 8, 8}, 0, 1, rng),
                                   sample_uniform({3, 8, 8}, 0, 1, rng)};
  const std::vector<double> eps{0.0, 0.05, 1.0};
  const InvarianceReport r = prediction_invariance(arch, w, inputs, eps, 25, 1);
  ASSERT_EQ(r.points.size(), 3u);
  EXPECT_EQ(r.points[0].fraction, 1.0);
  EXPECT_EQ(r.points[0].unchanged, 50u);
  for (const auto& p : r.points) {
    EXPECT_EQ(p.total, 50u);
    EXPECT_GE(p.fraction, 0.0);
    EXPECT_LE(p.fraction, 1.0);
  }
}

TEST(Invariance, SingleClassAlwaysUnchanged) {
  const ArchSpec arch = classifier(1);
  const nn::Weights w = nn::init_network(arch, InitStrategy::xavier_normal(), 3);
  RngStream rng(5, 0);
  const std::vector<Tensor> inputs{sample_uniform({3, 8, 8}, 0, 1, rng)};
  const std::vector<double> eps{0.0, 0.5, 10.0};
  for (const auto& p : prediction_invariance(arch, w, inputs, eps, 20, 2).points)
    EXPECT_EQ(p.fraction, 1.0);
}

TEST(Invariance, IndependentRerunsAgreeStatistically) {
  const ArchSpec arch = classifier(10);
  const nn::Weights w = nn::init_network(arch, InitStrategy::xavier_normal(), 6);
  RngStream rng(6, 0);
  std::vector<Tensor> inputs;
  for (int i = 0; i < 10; ++i) inputs.push_back(sample_uniform({3, 8, 8}, 0, 1, rng));
  const std::vector<double> eps{0.3};
  const auto a = prediction_invariance(arch, w, inputs, eps, 200, 100).points[0];
  const auto b = prediction_invariance(arch, w, inputs, eps, 200, 200).points[0];
  const double n = static_cast<double>(a.total);
  const double p = a.fraction;
  const double half_width = 2.576 * std::sqrt(std::max(p * (1 - p), 1.0 / n) / n);
  EXPECT_LE(std::fabs(a.fraction - b.fraction), 2 * half_width);
}

TEST(Invariance, ThreadsAndErrors) {
  const ArchSpec arch = classifier(5);
  const nn::Weights w = nn::init_network(arch, InitStrategy::xavier_normal(), 7);
  RngStream rng(7, 0);
  const std::vector<Tensor> inputs{sample_uniform({3, 8, 8}, 0, 1, rng)};
  const std::vector<double> eps{0.1, 0.5};
  const auto one = prediction_invariance(arch, w, inputs, eps, 30, 9, 1);
  const auto four = prediction_invariance(arch, w, inputs, eps, 30, 9, 4);
  for (std::size_t i = 0; i < eps.size(); ++i)
    EXPECT_EQ(one.points[i].unchanged, four.points[i].unchanged);

  nn::ToyCnnOptions opt;
  opt.channels = {3, 4};
  const ArchSpec headless = nn::toy_cnn(opt);
  const nn::Weights hw = nn::init_network(headless, InitStrategy::xavier_normal(), 7);
  EXPECT_THROW(prediction_invariance(headless, hw, inputs, eps, 5, 1), InvalidArgument);
  EXPECT_THROW(prediction_invariance(arch, w, std::vector<Tensor>{}, eps, 5, 1), InvalidArgument);
}

TEST(Lipschitz, ScalarLinearMap) {
  ArchSpec arch{{ConvLayerSpec{1, 1, 1, 1, 0}, nn::GlobalPool{PoolKind::kAverage}}, {0}};
  nn::Weights w{Tensor({1, 1, 1, 1}, 2.0), std::nullopt};
  std::vector<Tensor> probes;
  RngStream rng(1, 0);
  for (int i = 0; i < 6; ++i) probes.push_back(sample_uniform({1, 1, 1}, -1, 1, rng));
  const LipschitzEstimate e = lipschitz_lower_bound(arch, w, probes, 20, 3);
  EXPECT_NEAR(e.lower_bound, 2.0, 1e-12);
  EXPECT_NE(e.first, e.second);
}

TEST(Lipschitz, BelowOperatorNorm) {
  const oracle::Conv g{1, 4, 4, 1, 3, 1, 1};
  RngStream rng(2, 0);
  const Tensor wt = sample_uniform({1, 1, 3, 3}, -1, 1, rng);
  const double norm = oracle::inf_operator_norm(
      oracle::conv_matrix(g, {wt.values().begin(), wt.values().end()}));
  std::vector<Tensor> probes;
  for (int i = 0; i < 30; ++i) probes.push_back(sample_uniform({1, 4, 4}, -1, 1, rng));

  ArchSpec lin{{ConvLayerSpec{1, 1, 3, 1, 1}}, {0}};
  ArchSpec relu{{ConvLayerSpec{1, 1, 3, 1, 1}, nn::Activation{ActivationKind::kRelu}}, {0}};
  const nn::Weights w{wt};
  const nn::Weights wr{wt, std::nullopt};
  const LipschitzEstimate e = lipschitz_lower_bound(lin, w, probes, 300, 4);
  const LipschitzEstimate er = lipschitz_lower_bound(relu, wr, probes, 300, 4);
  EXPECT_GT(e.lower_bound, 0.0);
  EXPECT_LE(e.lower_bound, norm + 1e-12);
  EXPECT_LE(er.lower_bound, norm + 1e-12);
  EXPECT_LE(er.lower_bound, e.lower_bound + 1e-12);
}

TEST(Lipschitz, CoincidentProbesThrow) {
  ArchSpec arch{{ConvLayerSpec{1, 1, 1, 1, 0}}, {0}};
  nn::Weights w{Tensor({1, 1, 1, 1}, 1.0)};
  const std::vector<Tensor> same{Tensor({1, 2, 2}, 0.5), Tensor({1, 2, 2}, 0.5)};
  EXPECT_THROW(lipschitz_lower_bound(arch, w, same, 10, 0), InvalidArgument);
  EXPECT_THROW(lipschitz_lower_bound(arch, w, same, 0, 0), InvalidArgument);
}
