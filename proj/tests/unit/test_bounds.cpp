#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "../oracles/oracles.hpp"
#include "convshield/bounds.hpp"
#include "convshield/error.hpp"
#include "convshield/rng.hpp"

using namespace convshield;
using namespace convshield::bounds;

TEST(AvgBound, ZeroRange) {
  EXPECT_EQ(avg_pool_tail_bound(8, 8, 0.1, 0.1, 0.05).value, 0.0);
  EXPECT_EQ(avg_pool_gamma_min(8, 8, 0.1, 0.1, 0.05).value, 0.0);
}

TEST(AvgBound, ClosedFormExample) {
  const BoundResult r = avg_pool_tail_bound(8, 8, -0.1, 0.1, 0.05);
  EXPECT_NEAR(r.value, 2.0 * std::exp(-8.0), 1e-18);
  EXPECT_NEAR(r.value, 6.709e-4, 1e-7);
  EXPECT_FALSE(r.saturated);
}

TEST(AvgBound, Limits) {
  EXPECT_EQ(avg_pool_tail_bound(8, 8, -0.1, 0.1, 1e6).value, 0.0);
  const BoundResult small = avg_pool_tail_bound(8, 8, -0.1, 0.1, 1e-9);
  EXPECT_EQ(small.value, 1.0);
  EXPECT_TRUE(small.saturated);
  EXPECT_THROW(avg_pool_tail_bound(8, 8, -0.1, 0.1, 0.0), InvalidArgument);
  EXPECT_THROW(avg_pool_tail_bound(8, 8, -0.1, 0.1, -1.0), InvalidArgument);
}

TEST(AvgBound, GammaMinMatchesBisection) {
  const double g = avg_pool_gamma_min(8, 8, -0.1, 0.1, 0.05).value;
  const double ref = oracle::bisect_gamma(
      [](double gamma) { return 2.0 * std::exp(-2.0 * 64.0 * gamma * gamma / 0.04); }, 0.05);
  EXPECT_NEAR(g, ref, 1e-10);
  EXPECT_NEAR(g, 0.033952, 1e-6);
}

TEST(AvgBound, GammaMinEdgeCases) {
  EXPECT_EQ(avg_pool_gamma_min(8, 8, -0.1, 0.1, 2.0).value, 0.0);
  EXPECT_EQ(avg_pool_gamma_min(8, 8, -0.1, 0.1, 3.5).value, 0.0);
  EXPECT_THROW(avg_pool_gamma_min(8, 8, -0.1, 0.1, 0.0), InvalidArgument);
  EXPECT_THROW(avg_pool_gamma_min(8, 8, 0.1, -0.1, 0.1), InvalidArgument);
  EXPECT_THROW(avg_pool_gamma_min(0, 8, -0.1, 0.1, 0.1), InvalidArgument);
}

TEST(AvgBound, QuadrupleAreaHalvesGamma) {
  const double g8 = avg_pool_gamma_min(8, 8, -0.1, 0.1, 0.05).value;
  const double g16 = avg_pool_gamma_min(16, 16, -0.1, 0.1, 0.05).value;
  EXPECT_NEAR(g16 / g8, 0.5, 1e-12);
}

TEST(MaxBound, Example) {
  const double expected = 0.2 * std::sqrt(0.5 * std::log(128.0)) / 6.23028;
  const BoundResult r = max_pool_tail_bound(8, 8, -0.1, 0.1, 6.23028);
  EXPECT_DOUBLE_EQ(r.value, expected);
  EXPECT_NEAR(r.value, 0.05, 1e-6);
  EXPECT_EQ(max_pool_tail_bound(8, 8, 0.3, 0.3, 1.0).value, 0.0);
  EXPECT_THROW(max_pool_tail_bound(8, 8, -0.1, 0.1, 0.0), InvalidArgument);
}

TEST(MaxBound, IncreasingInArea) {
  double prev = 0.0;
  for (std::size_t n : {1u, 2u, 4u, 8u, 16u, 32u}) {
    const double v = max_pool_tail_bound(n, n, -0.1, 0.1, 10.0).value;
    EXPECT_GT(v, prev) << n;
    prev = v;
  }
}

TEST(MaxBound, Saturates) {
  const BoundResult r = max_pool_tail_bound(8, 8, -0.1, 0.1, 0.01);
  EXPECT_EQ(r.value, 1.0);
  EXPECT_TRUE(r.saturated);
}

TEST(MaxBound, GammaMin) {
  const double g = max_pool_gamma_min(8, 8, -0.1, 0.1, 0.05).value;
  EXPECT_NEAR(g, 6.230268, 1e-6);
  EXPECT_NEAR(max_pool_tail_bound(8, 8, -0.1, 0.1, g).value, 0.05, 1e-10);
  EXPECT_GT(max_pool_gamma_min(16, 16, -0.1, 0.1, 0.05).value, g);
  EXPECT_EQ(max_pool_gamma_min(8, 8, 0.2, 0.2, 0.05).value, 0.0);
  EXPECT_THROW(max_pool_gamma_min(8, 8, -0.1, 0.1, 0.0), InvalidArgument);
  EXPECT_THROW(max_pool_gamma_min(8, 8, -0.1, 0.1, 1.5), InvalidArgument);
}

TEST(Bounds, RoundTrips) {
  RngStream rng(12, 0);
  for (int i = 0; i < 200; ++i) {
    const std::size_t h = 1 + rng.next_u64() % 64, w = 1 + rng.next_u64() % 64;
    const double a = rng.uniform(-1, 0), b = a + rng.uniform(0.01, 2);
    const double p = rng.uniform(1e-6, 1.0);
    const double ga = avg_pool_gamma_min(h, w, a, b, p).value;
    EXPECT_NEAR(avg_pool_tail_bound(h, w, a, b, ga).value / p, 1.0, 1e-9);
    if (2 * h * w > 1) {
      const double gm = max_pool_gamma_min(h, w, a, b, p).value;
      EXPECT_NEAR(max_pool_tail_bound(h, w, a, b, gm).value / p, 1.0, 1e-9);
    }
  }
}

TEST(Bounds, MonotoneInArea) {
  double prev_avg = INFINITY, prev_max = 0.0;
  for (std::size_t n : {4u, 8u, 16u, 32u, 64u}) {
    const double ga = avg_pool_gamma_min(n, n, -0.1, 0.1, 0.05).value;
    const double gm = max_pool_gamma_min(n, n, -0.1, 0.1, 0.05).value;
    EXPECT_LT(ga, prev_avg);
    EXPECT_GT(gm, prev_max);
    prev_avg = ga;
    prev_max = gm;
  }
}

TEST(Bounds, ScaleEquivariance) {
  for (double c : {0.5, 2.0, 7.0}) {
    EXPECT_NEAR(avg_pool_gamma_min(8, 4, -0.1 * c, 0.1 * c, 0.1).value,
                c * avg_pool_gamma_min(8, 4, -0.1, 0.1, 0.1).value, 1e-15);
    EXPECT_NEAR(max_pool_gamma_min(8, 4, -0.1 * c, 0.1 * c, 0.1).value,
                c * max_pool_gamma_min(8, 4, -0.1, 0.1, 0.1).value, 1e-12);
  }
}

TEST(EmpiricalTail, Examples) {
  const std::vector<double> s{0.1, 0.2, 0.3};
  EXPECT_DOUBLE_EQ(empirical_tail(s, 0.25), 1.0 / 3.0);
  EXPECT_EQ(empirical_tail(s, 0.0), 1.0);
  EXPECT_EQ(empirical_tail(std::vector<double>{-0.5, 0.1}, 0.4), 0.5);
  EXPECT_THROW(empirical_tail(std::vector<double>{}, 0.1), InvalidArgument);
}

TEST(EmpiricalTail, RespectsHoeffdingOnIidMeans) {
  RngStream rng(99, 0);
  const std::size_t n = 20000;
  std::vector<double> means(n);
  for (auto& m : means) {
    double s = 0.0;
    for (int i = 0; i < 64; ++i) s += rng.uniform(-0.1, 0.1);
    m = s / 64.0;
  }
  for (int i = 1; i <= 20; ++i) {
    const double gamma = 0.002 * i;
    const double bound = avg_pool_tail_bound(8, 8, -0.1, 0.1, gamma).value;
    const double slack = 3.0 * std::sqrt(bound * (1 - bound) / n);
    EXPECT_LE(empirical_tail(means, gamma), bound + slack) << gamma;
  }
}

TEST(Evaluate, DispatchesOnGivenQuantity) {
  BoundQuery q;
  q.height = q.width = 8;
  q.a = -0.1;
  q.b = 0.1;
  q.p = 0.05;
  BoundAnswer ans = evaluate(q);
  EXPECT_NEAR(ans.gamma, 0.0339525, 1e-6);
  EXPECT_EQ(ans.p, 0.05);

  q.p.reset();
  q.gamma = 0.05;
  ans = evaluate(q);
  EXPECT_NEAR(ans.p, 2.0 * std::exp(-8.0), 1e-15);

  q.pooling = PoolKind::kMax;
  q.gamma = 6.23028;
  EXPECT_NEAR(evaluate(q).p, 0.05, 1e-6);

  q.p = 0.05;
  EXPECT_THROW(evaluate(q), InvalidArgument);
  q.p.reset();
  q.gamma.reset();
  EXPECT_THROW(evaluate(q), InvalidArgument);
}
