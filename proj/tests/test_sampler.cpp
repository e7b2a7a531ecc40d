// Copyright 2026 The invdecomp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "invdecomp/sampler.hpp"

namespace invdecomp {
namespace {

Kernel bridge(int n, bool reversal = false) {
  IndexSpace g = make_interval_grid(n);
  if (reversal) g = with_reversal(std::move(g));
  return builtin_kernel("bridge", g);
}

TEST(Normals, DeterministicAndDistinct) {
  Vector a(16), b(16), c(16), d(16);
  fill_normals(7, 0, 3, a);
  fill_normals(7, 0, 3, b);
  fill_normals(7, 1, 3, c);
  fill_normals(7, 0, 4, d);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  EXPECT_NE(a, d);
}

TEST(Sampling, EmpiricalCovarianceMatchesKernel) {
  const Kernel k = bridge(12);
  const Index S = 40000;
  const PathEnsemble e = sample(k, S, 3);
  const Matrix cov = e.samples * e.samples.transpose() / static_cast<double>(S);
  // each entry has standard error at most sqrt(2) * max R / sqrt(S)
  EXPECT_LT((cov - k.R).cwiseAbs().maxCoeff(), 5.0 * std::sqrt(2.0) * 0.25 / std::sqrt(static_cast<double>(S)));
}

TEST(Sampling, IdenticalAcrossThreadCounts) {
  const Kernel k = bridge(40);
  const Vector one = pair_functional(k, 0.5, 3000, 11, {0, 1});
  for (int t : {2, 3, 8}) EXPECT_EQ(one, pair_functional(k, 0.5, 3000, 11, {0, t})) << t;
  const PathEnsemble a = sample(k, 700, 5, {2, 1});
  const PathEnsemble b = sample(k, 700, 5, {2, 4});
  EXPECT_EQ(a.samples, b.samples);
}

TEST(Sampling, FullCorrelationCopiesFirst) {
  const CorrelatedPair p = sample_pair(bridge(10), 1.0, 50, 2);
  EXPECT_EQ(p.first.samples, p.second.samples);
  const CorrelatedPair q = sample_pair(bridge(10), 0.0, 50, 2);
  EXPECT_NE(q.first.samples, q.second.samples);
}

TEST(Sampling, ComponentsSumToEnsemble) {
  const PathEnsemble e = sample(bridge(16, true), 20, 1);
  const auto parts = decompose_ensemble(e, cyclic_group(2).table);
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_LT((parts[0].ensemble.samples + parts[1].ensemble.samples - e.samples).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Statistics, KStatisticsMatchMomentFormulas) {
  std::mt19937_64 rng(1);
  std::gamma_distribution<double> g(2.0, 1.0);
  Vector x(500);
  for (Index i = 0; i < x.size(); ++i) x[i] = g(rng);
  const double n = static_cast<double>(x.size());
  const double mean = x.mean();
  double m2 = 0, m3 = 0, m4 = 0;
  for (Index i = 0; i < x.size(); ++i) {
    const double d = x[i] - mean;
    m2 += d * d / n;
    m3 += d * d * d / n;
    m4 += d * d * d * d / n;
  }
  const auto k = k_statistics(x);
  EXPECT_NEAR(k[0], mean, 1e-12);
  EXPECT_NEAR(k[1], n * m2 / (n - 1), 1e-12);
  EXPECT_NEAR(k[2], n * n * m3 / ((n - 1) * (n - 2)), 1e-11);
  EXPECT_NEAR(k[3], n * n * ((n + 1) * m4 - 3 * (n - 1) * m2 * m2) / ((n - 1) * (n - 2) * (n - 3)), 1e-10);
}

TEST(Statistics, KolmogorovSmirnovDistance) {
  Vector a(4), b(4), c(4);
  a << 1, 2, 3, 4;
  b << 5, 6, 7, 8;
  c << 1.5, 2.5, 3.5, 4.5;
  EXPECT_DOUBLE_EQ(ks_statistic(a, a), 0.0);
  EXPECT_DOUBLE_EQ(ks_statistic(a, b), 1.0);
  EXPECT_DOUBLE_EQ(ks_statistic(a, c), 0.25);
}

TEST(Statistics, ComparisonNeedsEnoughSamples) {
  try {
    compare_distributions(Vector::Zero(999), Vector::Zero(999));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::undersized_sample);
  }
}

TEST(Statistics, KStatisticVarianceOfGaussianMean) {
  CumulantVector kappa{1.0, {0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}};
  const auto v = k_statistic_variances(kappa, 100);
  EXPECT_NEAR(v[0], 0.02, 1e-15);
  EXPECT_NEAR(v[1], 2 * 4.0 / 99, 1e-14);
}

TEST(MonteCarlo, CumulantsOfSmallWatsonKernel) {
  const Kernel k = builtin_kernel("watson", make_interval_grid(32));
  const CumulantMcReport r = cumulant_mc_check(k, 0.5, 100000, 21);
  EXPECT_LT(r.error[0], 0.01);
  EXPECT_LT(r.error[1], 0.03);
}

TEST(MonteCarlo, SmallDuplicationPasses) {
  DuplicationConfig cfg;
  cfg.grid = 64;
  cfg.samples = 20000;
  cfg.ks_threshold = 0.02;
  cfg.mean_rel_tol = 0.02;
  const IdentityCheckReport r = duplication_check(cfg);
  EXPECT_TRUE(r.passed()) << r.comparison.ks_distance;
  EXPECT_EQ(r.lhs_samples.size(), 20000);
  EXPECT_NEAR(r.mean_target, 1.0 / 12, 1e-15);
}

}  // namespace
}  // namespace invdecomp
