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

#include <cmath>
#include <numbers>
#include <random>

#include "invdecomp/kernels.hpp"

namespace invdecomp {
namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

// Watson covariance obtained by centering the bridge in both arguments.
double centered_bridge(double s, double t) {
  return std::min(s, t) - s * t - s * (1 - s) / 2 - t * (1 - t) / 2 + 1.0 / 12;
}

Matrix random_psd(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Matrix a(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) a(i, j) = n01(rng);
  return a * a.transpose() / m;
}

TEST(Covariances, ClosedForms) {
  for (double s : {0.05, 0.3, 0.5, 0.77}) {
    for (double t : {0.1, 0.5, 0.9}) {
      EXPECT_NEAR(bridge_covariance(s, t), std::min(s, t) - s * t, 1e-15);
      EXPECT_NEAR(watson_covariance(s, t), centered_bridge(s, t), 1e-14);
      EXPECT_NEAR(watson_covariance(s, t), watson_profile(std::abs(s - t)), 1e-14);
    }
  }
}

TEST(Grid, MidpointsAndWeights) {
  const IndexSpace g = make_interval_grid(8);
  EXPECT_EQ(g.size(), 8);
  EXPECT_NEAR(g.points(0, 0), 1.0 / 16, 1e-15);
  EXPECT_NEAR(g.weights.sum(), 1.0, 1e-15);
  const IndexSpace r = with_reversal(g);
  ASSERT_TRUE(r.action.has_value());
  for (int i = 0; i < 8; ++i) EXPECT_EQ(r.action->image(1, i), 7 - i);
}

TEST(Grid, GaussSplitIsExactOnEachHalf) {
  const IndexSpace g = with_reversal(make_interval_grid(40, QuadratureRule::gauss_split));
  EXPECT_NEAR(g.weights.sum(), 1.0, 1e-14);
  for (int k = 0; k < 20; ++k) {
    double q = 0.0;
    for (Index i = 0; i < g.size(); ++i) q += g.weights[i] * std::pow(std::abs(1 - 2 * g.points(i, 0)), k);
    EXPECT_NEAR(q, 1.0 / (k + 1), 1e-14) << k;
  }
  // a function of |1 - 2t| integrates exactly: the twisted Watson diagonal
  double twisted = 0.0;
  for (Index i = 0; i < g.size(); ++i) twisted += g.weights[i] * watson_covariance(g.points(i, 0), 1 - g.points(i, 0));
  EXPECT_NEAR(twisted, 0.0, 1e-15);
  EXPECT_THROW(make_interval_grid(7, QuadratureRule::gauss_split), Error);
  EXPECT_EQ(quadrature_rule("gauss_split"), QuadratureRule::gauss_split);
}

// tr of the n-fold contraction against zeta(2n) sums of the known spectra.
TEST(Traces, MatchEigenvalueSums) {
  const IndexSpace g = make_interval_grid(256);
  const Kernel b = builtin_kernel("bridge", g);
  const Kernel w = builtin_kernel("watson", g);
  const double zeta[] = {kPi2 / 6, kPi2 * kPi2 / 90, std::pow(std::numbers::pi, 6) / 945,
                         std::pow(std::numbers::pi, 8) / 9450};
  for (int n = 1; n <= 4; ++n) {
    const double lb = zeta[n - 1] / std::pow(kPi2, n);
    const double lw = 2.0 * zeta[n - 1] / std::pow(4 * kPi2, n);
    // midpoint discretization error is O(N^-2)
    EXPECT_NEAR(contraction_trace(b, n) / lb, 1.0, 5e-4) << n;
    EXPECT_NEAR(contraction_trace(w, n) / lw, 1.0, 5e-4) << n;
  }
  EXPECT_NEAR(contraction_trace(b, 1), 1.0 / 6, 1e-5);
}

TEST(Traces, SharedPowersAgreeWithSingleTraces) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix k = random_psd(7, rng);
    Vector mu = Vector::Random(7).cwiseAbs() + Vector::Constant(7, 0.1);
    const auto all = contraction_traces(k, mu, 8);
    Matrix p = k;
    for (int n = 1; n <= 8; ++n) {
      EXPECT_NEAR(all[static_cast<std::size_t>(n - 1)], contraction_trace(k, mu, n), 1e-12 * std::abs(all[0]));
      // direct oracle: tr((K D)^n)
      EXPECT_NEAR(all[static_cast<std::size_t>(n - 1)] / (p * mu.asDiagonal()).trace(), 1.0, 1e-10);
      p = p * mu.asDiagonal() * k;
    }
  }
}

TEST(Contraction, PowersAreWeightedProducts) {
  std::mt19937_64 rng(5);
  const Matrix k = random_psd(5, rng);
  const Vector mu = Vector::Constant(5, 0.2);
  EXPECT_LT((contract_power(k, mu, 1) - k).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((contract_power(k, mu, 2) - k * mu.asDiagonal() * k).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((contract(k, k, mu) - k * mu.asDiagonal() * k).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Kernels, RejectsIndefiniteMatrix) {
  Matrix r(2, 2);
  r << 1.0, 2.0, 2.0, 1.0;
  try {
    make_kernel(make_interval_grid(2), r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_psd);
  }
}

// Property: every built-in kernel is reversal invariant, its irrep
// projections sum to it and the cross projections vanish.
TEST(Kernels, BuiltinsDecomposeUnderReversal) {
  const IndexSpace line = with_reversal(make_interval_grid(64));
  const IndexSpace sheet_axis = with_reversal(make_interval_grid(12));
  const std::vector<IndexSpace> axes{sheet_axis, sheet_axis};
  const IndexSpace sheet = make_product_grid(axes, true);
  const std::vector<std::pair<std::string, const IndexSpace*>> cases{
      {"bridge", &line}, {"watson", &line}, {"torus_watson", &line},
      {"sheet_tied", &sheet}, {"sheet_compensated", &sheet}};
  for (const auto& [name, space] : cases) {
    const Kernel k = builtin_kernel(name, *space);
    EXPECT_TRUE(check_invariance(k).passed) << name;
    const auto& group = space->action->group;
    const CharacterTable table =
        group.order == 2 ? cyclic_group(2).table : direct_product(cyclic_group(2), cyclic_group(2)).table;
    Matrix sum = Matrix::Zero(k.size(), k.size());
    for (std::size_t p = 0; p < table.size(); ++p) {
      sum += project_kernel(k, table[p]).R;
      for (std::size_t q = 0; q < table.size(); ++q)
        if (q != p) EXPECT_LT(project_kernel(k, table[p], table[q]).cwiseAbs().maxCoeff(), 1e-10) << name;
    }
    EXPECT_LT((sum - k.R).cwiseAbs().maxCoeff(), 1e-10) << name;
  }
}

TEST(Kernels, NonInvariantDetected) {
  std::mt19937_64 rng(9);
  const Kernel k = make_kernel(with_reversal(make_interval_grid(6)), random_psd(6, rng));
  const InvarianceReport r = check_invariance(k, 1e-10);
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.max_deviation, 1e-3);
}

// Projecting a feature map's columns induces the projected kernel.
TEST(FeatureMaps, ProjectionCommutesWithInducedKernel) {
  const Kernel k = builtin_kernel("watson", with_reversal(make_interval_grid(32)));
  Eigen::LDLT<Matrix> ldlt(k.R + 1e-14 * Matrix::Identity(32, 32));
  const Matrix L = ldlt.transpositionsP().transpose() * Matrix(ldlt.matrixL()) *
                   ldlt.vectorD().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  FeatureMap fm{k.space, L, Vector::Ones(32)};
  EXPECT_LT((fm.induced_kernel() - k.R).cwiseAbs().maxCoeff(), 1e-12);
  const auto z2 = cyclic_group(2);
  for (std::size_t p = 0; p < 2; ++p) {
    const FeatureMap pf = project_feature_map(fm, z2.table[p]);
    EXPECT_LT((pf.induced_kernel() - project_kernel(k, z2.table[p]).R).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Grid, ProductGridOrdering) {
  const IndexSpace a = with_reversal(make_interval_grid(3));
  const IndexSpace b = with_reversal(make_interval_grid(4));
  const std::vector<IndexSpace> axes{a, b};
  const IndexSpace p = make_product_grid(axes, true);
  EXPECT_EQ(p.size(), 12);
  EXPECT_EQ(p.dim(), 2);
  EXPECT_NEAR(p.weights.sum(), 1.0, 1e-15);
  EXPECT_NEAR(p.points(1 * 4 + 2, 0), a.points(1, 0), 1e-15);
  EXPECT_NEAR(p.points(1 * 4 + 2, 1), b.points(2, 0), 1e-15);
}

}  // namespace
}  // namespace invdecomp
