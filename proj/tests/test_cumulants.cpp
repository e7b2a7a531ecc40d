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

#include "invdecomp/cumulants.hpp"

namespace invdecomp {
namespace {

Matrix random_psd(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Matrix a(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) a(i, j) = n01(rng);
  return a * a.transpose() / m;
}

// Elementary symmetric functions of the eigenvalues of M as sums of
// principal minors, so det(I - s M) = sum_k (-s)^k e_k without any
// eigen solver or trace.
std::vector<double> principal_minor_sums(const Matrix& M) {
  const int m = static_cast<int>(M.rows());
  std::vector<double> e(static_cast<std::size_t>(m + 1), 0.0);
  e[0] = 1.0;
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    std::vector<Index> idx;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    Matrix sub(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) sub(a, b) = M(idx[a], idx[b]);
    e[idx.size()] += sub.determinant();
  }
  return e;
}

// Cumulants of z' M z, z ~ N(0, I), from the series of -log det(I - 2 t M) / 2.
std::vector<double> quadratic_form_cumulants(const Matrix& M, int n_max) {
  const auto e = principal_minor_sums(M);
  std::vector<double> p(static_cast<std::size_t>(n_max + 1), 0.0);
  for (int k = 0; k <= n_max && k < static_cast<int>(e.size()); ++k)
    p[static_cast<std::size_t>(k)] = std::pow(-2.0, k) * e[static_cast<std::size_t>(k)];
  std::vector<double> l(static_cast<std::size_t>(n_max + 1), 0.0);  // log p
  for (int k = 1; k <= n_max; ++k) {
    double acc = p[static_cast<std::size_t>(k)];
    for (int j = 1; j < k; ++j) acc -= static_cast<double>(j) / k * l[static_cast<std::size_t>(j)] * p[static_cast<std::size_t>(k - j)];
    l[static_cast<std::size_t>(k)] = acc;
  }
  std::vector<double> kappa;
  double fact = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    fact *= n;
    kappa.push_back(-0.5 * l[static_cast<std::size_t>(n)] * fact);
  }
  return kappa;
}

TEST(Coefficients, KMatchesClosedForm) {
  for (double rho : {0.0, 0.1, 0.5, 0.9, 1.0})
    for (int n = 1; n <= 12; ++n)
      EXPECT_NEAR(k_coeff(n, rho), std::pow(1 + rho, n) + std::pow(-1.0, n) * std::pow(1 - rho, n),
                  1e-12 * std::pow(2.0, n))
          << n << ' ' << rho;
  EXPECT_DOUBLE_EQ(k_coeff(3, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(k_coeff(4, 1.0), 16.0);
}

TEST(Coefficients, CumulantCoefficient) {
  const double expect[] = {1, 2, 8, 48, 384, 3840};
  for (int n = 1; n <= 6; ++n) EXPECT_DOUBLE_EQ(cumulant_coefficient(n), expect[n - 1]);
}

// c_n tr(A^n) against exact cumulants of a 5-dimensional quadratic form.
TEST(Coefficients, QuadraticFormOracle) {
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix A = random_psd(5, rng);
    const auto exact = quadratic_form_cumulants(A, 6);
    const auto traces = contraction_traces(A, Vector::Ones(5), 6);
    const CumulantVector c = cumulants_from_traces(traces, 1.0);
    for (int n = 1; n <= 6; ++n) {
      const double direct = cumulant_coefficient(n) * traces[static_cast<std::size_t>(n - 1)];
      EXPECT_NEAR(direct / exact[static_cast<std::size_t>(n - 1)], 1.0, 1e-10);
      EXPECT_NEAR(c[n] / exact[static_cast<std::size_t>(n - 1)], 1.0, 1e-10);
    }
  }
}

// Correlated pairs: <Z1, Z2> is a quadratic form in the stacked vector.
TEST(Cumulants, CorrelatedPairOracle) {
  std::mt19937_64 rng(77);
  for (double rho : {0.0, 0.3, 0.5, 1.0}) {
    const Matrix A = random_psd(4, rng);
    Matrix S(8, 8), M = Matrix::Zero(8, 8);
    S << A, rho * A, rho * A, A;
    M.topRightCorner(4, 4) = 0.5 * Matrix::Identity(4, 4);
    M.bottomLeftCorner(4, 4) = 0.5 * Matrix::Identity(4, 4);
    Eigen::LLT<Matrix> llt(S + 1e-13 * Matrix::Identity(8, 8));
    const Matrix L = llt.matrixL();
    const auto exact = quadratic_form_cumulants(L.transpose() * M * L, 6);
    const CumulantVector c = cumulants_from_traces(contraction_traces(A, Vector::Ones(4), 6), rho);
    for (int n = 1; n <= 6; ++n) {
      const double e = exact[static_cast<std::size_t>(n - 1)];
      EXPECT_NEAR(c[n], e, 1e-9 * (std::abs(e) + std::pow(A.norm(), n))) << n << ' ' << rho;
    }
  }
}

TEST(Cumulants, ScaleAndCopies) {
  CumulantVector c{0.5, {1.0, 2.0, 3.0}};
  const CumulantVector s = scale_cumulants(c, 0.5, 2);
  EXPECT_DOUBLE_EQ(s[1], 1.0);
  EXPECT_DOUBLE_EQ(s[2], 1.0);
  EXPECT_DOUBLE_EQ(s[3], 0.75);
}

TEST(WatsonRelation, HoldsForWatsonFailsForBridge) {
  const IndexSpace g = with_reversal(make_interval_grid(256));
  const auto z2 = cyclic_group(2);
  const WatsonCheckReport w = watson_relation_check(builtin_kernel("watson", g), z2.table, 1.0, 6, 1e-3);
  EXPECT_TRUE(w.passed());
  EXPECT_LT(w.max_cII_dev, 1e-4);
  const WatsonCheckReport b = watson_relation_check(builtin_kernel("bridge", g), z2.table, 1.0, 6, 1e-3);
  EXPECT_FALSE(b.cIII_passed);
  EXPECT_GT(b.max_cIII_dev, 0.5);
}

TEST(WatsonRelation, VacuousOddOrdersAtZeroRho) {
  const IndexSpace g = with_reversal(make_interval_grid(64));
  const WatsonCheckReport w =
      watson_relation_check(builtin_kernel("watson", g), cyclic_group(2).table, 0.0, 6, 1e-3);
  for (int n = 1; n <= 6; ++n) EXPECT_EQ(w.vacuous[static_cast<std::size_t>(n - 1)], n % 2 == 1);
}

TEST(WatsonRelation, RequiresInvariance) {
  std::mt19937_64 rng(4);
  const Kernel k = make_kernel(with_reversal(make_interval_grid(6)), random_psd(6, rng));
  try {
    watson_relation_check(k, cyclic_group(2).table, 1.0, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_invariant);
  }
}

TEST(Z2Condition, WatsonTwistedTraces) {
  const Kernel k = builtin_kernel("watson", with_reversal(make_interval_grid(512)));
  const Z2ConditionReport r = z2_condition_check(k, 6, 1e-8);
  // order one is the midpoint rule on a quadratic: -1/(6 N^2)
  EXPECT_NEAR(r.values[0], -1.0 / (6.0 * 512 * 512), 1e-12);
  for (int n = 2; n <= 6; ++n) EXPECT_LT(std::abs(r.values[static_cast<std::size_t>(n - 1)]), 1e-10);
}

TEST(Z2Condition, WrongGroup) {
  const IndexSpace a = with_reversal(make_interval_grid(4));
  const std::vector<IndexSpace> axes{a, a};
  const Kernel k = builtin_kernel("sheet_tied", make_product_grid(axes, true));
  try {
    z2_condition_check(k, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::wrong_group);
  }
}

double closed_mgf(double lambda, double rho) {
  const double x = lambda / 2 * std::sqrt(1 + rho), y = lambda / 2 * std::sqrt(1 - rho);
  const double fx = x == 0 ? 1.0 : x / std::sin(x);
  const double fy = y == 0 ? 1.0 : y / std::sinh(y);
  return fx * fy;
}

TEST(Mgf, ClosedFormAgreesWithSpectralProduct) {
  for (auto [lambda, rho] : {std::pair{0.5, 0.5}, {1.0, 0.2}, {0.3, 0.9}, {2.0, 1.0}}) {
    const MgfValues m = mgf_watson(lambda, rho, 2000);
    EXPECT_NEAR(m.closed_form, closed_mgf(lambda, rho), 1e-12);
    EXPECT_LT(m.relative_error, 1e-3);
  }
  EXPECT_DOUBLE_EQ(mgf_watson(0.0, 0.5).closed_form, 1.0);
  EXPECT_NEAR(mgf_watson_radius(0.0), 2 * std::numbers::pi, 1e-15);
  EXPECT_NEAR(mgf_watson_radius(1.0), std::numbers::pi * std::sqrt(2.0), 1e-15);
}

}  // namespace
}  // namespace invdecomp
