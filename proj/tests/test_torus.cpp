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

#include "invdecomp/torus.hpp"

namespace invdecomp {
namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

Lattice skew() {
  Matrix v(2, 2);
  v << 1.0, 0.5, 0.0, 1.0;
  return make_lattice(v);
}

Vector profile_samples(const TorusGrid& g, const Profile& p) {
  Vector out(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    Vector c(static_cast<Index>(g.resolution.size()));
    for (std::size_t q = 0; q < g.resolution.size(); ++q)
      c[static_cast<Index>(q)] = static_cast<double>(g.coords[static_cast<std::size_t>(i)][q]) / g.resolution[q];
    out[i] = p(c);
  }
  return out;
}

TEST(Lattices, DualPairsToIdentity) {
  const Lattice l = skew();
  const Lattice d = dual_lattice(l);
  EXPECT_LT((l.basis.transpose() * d.basis - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(l.volume(), 1.0, 1e-15);
  Matrix sing(2, 2);
  sing << 1.0, 2.0, 1.0, 2.0;
  try {
    make_lattice(sing);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::singular_basis);
  }
}

TEST(Grids, NegationIsAnInvolution) {
  const TorusGrid g = make_torus_grid(skew(), {6, 4});
  ASSERT_EQ(g.size(), 24);
  for (Index i = 0; i < g.size(); ++i) EXPECT_EQ(g.negation[static_cast<std::size_t>(g.negation[static_cast<std::size_t>(i)])], i);
  EXPECT_EQ(g.fixed_points().size(), 4u);  // half-periods
  EXPECT_EQ(g.index_of({-1, 5}), g.index_of({5, 1}));
}

TEST(Fourier, WatsonCircleEigenvalues) {
  Matrix b(1, 1);
  b << 1.0;
  const TorusGrid g = make_torus_grid(make_lattice(b), {256});
  const TorusKernelSpec spec = fourier_kl(profile_samples(g, builtin_profile("watson")), g, 40);
  EXPECT_LE(spec.max_sine, 1e-10);
  for (const auto& c : spec.coefficients) {
    const int v = std::abs(c.v[0]);
    if (v == 0) {
      // the profile has zero mean; sampling leaves the alias sum 1 / (12 N^2)
      EXPECT_NEAR(spec.eigenvalue(c), 1.0 / (12 * 256.0 * 256.0), 1e-15);
    } else {
      // sampled on N points the coefficient picks up every alias v + m N
      double aliased = 0.0;
      for (int m = -20000; m <= 20000; ++m) aliased += 1.0 / (4 * kPi2 * (v + 256.0 * m) * (v + 256.0 * m));
      aliased += 2.0 / (4 * kPi2 * 256.0 * 256.0 * 20000.5);  // both tails beyond |m| = 20000
      EXPECT_NEAR(spec.eigenvalue(c) / aliased, 1.0, 1e-6) << v;
    }
  }
}

TEST(Fourier, AssemblyWithinDroppedTail) {
  const TorusGrid g = make_torus_grid(skew(), {16, 16});
  const Profile p = builtin_profile("watson");
  const TorusKernelSpec spec = fourier_kl(profile_samples(g, p), g, 5);
  const Kernel exact = profile_kernel(g, p);
  EXPECT_TRUE(check_stationarity(g, exact.R).passed);
  EXPECT_LE((assemble_kernel(spec, g) - exact.R).cwiseAbs().maxCoeff(), spec.discrete_tail + 1e-12);
  const TorusKernelSpec all = fourier_kl(profile_samples(g, p), g, 7);
  EXPECT_LT(all.discrete_tail, spec.discrete_tail);
}

TEST(Fourier, RejectsAliasingAndOddProfiles) {
  Matrix b(1, 1);
  b << 1.0;
  const TorusGrid g = make_torus_grid(make_lattice(b), {16});
  const Vector w = profile_samples(g, builtin_profile("watson"));
  try {
    fourier_kl(w, g, 8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::nyquist_violation);
  }
  Vector odd(16);
  for (int i = 0; i < 16; ++i) odd[i] = std::sin(2 * std::numbers::pi * i / 16.0);
  try {
    fourier_kl(odd, g, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_even);
  }
}

TEST(Parity, PartsAreOddEvenAndSumBack) {
  const TorusGrid g = make_torus_grid(skew(), {8, 6});
  const Matrix x = Matrix::Random(g.size(), 5);
  const ParityParts p = parity_decompose(x, g);
  EXPECT_LT((p.odd + p.even - x).cwiseAbs().maxCoeff(), 1e-15);
  for (Index i = 0; i < g.size(); ++i) {
    const Index j = g.negation[static_cast<std::size_t>(i)];
    EXPECT_LT((p.odd.row(i) + p.odd.row(j)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((p.even.row(i) - p.even.row(j)).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(ParitySplit, HalvedEnergiesAddUp) {
  Matrix b(1, 1);
  b << 1.0;
  const TorusGrid g = make_torus_grid(make_lattice(b), {64});
  const TorusKernelSpec spec = fourier_kl(profile_samples(g, builtin_profile("watson")), g, 31);
  const TorusWatsonReport r = torus_watson_check(spec, g, 4000, 9, 0, 0.05);
  EXPECT_TRUE(r.halved_plain_holds());
  EXPECT_TRUE(r.unhalved_quarter_holds());
  EXPECT_FALSE(r.halved_quarter_holds());
  EXPECT_LT(r.inner_product_residual, 1e-12);
  EXPECT_LT(r.comparison.ks_distance, 0.05);
}

}  // namespace
}  // namespace invdecomp
