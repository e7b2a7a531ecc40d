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

#include <random>

#include "invdecomp/group.hpp"

namespace invdecomp {
namespace {

std::vector<GroupWithTable> small_groups() {
  return {cyclic_group(2), cyclic_group(3), cyclic_group(4), direct_product(cyclic_group(2), cyclic_group(2)),
          direct_product(cyclic_group(2), cyclic_group(3))};
}

// <chi_p, chi_q> straight from the definition, no library helper.
Complex inner(const Irrep& a, const Irrep& b) {
  Complex s = 0.0;
  for (Index g = 0; g < a.chi.size(); ++g) s += a.chi[g] * std::conj(b.chi[g]);
  return s / static_cast<double>(a.chi.size());
}

TEST(Characters, OrthonormalForSmallGroups) {
  for (const auto& gt : small_groups()) {
    ASSERT_EQ(static_cast<int>(gt.table.size()), gt.group.order);
    for (std::size_t p = 0; p < gt.table.size(); ++p)
      for (std::size_t q = 0; q < gt.table.size(); ++q) {
        const Complex v = inner(gt.table[p], gt.table[q]);
        EXPECT_NEAR(v.real(), p == q ? 1.0 : 0.0, 1e-12);
        EXPECT_NEAR(v.imag(), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(character_inner_product(gt.table[p].chi, gt.table[q].chi) - v), 0.0, 1e-14);
      }
  }
}

TEST(Characters, CyclicLabels) {
  const auto z2 = cyclic_group(2);
  EXPECT_EQ(z2.table[0].label, "u");
  EXPECT_EQ(z2.table[1].label, "a");
  EXPECT_DOUBLE_EQ(z2.table[1].chi[1].real(), -1.0);
  const auto z3 = cyclic_group(3);
  EXPECT_EQ(z3.table[1].label, "chi1");
  EXPECT_FALSE(z3.table[1].real_valued);
  EXPECT_TRUE(z2.table.all_real());
}

TEST(Characters, ProductIndexingAndLabels) {
  const auto a = cyclic_group(2), b = cyclic_group(3);
  const auto p = direct_product(a, b);
  ASSERT_EQ(p.group.order, 6);
  for (int g1 = 0; g1 < 2; ++g1)
    for (int g2 = 0; g2 < 3; ++g2)
      for (int h1 = 0; h1 < 2; ++h1)
        for (int h2 = 0; h2 < 3; ++h2)
          EXPECT_EQ(p.group.product(g1 * 3 + g2, h1 * 3 + h2),
                    a.group.product(g1, h1) * 3 + b.group.product(g2, h2));
  EXPECT_NO_THROW(p.table.find("a*u"));
  const Irrep& r = p.table.find("a*chi1");
  for (int g1 = 0; g1 < 2; ++g1)
    for (int g2 = 0; g2 < 3; ++g2)
      EXPECT_NEAR(std::abs(r.chi[g1 * 3 + g2] - a.table[1].chi[g1] * b.table[1].chi[g2]), 0.0, 1e-15);
}

TEST(Characters, RejectsBrokenTable) {
  const auto z2 = cyclic_group(2);
  auto irreps = z2.table.irreps;
  irreps[1].chi[1] = 1.0;  // duplicates the trivial character
  try {
    validate_character_table(z2.group, irreps);
    FAIL() << "accepted a non-orthogonal table";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::table_invalid);
  }
}

TEST(Groups, CyclicAxioms) {
  for (int n = 1; n <= 7; ++n) {
    const FiniteGroup g = build_cyclic(n);
    EXPECT_NO_THROW(validate_group(g));
    EXPECT_TRUE(g.is_abelian());
    for (int x = 0; x < n; ++x) EXPECT_EQ(g.product(x, g.inverse(x)), g.identity);
  }
}

GroupAction shift_action(int n, int m) {
  // Z/n acting on n*m points by shifting blocks
  std::vector<std::vector<int>> perms;
  for (int g = 0; g < n; ++g) {
    std::vector<int> p(static_cast<std::size_t>(n * m));
    for (int i = 0; i < n * m; ++i) p[static_cast<std::size_t>(i)] = ((i / m + g) % n) * m + i % m;
    perms.push_back(p);
  }
  return make_action(build_cyclic(n), perms);
}

TEST(Actions, FlagsNonHomomorphism) {
  std::vector<std::vector<int>> perms{{0, 1, 2}, {1, 2, 0}, {1, 2, 0}};
  const ActionReport r = check_action(make_action(build_cyclic(3), perms), Vector::Constant(3, 1.0 / 3));
  EXPECT_FALSE(r.passed);
  EXPECT_FALSE(r.violations.empty());
  EXPECT_THROW(make_action(build_cyclic(3), {{0, 1, 2}, {1, 1, 0}, {2, 0, 1}}), Error);
}

TEST(Actions, ShiftPreservesUniformWeights) {
  const GroupAction a = shift_action(3, 4);
  const ActionReport r = check_action(a, Vector::Constant(12, 1.0 / 12));
  EXPECT_TRUE(r.passed);
  EXPECT_TRUE(r.fixed_points.empty());
}

// Property: the irrep components of any path sum back to it, are idempotent
// and annihilate each other.
TEST(Projection, ComponentsResolveIdentity) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n01;
  for (int n : {2, 3, 4, 5}) {
    const GroupAction a = shift_action(n, 3);
    const GroupWithTable gt = cyclic_group(n);
    for (int trial = 0; trial < 5; ++trial) {
      CVector z(a.space_size);
      for (Index i = 0; i < z.size(); ++i) z[i] = Complex(n01(rng), n01(rng));
      CVector sum = CVector::Zero(z.size());
      for (std::size_t p = 0; p < gt.table.size(); ++p) {
        const CVector zp = project_path(z, a, gt.table[p]);
        sum += zp;
        EXPECT_LT((project_path(zp, a, gt.table[p]) - zp).cwiseAbs().maxCoeff(), 1e-12);
        for (std::size_t q = 0; q < gt.table.size(); ++q)
          if (q != p) EXPECT_LT(project_path(zp, a, gt.table[q]).cwiseAbs().maxCoeff(), 1e-12);
      }
      EXPECT_LT((sum - z).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Projection, ReversalSplitsEvenAndOdd) {
  const GroupAction a = make_action(build_cyclic(2), {{0, 1, 2, 3}, {3, 2, 1, 0}});
  const auto z2 = cyclic_group(2);
  Vector z(4);
  z << 1.0, 2.0, 5.0, 3.0;
  const Vector even = project_path(z, a, z2.table[0]);
  const Vector odd = project_path(z, a, z2.table[1]);
  Vector expect_even(4), expect_odd(4);
  expect_even << 2.0, 3.5, 3.5, 2.0;
  expect_odd << -1.0, -1.5, 1.5, 1.0;
  EXPECT_LT((even - expect_even).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((odd - expect_odd).cwiseAbs().maxCoeff(), 1e-15);
  Matrix cols(4, 2);
  cols << z, z;
  EXPECT_LT((project_columns(cols, a, z2.table[1]).col(1) - expect_odd).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Actions, ProductActsComponentwise) {
  const GroupAction r2 = make_action(build_cyclic(2), {{0, 1}, {1, 0}});
  const GroupAction p = product_action(r2, r2);
  EXPECT_EQ(p.group.order, 4);
  EXPECT_EQ(p.space_size, 4);
  // (g1, g2) = (1, 0) flips the first coordinate only
  EXPECT_EQ(p.image(2, 0), 2);
  EXPECT_EQ(p.image(1, 0), 1);
  EXPECT_EQ(p.image(3, 0), 3);
}

}  // namespace
}  // namespace invdecomp
