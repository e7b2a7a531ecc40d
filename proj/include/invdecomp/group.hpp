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

#pragma once

#include <string>
#include <variant>
#include <vector>

#include "invdecomp/types.hpp"

namespace invdecomp {

/// A finite group given by its multiplication table. Integration over the
/// group always means the normalized counting measure (1/|G|) sum_g.
struct FiniteGroup {
  int order = 1;
  std::vector<int> mul{0};  // row-major, mul[g * order + h] = g h
  std::vector<int> inv{0};
  int identity = 0;

  int product(int g, int h) const { return mul[static_cast<std::size_t>(g) * order + h]; }
  int inverse(int g) const { return inv[static_cast<std::size_t>(g)]; }
  bool is_abelian() const;
};

/// Checks associativity, identity, inverses and the Latin-square property.
/// Throws Errc::invalid_argument naming the first violated axiom.
void validate_group(const FiniteGroup& g);

/// Z/nZ with mul(i, j) = (i + j) mod n.
FiniteGroup build_cyclic(int n);

/// Componentwise product; element (g1, g2) has index g1 * |G2| + g2.
FiniteGroup product_group(const FiniteGroup& a, const FiniteGroup& b);

struct Irrep {
  std::string label;
  int dim = 1;
  CVector chi;  // chi[g] for every group element
  bool real_valued = true;

  /// Real part of the character; only meaningful when real_valued.
  Vector real_chi() const { return chi.real(); }
};

struct CharacterTable {
  std::vector<Irrep> irreps;

  std::size_t size() const { return irreps.size(); }
  const Irrep& operator[](std::size_t k) const { return irreps[k]; }
  const Irrep& find(const std::string& label) const;
  bool all_real() const;
};

struct GroupWithTable {
  FiniteGroup group;
  CharacterTable table;
};

/// <chi_a, chi_b>_G = (1/|G|) sum_g chi_a(g) conj(chi_b(g)).
Complex character_inner_product(const CVector& a, const CVector& b);

/// Validates the table against the group (chi(e) = d, sum d^2 = |G|,
/// orthonormality, centrality) and sets real_valued flags. Throws
/// Errc::table_invalid naming the failed relation.
CharacterTable validate_character_table(const FiniteGroup& g, std::vector<Irrep> irreps,
                                        double tol = kExactTol);

namespace table_kind {
struct Cyclic {
  int n = 1;
};
struct Product {
  std::vector<GroupWithTable> children;
};
struct UserSupplied {
  std::vector<Irrep> irreps;
};
}  // namespace table_kind

using TableKind = std::variant<table_kind::Cyclic, table_kind::Product, table_kind::UserSupplied>;

/// Character table for g. Cyclic tables use chi_k(j) = exp(2 pi i jk / n),
/// labelled "u" (k = 0), "a" (k = n/2) and "chi<k>" otherwise.
CharacterTable character_table(const FiniteGroup& g, const TableKind& kind);

GroupWithTable cyclic_group(int n);

/// Irreps of the product are the tensor products, labelled "<a>*<b>".
GroupWithTable direct_product(const GroupWithTable& a, const GroupWithTable& b);

/// (f * k)(u) = (1/|G|) sum_g f(g) k(g^-1 u).
CVector convolve(const CVector& f, const CVector& k, const FiniteGroup& g);

/// Left action of a finite group on a finite index set, stored as exact
/// permutations: perm[g * space_size + i] is the index of g . y_i.
struct GroupAction {
  FiniteGroup group;
  int space_size = 0;
  std::vector<int> perm;

  int image(int g, int i) const {
    return perm[static_cast<std::size_t>(g) * space_size + i];
  }
};

/// Builds an action from per-element permutations; throws if any row is not
/// a bijection or sizes disagree. Axioms are checked by check_action.
GroupAction make_action(FiniteGroup group, const std::vector<std::vector<int>>& perms);

GroupAction trivial_action(int space_size);

/// Componentwise action of the product group on the product index set
/// (index i1 * m2 + i2).
GroupAction product_action(const GroupAction& a, const GroupAction& b);

struct ActionReport {
  bool passed = true;
  double max_weight_deviation = 0.0;
  std::vector<std::string> violations;
  std::vector<int> fixed_points;  // points fixed by some g != e; informational
};

ActionReport check_action(const GroupAction& action, const Vector& weights, double tol = kExactTol);

/// Z^pi(y_i) = (d_pi / |G|) sum_g chi_pi(g) z[g^-1 . y_i].
CVector project_path(const CVector& z, const GroupAction& action, const Irrep& pi);

/// Real overload; requires a real-valued character.
Vector project_path(const Vector& z, const GroupAction& action, const Irrep& pi);

/// Applies project_path to every column.
Matrix project_columns(const Matrix& paths, const GroupAction& action, const Irrep& pi);

}  // namespace invdecomp
