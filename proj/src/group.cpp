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

#include "invdecomp/group.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace invdecomp {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::dimension_mismatch: return "dimension-mismatch";
    case Errc::table_invalid: return "table-invalid";
    case Errc::not_psd: return "not-psd";
    case Errc::no_action: return "no-action";
    case Errc::not_invariant: return "not-invariant";
    case Errc::complex_characters: return "complex-characters";
    case Errc::wrong_group: return "wrong-group";
    case Errc::nyquist_violation: return "nyquist-violation";
    case Errc::not_even: return "not-even";
    case Errc::not_stationary: return "not-stationary";
    case Errc::not_negation_closed: return "not-negation-closed";
    case Errc::singular_basis: return "singular-basis";
    case Errc::zero_weight: return "zero-weight";
    case Errc::decomposition_failed: return "decomposition-failed";
    case Errc::undersized_sample: return "undersized-sample";
    case Errc::config_error: return "config-error";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

bool FiniteGroup::is_abelian() const {
  for (int g = 0; g < order; ++g)
    for (int h = g + 1; h < order; ++h)
      if (product(g, h) != product(h, g)) return false;
  return true;
}

void validate_group(const FiniteGroup& g) {
  const auto n = static_cast<std::size_t>(g.order);
  if (g.order < 1) throw Error(Errc::invalid_argument, "group order must be positive");
  if (g.mul.size() != n * n || g.inv.size() != n)
    throw Error(Errc::invalid_argument, "multiplication or inverse table has wrong size");
  if (g.identity < 0 || g.identity >= g.order)
    throw Error(Errc::invalid_argument, "identity index out of range");
  for (int x : g.mul)
    if (x < 0 || x >= g.order) throw Error(Errc::invalid_argument, "mul entry out of range");

  for (int a = 0; a < g.order; ++a) {
    std::vector<char> row(n, 0), col(n, 0);
    for (int b = 0; b < g.order; ++b) {
      row[static_cast<std::size_t>(g.product(a, b))] = 1;
      col[static_cast<std::size_t>(g.product(b, a))] = 1;
    }
    for (std::size_t k = 0; k < n; ++k)
      if (!row[k] || !col[k])
        throw Error(Errc::invalid_argument, "mul row/column is not a permutation");
    if (g.product(g.identity, a) != a || g.product(a, g.identity) != a)
      throw Error(Errc::invalid_argument, "identity axiom fails");
    if (g.product(a, g.inverse(a)) != g.identity || g.product(g.inverse(a), a) != g.identity)
      throw Error(Errc::invalid_argument, "inverse axiom fails");
  }
  for (int a = 0; a < g.order; ++a)
    for (int b = 0; b < g.order; ++b)
      for (int c = 0; c < g.order; ++c)
        if (g.product(g.product(a, b), c) != g.product(a, g.product(b, c)))
          throw Error(Errc::invalid_argument, "associativity fails");
}

FiniteGroup build_cyclic(int n) {
  if (n < 1) throw Error(Errc::invalid_argument, "cyclic group order must be >= 1");
  FiniteGroup g;
  g.order = n;
  g.identity = 0;
  g.mul.resize(static_cast<std::size_t>(n) * n);
  g.inv.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g.mul[static_cast<std::size_t>(i) * n + j] = (i + j) % n;
    g.inv[static_cast<std::size_t>(i)] = (n - i) % n;
  }
  return g;
}

FiniteGroup product_group(const FiniteGroup& a, const FiniteGroup& b) {
  FiniteGroup g;
  g.order = a.order * b.order;
  g.identity = a.identity * b.order + b.identity;
  g.mul.resize(static_cast<std::size_t>(g.order) * g.order);
  g.inv.resize(static_cast<std::size_t>(g.order));
  for (int a1 = 0; a1 < a.order; ++a1)
    for (int b1 = 0; b1 < b.order; ++b1) {
      const int x = a1 * b.order + b1;
      g.inv[static_cast<std::size_t>(x)] = a.inverse(a1) * b.order + b.inverse(b1);
      for (int a2 = 0; a2 < a.order; ++a2)
        for (int b2 = 0; b2 < b.order; ++b2) {
          const int y = a2 * b.order + b2;
          g.mul[static_cast<std::size_t>(x) * g.order + y] =
              a.product(a1, a2) * b.order + b.product(b1, b2);
        }
    }
  return g;
}

const Irrep& CharacterTable::find(const std::string& label) const {
  for (const auto& r : irreps)
    if (r.label == label) return r;
  throw Error(Errc::invalid_argument, "no irrep labelled '" + label + "'");
}

bool CharacterTable::all_real() const {
  for (const auto& r : irreps)
    if (!r.real_valued) return false;
  return true;
}

Complex character_inner_product(const CVector& a, const CVector& b) {
  if (a.size() != b.size()) throw Error(Errc::dimension_mismatch, "character lengths differ");
  return b.dot(a) / static_cast<double>(a.size());  // Eigen's dot conjugates its left side
}

CharacterTable validate_character_table(const FiniteGroup& g, std::vector<Irrep> irreps,
                                        double tol) {
  auto fail = [](const std::string& what) { throw Error(Errc::table_invalid, what); };
  int dim_sq = 0;
  for (auto& r : irreps) {
    if (r.chi.size() != g.order) fail("chi length != |G| for irrep '" + r.label + "'");
    if (std::abs(r.chi[g.identity] - Complex(r.dim, 0.0)) > tol)
      fail("chi(e) = d_pi fails for irrep '" + r.label + "'");
    dim_sq += r.dim * r.dim;
    // central: chi(x^-1 g x) = chi(g)
    for (int x = 0; x < g.order; ++x)
      for (int h = 0; h < g.order; ++h) {
        const int conj = g.product(g.inverse(x), g.product(h, x));
        if (std::abs(r.chi[conj] - r.chi[h]) > tol)
          fail("class function property fails for irrep '" + r.label + "'");
      }
    r.real_valued = r.chi.imag().cwiseAbs().maxCoeff() <= 1e-12;
  }
  if (dim_sq != g.order) fail("sum of d_pi^2 != |G|");
  for (std::size_t p = 0; p < irreps.size(); ++p)
    for (std::size_t q = 0; q < irreps.size(); ++q) {
      const Complex ip = character_inner_product(irreps[p].chi, irreps[q].chi);
      const double expected = p == q ? 1.0 : 0.0;
      if (std::abs(ip - expected) > tol)
        fail("orthonormality <chi_" + irreps[p].label + ", chi_" + irreps[q].label + "> fails");
    }
  return CharacterTable{std::move(irreps)};
}

namespace {

CharacterTable cyclic_table(int n) {
  std::vector<Irrep> irreps;
  irreps.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    Irrep r;
    if (k == 0) r.label = "u";
    else if (n % 2 == 0 && 2 * k == n) r.label = "a";
    else r.label = "chi" + std::to_string(k);
    r.dim = 1;
    r.chi.resize(n);
    for (int j = 0; j < n; ++j) {
      const int phase = (j * k) % n;
      // exact values where the phase is a multiple of a quarter turn
      if (phase == 0) r.chi[j] = 1.0;
      else if (4 * phase == 2 * n) r.chi[j] = -1.0;
      else if (4 * phase == n) r.chi[j] = Complex(0.0, 1.0);
      else if (4 * phase == 3 * n) r.chi[j] = Complex(0.0, -1.0);
      else r.chi[j] = std::polar(1.0, 2.0 * std::numbers::pi * phase / n);
    }
    irreps.push_back(std::move(r));
  }
  return CharacterTable{std::move(irreps)};
}

CharacterTable product_table(const std::vector<GroupWithTable>& children) {
  if (children.empty()) throw Error(Errc::invalid_argument, "product of zero groups");
  GroupWithTable acc = children.front();
  for (std::size_t k = 1; k < children.size(); ++k) acc = direct_product(acc, children[k]);
  return acc.table;
}

}  // namespace

CharacterTable character_table(const FiniteGroup& g, const TableKind& kind) {
  std::vector<Irrep> irreps;
  if (const auto* c = std::get_if<table_kind::Cyclic>(&kind)) {
    if (c->n != g.order) throw Error(Errc::table_invalid, "cyclic table order != |G|");
    irreps = cyclic_table(c->n).irreps;
  } else if (const auto* p = std::get_if<table_kind::Product>(&kind)) {
    irreps = product_table(p->children).irreps;
  } else {
    irreps = std::get<table_kind::UserSupplied>(kind).irreps;
  }
  return validate_character_table(g, std::move(irreps));
}

GroupWithTable cyclic_group(int n) {
  FiniteGroup g = build_cyclic(n);
  CharacterTable t = character_table(g, table_kind::Cyclic{n});
  return {std::move(g), std::move(t)};
}

GroupWithTable direct_product(const GroupWithTable& a, const GroupWithTable& b) {
  GroupWithTable out;
  out.group = product_group(a.group, b.group);
  const int nb = b.group.order;
  for (const auto& ra : a.table.irreps)
    for (const auto& rb : b.table.irreps) {
      Irrep r;
      r.label = ra.label + "*" + rb.label;
      r.dim = ra.dim * rb.dim;
      r.chi.resize(out.group.order);
      for (int ga = 0; ga < a.group.order; ++ga)
        for (int gb = 0; gb < nb; ++gb) r.chi[ga * nb + gb] = ra.chi[ga] * rb.chi[gb];
      out.table.irreps.push_back(std::move(r));
    }
  out.table = validate_character_table(out.group, std::move(out.table.irreps));
  return out;
}

CVector convolve(const CVector& f, const CVector& k, const FiniteGroup& g) {
  if (f.size() != g.order || k.size() != g.order)
    throw Error(Errc::dimension_mismatch, "convolve: vector length != |G|");
  CVector out = CVector::Zero(g.order);
  for (int u = 0; u < g.order; ++u) {
    Complex acc = 0.0;
    for (int x = 0; x < g.order; ++x) acc += f[x] * k[g.product(g.inverse(x), u)];
    out[u] = acc / static_cast<double>(g.order);
  }
  return out;
}

GroupAction make_action(FiniteGroup group, const std::vector<std::vector<int>>& perms) {
  if (static_cast<int>(perms.size()) != group.order)
    throw Error(Errc::dimension_mismatch, "need one permutation per group element");
  GroupAction a;
  a.space_size = perms.empty() ? 0 : static_cast<int>(perms.front().size());
  a.group = std::move(group);
  a.perm.reserve(perms.size() * static_cast<std::size_t>(a.space_size));
  for (const auto& p : perms) {
    if (static_cast<int>(p.size()) != a.space_size)
      throw Error(Errc::dimension_mismatch, "permutations have different lengths");
    std::vector<char> seen(p.size(), 0);
    for (int i : p) {
      if (i < 0 || i >= a.space_size || seen[static_cast<std::size_t>(i)])
        throw Error(Errc::invalid_argument, "action row is not a bijection");
      seen[static_cast<std::size_t>(i)] = 1;
    }
    a.perm.insert(a.perm.end(), p.begin(), p.end());
  }
  return a;
}

GroupAction trivial_action(int space_size) {
  std::vector<int> id(static_cast<std::size_t>(space_size));
  for (int i = 0; i < space_size; ++i) id[static_cast<std::size_t>(i)] = i;
  return make_action(build_cyclic(1), {id});
}

GroupAction product_action(const GroupAction& a, const GroupAction& b) {
  GroupAction out;
  out.group = product_group(a.group, b.group);
  out.space_size = a.space_size * b.space_size;
  out.perm.resize(static_cast<std::size_t>(out.group.order) * out.space_size);
  for (int ga = 0; ga < a.group.order; ++ga)
    for (int gb = 0; gb < b.group.order; ++gb) {
      const int g = ga * b.group.order + gb;
      for (int i = 0; i < a.space_size; ++i)
        for (int j = 0; j < b.space_size; ++j)
          out.perm[static_cast<std::size_t>(g) * out.space_size + i * b.space_size + j] =
              a.image(ga, i) * b.space_size + b.image(gb, j);
    }
  return out;
}

ActionReport check_action(const GroupAction& action, const Vector& weights, double tol) {
  ActionReport rep;
  const auto& G = action.group;
  const int m = action.space_size;
  auto violate = [&rep](std::string s) {
    rep.passed = false;
    if (rep.violations.size() < 32) rep.violations.push_back(std::move(s));
  };
  if (weights.size() != m) {
    violate("weights length != space size");
    return rep;
  }
  for (int i = 0; i < m; ++i)
    if (action.image(G.identity, i) != i) violate("e does not fix point " + std::to_string(i));
  for (int g = 0; g < G.order; ++g)
    for (int h = 0; h < G.order; ++h)
      for (int i = 0; i < m; ++i)
        if (action.image(G.product(g, h), i) != action.image(g, action.image(h, i))) {
          std::ostringstream os;
          os << "left-action axiom fails at (g=" << g << ", h=" << h << ", i=" << i << ")";
          violate(os.str());
        }
  for (int g = 0; g < G.order; ++g)
    for (int i = 0; i < m; ++i) {
      const double dev = std::abs(weights[action.image(g, i)] - weights[i]);
      rep.max_weight_deviation = std::max(rep.max_weight_deviation, dev);
      if (dev > tol) {
        std::ostringstream os;
        os << "weight not invariant at (g=" << g << ", i=" << i << "), deviation " << dev;
        violate(os.str());
      }
    }
  for (int i = 0; i < m; ++i)
    for (int g = 0; g < G.order; ++g)
      if (g != G.identity && action.image(g, i) == i) {
        rep.fixed_points.push_back(i);
        break;
      }
  return rep;
}

namespace {

void check_projection_args(Index len, const GroupAction& action, const Irrep& pi) {
  if (len != action.space_size)
    throw Error(Errc::dimension_mismatch, "path length != action space size");
  if (pi.chi.size() != action.group.order)
    throw Error(Errc::dimension_mismatch, "character length != |G|");
}

}  // namespace

CVector project_path(const CVector& z, const GroupAction& action, const Irrep& pi) {
  check_projection_args(z.size(), action, pi);
  const auto& G = action.group;
  CVector out = CVector::Zero(z.size());
  for (int g = 0; g < G.order; ++g) {
    const Complex c = pi.chi[g] * (static_cast<double>(pi.dim) / G.order);
    const int ginv = G.inverse(g);
    for (Index i = 0; i < z.size(); ++i) out[i] += c * z[action.image(ginv, static_cast<int>(i))];
  }
  return out;
}

Vector project_path(const Vector& z, const GroupAction& action, const Irrep& pi) {
  Matrix col = z;
  return project_columns(col, action, pi).col(0);
}

Matrix project_columns(const Matrix& paths, const GroupAction& action, const Irrep& pi) {
  check_projection_args(paths.rows(), action, pi);
  if (!pi.real_valued)
    throw Error(Errc::complex_characters, "real projection needs a real character ('" +
                                              pi.label + "')");
  const auto& G = action.group;
  Matrix out = Matrix::Zero(paths.rows(), paths.cols());
  for (int g = 0; g < G.order; ++g) {
    const double c = pi.chi[g].real() * pi.dim / G.order;
    if (c == 0.0) continue;
    const int ginv = G.inverse(g);
    for (Index i = 0; i < paths.rows(); ++i)
      out.row(i) += c * paths.row(action.image(ginv, static_cast<int>(i)));
  }
  return out;
}

}  // namespace invdecomp
