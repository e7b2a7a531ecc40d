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

#include "invdecomp/torus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace invdecomp {

double Lattice::volume() const { return std::abs(basis.determinant()); }

double Lattice::condition_number() const {
  Eigen::JacobiSVD<Matrix> svd(basis);
  const Vector& sv = svd.singularValues();
  return sv[0] / sv[sv.size() - 1];
}

Lattice make_lattice(Matrix basis) {
  if (basis.rows() == 0 || basis.rows() != basis.cols())
    throw Error(Errc::singular_basis, "lattice basis must be a non-empty square matrix");
  double scale = 1.0;
  for (Index j = 0; j < basis.cols(); ++j) scale *= basis.col(j).norm();
  if (!(std::abs(basis.determinant()) > 1e-12 * scale))
    throw Error(Errc::singular_basis, "lattice basis is singular");
  return Lattice{std::move(basis)};
}

Lattice dual_lattice(const Lattice& l, double tol) {
  Lattice d = make_lattice(l.basis.inverse().transpose());
  const Matrix pairing = l.basis.transpose() * d.basis;
  const double dev = (pairing - Matrix::Identity(l.dim(), l.dim())).cwiseAbs().maxCoeff();
  if (dev > tol)
    throw Error(Errc::singular_basis, "dual basis fails integrality by " + std::to_string(dev));
  return d;
}

int TorusGrid::index_of(const std::vector<int>& a) const {
  int idx = 0;
  for (std::size_t i = 0; i < resolution.size(); ++i) {
    const int n = resolution[i];
    idx = idx * n + ((a[i] % n) + n) % n;
  }
  return idx;
}

std::vector<int> TorusGrid::fixed_points() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < negation.size(); ++i)
    if (negation[i] == static_cast<int>(i)) out.push_back(static_cast<int>(i));
  return out;
}

TorusGrid make_torus_grid(const Lattice& l, std::vector<int> resolution) {
  if (static_cast<Index>(resolution.size()) != l.dim())
    throw Error(Errc::dimension_mismatch, "one resolution per lattice direction is required");
  long total = 1;
  for (int n : resolution) {
    if (n < 1) throw Error(Errc::invalid_argument, "torus resolution must be >= 1");
    total *= n;
  }
  TorusGrid g;
  g.lattice = l;
  g.resolution = resolution;
  const Index d = l.dim();
  g.space.points.resize(total, d);
  g.space.weights = Vector::Constant(total, l.volume() / static_cast<double>(total));
  g.coords.resize(static_cast<std::size_t>(total));
  std::vector<int> a(static_cast<std::size_t>(d), 0);
  for (long p = 0; p < total; ++p) {
    long rest = p;
    for (Index i = d - 1; i >= 0; --i) {
      const int n = resolution[static_cast<std::size_t>(i)];
      a[static_cast<std::size_t>(i)] = static_cast<int>(rest % n);
      rest /= n;
    }
    Vector frac(d);
    for (Index i = 0; i < d; ++i)
      frac[i] = static_cast<double>(a[static_cast<std::size_t>(i)]) / resolution[static_cast<std::size_t>(i)];
    g.space.points.row(p) = (l.basis * frac).transpose();
    g.coords[static_cast<std::size_t>(p)] = a;
  }
  g.negation.resize(static_cast<std::size_t>(total));
  for (long p = 0; p < total; ++p) {
    std::vector<int> neg = g.coords[static_cast<std::size_t>(p)];
    for (auto& v : neg) v = -v;
    g.negation[static_cast<std::size_t>(p)] = g.index_of(neg);
  }
  std::vector<int> id(static_cast<std::size_t>(total));
  for (long p = 0; p < total; ++p) id[static_cast<std::size_t>(p)] = static_cast<int>(p);
  g.space = with_action(std::move(g.space), make_action(build_cyclic(2), {id, g.negation}));
  return g;
}

Profile builtin_profile(const std::string& name, double value) {
  if (name == "watson")
    return [](const Vector& c) {
      double v = 1.0;
      for (Index i = 0; i < c.size(); ++i) v *= watson_profile(c[i]);
      return v;
    };
  if (name == "constant") return [value](const Vector&) { return value; };
  throw Error(Errc::invalid_argument, "unknown torus profile '" + name + "'");
}

namespace {

// lattice coordinates of x_j - x_i reduced to [0, 1)
Vector difference(const TorusGrid& g, std::size_t i, std::size_t j) {
  const auto& a = g.coords[i];
  const auto& b = g.coords[j];
  Vector c(static_cast<Index>(a.size()));
  for (std::size_t q = 0; q < a.size(); ++q) {
    const int n = g.resolution[q];
    c[static_cast<Index>(q)] = static_cast<double>(((b[q] - a[q]) % n + n) % n) / n;
  }
  return c;
}

int difference_index(const TorusGrid& g, std::size_t i, std::size_t j) {
  std::vector<int> d(g.coords[i].size());
  for (std::size_t q = 0; q < d.size(); ++q) d[q] = g.coords[j][q] - g.coords[i][q];
  return g.index_of(d);
}

}  // namespace

Kernel profile_kernel(const TorusGrid& grid, const Profile& k) {
  const auto m = static_cast<std::size_t>(grid.size());
  Matrix R(grid.size(), grid.size());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) R(static_cast<Index>(i), static_cast<Index>(j)) = k(difference(grid, i, j));
  R = (0.5 * (R + R.transpose())).eval();
  return make_kernel(grid.space, std::move(R));
}

StationarityReport check_stationarity(const TorusGrid& grid, const Matrix& K, double tol) {
  if (K.rows() != grid.size() || K.cols() != grid.size())
    throw Error(Errc::dimension_mismatch, "kernel does not match the torus grid");
  const auto m = static_cast<std::size_t>(grid.size());
  Vector lo = Vector::Constant(grid.size(), std::numeric_limits<double>::infinity());
  Vector hi = Vector::Constant(grid.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const int d = difference_index(grid, i, j);
      const double v = K(static_cast<Index>(i), static_cast<Index>(j));
      lo[d] = std::min(lo[d], v);
      hi[d] = std::max(hi[d], v);
    }
  StationarityReport rep;
  rep.tolerance = tol;
  rep.max_spread = (hi - lo).maxCoeff();
  rep.passed = rep.max_spread <= tol;
  return rep;
}

double TorusKernelSpec::eigenvalue(const FourierCoefficient& c) const { return lattice.volume() * c.a; }

namespace {

// fractional phase sum_i v_i a_i / N_i mod 1, from exact integer products
double phase(const std::vector<int>& v, const std::vector<int>& a, const std::vector<int>& n) {
  double p = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const long long r = ((static_cast<long long>(v[i]) * a[i]) % n[i] + n[i]) % n[i];
    p += static_cast<double>(r) / n[i];
  }
  return p - std::floor(p);
}

// all integer vectors in the box prod [lo_i, hi_i], last axis fastest
std::vector<std::vector<int>> box(const std::vector<int>& lo, const std::vector<int>& hi) {
  std::vector<std::vector<int>> out;
  std::vector<int> v = lo;
  while (true) {
    out.push_back(v);
    std::size_t i = v.size();
    while (i > 0) {
      --i;
      if (++v[i] <= hi[i]) break;
      v[i] = lo[i];
      if (i == 0) return out;
    }
    if (v.empty()) return out;
  }
}

}  // namespace

TorusKernelSpec fourier_kl(const Vector& profile_samples, const TorusGrid& grid, int cutoff,
                           double even_tol, double psd_tol) {
  if (profile_samples.size() != grid.size())
    throw Error(Errc::dimension_mismatch, "one profile sample per grid point is required");
  if (cutoff < 0) throw Error(Errc::invalid_argument, "cutoff must be >= 0");
  for (int n : grid.resolution)
    if (2 * cutoff >= n)
      throw Error(Errc::nyquist_violation, "cutoff " + std::to_string(cutoff) +
                                               " is not below half the resolution " + std::to_string(n));
  TorusKernelSpec spec;
  spec.lattice = grid.lattice;
  spec.dual = dual_lattice(grid.lattice);
  spec.resolution = grid.resolution;
  spec.cutoff = cutoff;

  const std::size_t d = grid.resolution.size();
  std::vector<int> lo(d), hi(d);
  for (std::size_t i = 0; i < d; ++i) {
    lo[i] = -(grid.resolution[i] - 1) / 2;
    hi[i] = grid.resolution[i] / 2;
  }
  const double inv_total = 1.0 / static_cast<double>(grid.size());
  const double two_pi = 2.0 * std::numbers::pi;
  spec.min_cosine = std::numeric_limits<double>::infinity();
  for (const auto& v : box(lo, hi)) {
    double a = 0.0, b = 0.0;
    for (std::size_t p = 0; p < grid.coords.size(); ++p) {
      const double t = two_pi * phase(v, grid.coords[p], grid.resolution);
      a += profile_samples[static_cast<Index>(p)] * std::cos(t);
      b += profile_samples[static_cast<Index>(p)] * std::sin(t);
    }
    a *= inv_total;
    b *= inv_total;
    bool retained = true;
    for (int c : v) retained = retained && std::abs(c) <= cutoff;
    if (!retained) {
      spec.discrete_tail += std::abs(a);
      continue;
    }
    spec.max_sine = std::max(spec.max_sine, std::abs(b));
    spec.min_cosine = std::min(spec.min_cosine, a);
    spec.coefficients.push_back({v, a, b});
  }
  if (spec.max_sine > even_tol)
    throw Error(Errc::not_even, "sine coefficient " + std::to_string(spec.max_sine) +
                                    " exceeds " + std::to_string(even_tol));
  if (spec.min_cosine < -psd_tol)
    throw Error(Errc::not_psd, "cosine coefficient " + std::to_string(spec.min_cosine) +
                                   " is negative beyond " + std::to_string(psd_tol));
  return spec;
}

Matrix assemble_kernel(const TorusKernelSpec& spec, const TorusGrid& grid) {
  if (spec.resolution != grid.resolution)
    throw Error(Errc::dimension_mismatch, "spec and grid resolutions differ");
  const double two_pi = 2.0 * std::numbers::pi;
  // the kernel is a function of the difference index only
  Vector profile = Vector::Zero(grid.size());
  for (std::size_t p = 0; p < grid.coords.size(); ++p)
    for (const auto& c : spec.coefficients)
      profile[static_cast<Index>(p)] +=
          std::max(c.a, 0.0) * std::cos(two_pi * phase(c.v, grid.coords[p], grid.resolution));
  const auto m = static_cast<std::size_t>(grid.size());
  Matrix K(grid.size(), grid.size());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      K(static_cast<Index>(i), static_cast<Index>(j)) = profile[difference_index(grid, i, j)];
  return 0.5 * (K + K.transpose());
}

ParityParts parity_decompose(const Matrix& paths, const TorusGrid& grid) {
  if (static_cast<Index>(grid.negation.size()) != grid.size())
    throw Error(Errc::not_negation_closed, "grid carries no negation permutation");
  if (paths.rows() != grid.size()) throw Error(Errc::dimension_mismatch, "paths do not match the grid");
  Matrix reflected(paths.rows(), paths.cols());
  for (Index i = 0; i < paths.rows(); ++i) reflected.row(i) = paths.row(grid.negation[static_cast<std::size_t>(i)]);
  return {0.5 * (paths - reflected), 0.5 * (paths + reflected)};
}

bool TorusWatsonReport::passed() const {
  return halved_plain_holds() && unhalved_quarter_holds() && inner_product_residual <= pathwise_tol &&
         max_cross_covariance <= cross_covariance_bound && odd_at_fixed_points <= 1e-12 &&
         comparison.ks_distance < ks_threshold;
}

TorusWatsonReport torus_watson_check(const TorusKernelSpec& spec, const TorusGrid& grid, Index S,
                                     std::uint64_t seed, int threads, double ks_threshold) {
  Matrix K = assemble_kernel(spec, grid);
  const StationarityReport st = check_stationarity(grid, K);
  if (!st.passed)
    throw Error(Errc::not_stationary, "assembled kernel spread " + std::to_string(st.max_spread));
  const Kernel kernel = make_kernel(grid.space, std::move(K));
  const PathEnsemble X = sample(kernel, S, seed, {0, threads});
  const ParityParts parts = parity_decompose(X.samples, grid);
  const Vector& mu = grid.space.weights;

  TorusWatsonReport rep;
  rep.samples = S;
  rep.seed = seed;
  rep.stationarity_spread = st.max_spread;
  rep.ks_threshold = ks_threshold;
  Vector e(S), e1(S), e2(S);
  for (Index s = 0; s < S; ++s) {
    const auto x = X.samples.col(s);
    const auto x1 = parts.odd.col(s);
    const auto x2 = parts.even.col(s);
    e[s] = x.cwiseAbs2().dot(mu);
    e1[s] = x1.cwiseAbs2().dot(mu);
    e2[s] = x2.cwiseAbs2().dot(mu);
    const double u1 = (2.0 * x1).cwiseAbs2().dot(mu);
    const double u2 = (2.0 * x2).cwiseAbs2().dot(mu);
    rep.halved_plain_residual = std::max(rep.halved_plain_residual, std::abs(e[s] - e1[s] - e2[s]));
    rep.unhalved_quarter_residual = std::max(rep.unhalved_quarter_residual, std::abs(e[s] - 0.25 * (u1 + u2)));
    rep.halved_quarter_residual = std::max(rep.halved_quarter_residual, std::abs(e[s] - 0.25 * (e1[s] + e2[s])));
    rep.inner_product_residual = std::max(rep.inner_product_residual, std::abs(x1.cwiseProduct(x2).dot(mu)));
  }
  rep.max_cross_covariance = empirical_cross_covariance(parts.odd, parts.even).cwiseAbs().maxCoeff();
  rep.cross_covariance_bound = 4.0 / std::sqrt(static_cast<double>(S));
  for (int p : grid.fixed_points())
    rep.odd_at_fixed_points = std::max(rep.odd_at_fixed_points, parts.odd.row(p).cwiseAbs().maxCoeff());
  rep.comparison = compare_distributions(e1, e2);
  rep.mean_energy = {e.mean(), e1.mean(), e2.mean()};
  return rep;
}

}  // namespace invdecomp
