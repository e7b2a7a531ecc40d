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

#include "invdecomp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace invdecomp {

Matrix Spectrum::basis(std::size_t j) const {
  const Cluster& c = clusters.at(j);
  return vectors.middleCols(c.begin, c.multiplicity());
}

namespace {

std::vector<Cluster> cluster_values(const Vector& ev, double rel_tol, double floor) {
  std::vector<Cluster> out;
  const Index m = ev.size();
  Index begin = 0;
  while (begin < m) {
    Index end = begin + 1;
    if (ev[begin] <= floor) {
      end = m;
    } else {
      while (end < m && ev[end] > floor &&
             std::abs(ev[end - 1] - ev[end]) <= rel_tol * std::abs(ev[end - 1]))
        ++end;
    }
    out.push_back({begin, end, ev.segment(begin, end - begin).mean()});
    begin = end;
  }
  return out;
}

// First-order correction of U (eigenvectors of B, columns by descending
// eigenvalue) from the long double Ritz matrix U^T B U. Rotations inside a
// cluster are left alone.
void refine_pairs(const Matrix& B, Matrix& U, Vector& ev, const std::vector<Cluster>& clusters) {
  using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const Index m = U.cols();
  const LMatrix Ul = U.cast<long double>();
  LMatrix BU(m, m);
  BU.noalias() = B.cast<long double>() * Ul;
  LMatrix A(m, m);
  A.noalias() = Ul.transpose() * BU;

  std::vector<Index> owner(static_cast<std::size_t>(m));
  for (std::size_t j = 0; j < clusters.size(); ++j)
    for (Index k = clusters[j].begin; k < clusters[j].end; ++k) owner[static_cast<std::size_t>(k)] = static_cast<Index>(j);

  Matrix C = Matrix::Zero(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) {
      if (owner[static_cast<std::size_t>(i)] == owner[static_cast<std::size_t>(j)]) continue;
      const long double a = 0.5L * (A(j, i) + A(i, j));
      C(j, i) = static_cast<double>(a / (A(i, i) - A(j, j)));
    }
  C = (0.5 * (C - C.transpose())).eval();
  // Cayley transform keeps the basis orthonormal
  const Matrix I = Matrix::Identity(m, m);
  const Matrix Q = (I - 0.5 * C).partialPivLu().solve(I + 0.5 * C);
  U = (U * Q).eval();
  for (Index i = 0; i < m; ++i) ev[i] = static_cast<double>(A(i, i));
}

}  // namespace

Spectrum eigendecompose(const Kernel& k, double rel_tol, bool refine) {
  const Vector& mu = k.weights();
  if (mu.size() == 0) throw Error(Errc::invalid_argument, "empty kernel");
  if (mu.minCoeff() <= 0.0)
    throw Error(Errc::zero_weight, "eigendecomposition needs strictly positive quadrature weights");
  const Vector root = mu.cwiseSqrt();
  const Matrix B = root.asDiagonal() * k.R * root.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> es(B);

  Spectrum s;
  s.rel_tol = rel_tol;
  s.weights = mu;
  s.eigenvalues = es.eigenvalues().reverse();
  Matrix U = es.eigenvectors().rowwise().reverse();
  s.floor = 1e-12 * std::max(s.eigenvalues[0], 0.0);
  s.clusters = cluster_values(s.eigenvalues, rel_tol, s.floor);
  if (refine) {
    refine_pairs(B, U, s.eigenvalues, s.clusters);
    s.clusters = cluster_values(s.eigenvalues, rel_tol, s.floor);
  }
  s.vectors = root.cwiseInverse().asDiagonal() * U;
  return s;
}

namespace {

Matrix translate(const Matrix& f, const GroupAction& a, int g) {
  Matrix out(f.rows(), f.cols());
  for (Index i = 0; i < f.rows(); ++i) out.row(i) = f.row(a.image(g, static_cast<int>(i)));
  return out;
}

// max mu-norm of the columns of v after removing their component in span(F)
double outside_residual(const Matrix& F, const Matrix& v, const Vector& mu) {
  const Matrix coeff = F.transpose() * mu.asDiagonal() * v;
  const Matrix rest = v - F * coeff;
  double r = 0.0;
  for (Index j = 0; j < rest.cols(); ++j)
    r = std::max(r, std::sqrt(rest.col(j).cwiseAbs2().dot(mu)));
  return r;
}

}  // namespace

EigenspaceReport check_eigenspace_invariance(const Spectrum& s, const GroupAction& action, double tol) {
  if (action.space_size != s.size())
    throw Error(Errc::dimension_mismatch, "action does not match the spectrum size");
  EigenspaceReport rep;
  rep.tolerance = tol;
  for (std::size_t j = 0; j < s.clusters.size(); ++j) {
    const Matrix F = s.basis(j);
    ClusterResidual cr{j, s.clusters[j].value, s.clusters[j].multiplicity(), 0.0};
    for (int g = 0; g < action.group.order; ++g) {
      if (g == action.group.identity) continue;
      cr.residual = std::max(cr.residual, outside_residual(F, translate(F, action, g), s.weights));
    }
    rep.max_residual = std::max(rep.max_residual, cr.residual);
    rep.clusters.push_back(cr);
  }
  rep.passed = rep.max_residual <= tol;
  return rep;
}

CanonicalDecomposition canonical_decomposition(const Spectrum& s, const GroupAction& action,
                                               const CharacterTable& table, double tol) {
  if (!table.all_real())
    throw Error(Errc::complex_characters, "canonical decomposition needs real characters");
  CanonicalDecomposition out;
  out.tolerance = tol;
  out.vectors.resize(s.vectors.rows(), s.vectors.cols());
  out.labels.resize(static_cast<std::size_t>(s.size()));
  const Vector& mu = s.weights;
  for (std::size_t j = 0; j < s.clusters.size(); ++j) {
    const Cluster& c = s.clusters[j];
    const Matrix F = s.basis(j);
    ClusterDecomposition cd{j, c.value, c.multiplicity(), {}, 0.0};
    Index filled = c.begin;
    for (const Irrep& pi : table.irreps) {
      const Matrix P = project_columns(F, action, pi);
      cd.max_outside_residual = std::max(cd.max_outside_residual, outside_residual(F, P, mu));
      const Matrix gram = P.transpose() * mu.asDiagonal() * P;
      Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
      // the projection is a mu-orthogonal projector, so gram eigenvalues are 0 or 1
      std::vector<Index> keep;
      for (Index q = 0; q < gram.rows(); ++q)
        if (es.eigenvalues()[q] > 0.5) keep.push_back(q);
      IsotypicPart part{pi.label, static_cast<Index>(keep.size()), Matrix(F.rows(), static_cast<Index>(keep.size()))};
      for (std::size_t q = 0; q < keep.size(); ++q)
        part.basis.col(static_cast<Index>(q)) =
            P * es.eigenvectors().col(keep[q]) / std::sqrt(es.eigenvalues()[keep[q]]);
      for (Index q = 0; q < part.dim && filled < c.end; ++q, ++filled) {
        out.vectors.col(filled) = part.basis.col(q);
        out.labels[static_cast<std::size_t>(filled)] = pi.label;
      }
      cd.parts.push_back(std::move(part));
    }
    Index total = 0;
    for (const auto& p : cd.parts) total += p.dim;
    if (total != c.multiplicity() || cd.max_outside_residual > tol) {
      std::ostringstream msg;
      msg << "cluster " << j << " (lambda " << c.value << ", multiplicity " << c.multiplicity()
          << "): isotypic dimensions sum to " << total << ", outside residual "
          << cd.max_outside_residual;
      throw Error(Errc::decomposition_failed, msg.str());
    }
    out.clusters.push_back(std::move(cd));
  }
  return out;
}

FeatureMap kl_feature_map(const Kernel& k, const Spectrum& s, Index p) {
  if (p < 1) throw Error(Errc::invalid_argument, "feature map cutoff must be >= 1");
  p = std::min(p, s.size());
  return FeatureMap{k.space, s.vectors.leftCols(p), s.eigenvalues.head(p).cwiseMax(0.0)};
}

FeatureMap kl_feature_map(const Kernel& k, Index p) { return kl_feature_map(k, eigendecompose(k), p); }

Matrix reconstruct(const Spectrum& s, Index p) {
  p = std::min(p, s.size());
  const Matrix F = s.vectors.leftCols(p);
  return F * s.eigenvalues.head(p).asDiagonal() * F.transpose();
}

double truncation_bound(const Spectrum& s, Index p) {
  p = std::min(p, s.size());
  return s.eigenvalues.tail(s.size() - p).cwiseMax(0.0).sum();
}

std::string spectrum_csv(const Spectrum& s, const std::vector<std::string>& labels) {
  std::ostringstream os;
  os << std::setprecision(17) << "k,lambda,cluster_id,irrep_label\n";
  for (std::size_t j = 0; j < s.clusters.size(); ++j)
    for (Index k = s.clusters[j].begin; k < s.clusters[j].end; ++k) {
      os << k + 1 << ',' << s.eigenvalues[k] << ',' << j << ',';
      if (static_cast<std::size_t>(k) < labels.size()) os << labels[static_cast<std::size_t>(k)];
      os << '\n';
    }
  return os.str();
}

}  // namespace invdecomp
