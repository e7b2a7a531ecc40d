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
#include <vector>

#include "invdecomp/kernels.hpp"

namespace invdecomp {

struct Cluster {
  Index begin = 0;  // first eigen index
  Index end = 0;    // one past the last
  double value = 0.0;  // mean eigenvalue of the cluster

  Index multiplicity() const { return end - begin; }
};

/// Eigenpairs of f -> R diag(mu) f, eigenvalues descending, eigenvectors
/// orthonormal in <f, g>_mu = sum_i f_i g_i mu_i.
struct Spectrum {
  Vector eigenvalues;
  Matrix vectors;  // m x m, column k is f_k evaluated on the grid
  Vector weights;
  std::vector<Cluster> clusters;
  double rel_tol = 1e-6;
  double floor = 0.0;  // eigenvalues at or below it form the last cluster

  Index size() const { return eigenvalues.size(); }
  /// Eigenvectors of cluster j.
  Matrix basis(std::size_t j) const;
};

/// Neighbouring eigenvalues with relative gap below rel_tol share a cluster;
/// everything below 1e-12 lambda_max is lumped into one null cluster. Throws
/// Errc::zero_weight if some mu_i <= 0.
///
/// With refine set, one Rayleigh-Ritz correction is applied with the
/// projected operator formed in long double, which brings eigenvectors of
/// closely spaced small eigenvalues to well below double-precision solver
/// error (eps * lambda_max / gap).
Spectrum eigendecompose(const Kernel& k, double rel_tol = 1e-6, bool refine = true);

struct ClusterResidual {
  std::size_t cluster = 0;
  double value = 0.0;
  Index multiplicity = 0;
  double residual = 0.0;  // max over g and basis vectors
};

struct EigenspaceReport {
  std::vector<ClusterResidual> clusters;
  double max_residual = 0.0;
  double tolerance = 1e-8;
  bool passed = true;
};

/// For every cluster and group element, the mu-norm of g.f minus its
/// projection onto the cluster span, maximized over the basis.
EigenspaceReport check_eigenspace_invariance(const Spectrum& s, const GroupAction& action,
                                             double tol = 1e-8);

struct IsotypicPart {
  std::string label;
  Index dim = 0;
  Matrix basis;  // mu-orthonormal, m x dim
};

struct ClusterDecomposition {
  std::size_t cluster = 0;
  double value = 0.0;
  Index multiplicity = 0;
  std::vector<IsotypicPart> parts;
  double max_outside_residual = 0.0;  // how far projected vectors leave the cluster
};

struct CanonicalDecomposition {
  std::vector<ClusterDecomposition> clusters;
  /// Irrep label per eigen index after rotating every cluster onto its
  /// isotypic bases (in table order).
  std::vector<std::string> labels;
  Matrix vectors;  // the rotated eigenvectors
  double tolerance = 1e-8;
};

/// Character projection of every cluster. Throws Errc::decomposition_failed
/// when the isotypic dimensions do not add up to the multiplicity or a
/// projected vector leaves its cluster by more than tol.
CanonicalDecomposition canonical_decomposition(const Spectrum& s, const GroupAction& action,
                                               const CharacterTable& table, double tol = 1e-8);

/// Truncated KL representation: phi = first p eigenvectors, tau = eigenvalues.
FeatureMap kl_feature_map(const Kernel& k, Index p = 200);
FeatureMap kl_feature_map(const Kernel& k, const Spectrum& s, Index p);

/// sum_{k < p} lambda_k f_k f_k^T
Matrix reconstruct(const Spectrum& s, Index p);

/// sum_{k >= p} lambda_k
double truncation_bound(const Spectrum& s, Index p);

/// Rows (k, lambda, cluster_id, irrep_label); labels may be empty.
std::string spectrum_csv(const Spectrum& s, const std::vector<std::string>& labels = {});

}  // namespace invdecomp
