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

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "invdecomp/group.hpp"

namespace invdecomp {

/// Discretized parameter set: m points in R^d with quadrature masses and an
/// optional exact group action.
struct IndexSpace {
  Matrix points;  // m x d
  Vector weights;
  std::optional<GroupAction> action;

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }
  const GroupAction& bound_action() const;
};

enum class QuadratureRule {
  midpoint,        // t_i = (i + 1/2)/n, weights 1/n
  gauss_split,     // Gauss-Legendre with n/2 nodes on each of [0, 1/2] and [1/2, 1]
};

/// Quadrature grid on [0, 1]. Both rules are symmetric under t -> 1 - t.
/// gauss_split needs even n; it is exact for integrands that are
/// polynomials of degree < n on each half, such as functions of |1 - 2t|.
IndexSpace make_interval_grid(int n, QuadratureRule rule = QuadratureRule::midpoint);
QuadratureRule quadrature_rule(std::string_view name);
const char* to_string(QuadratureRule r);

/// Builds the action of `group` by mapping every point and matching the image
/// to a grid point within match_tol. Images that are not grid points are
/// rejected (Errc::invalid_argument): only exact permutation actions are used.
GroupAction action_from_map(const IndexSpace& space, const FiniteGroup& group,
                            const std::function<Vector(int, const Vector&)>& map,
                            double match_tol = 1e-12);

/// Z/2Z acting on a 1-d space by t -> 1 - t.
GroupAction reversal_action(const IndexSpace& space);

/// Binds an action after check_action succeeds; throws Errc::not_invariant
/// with the report's first violation otherwise.
IndexSpace with_action(IndexSpace space, GroupAction action, double tol = kExactTol);

IndexSpace with_reversal(IndexSpace space);

/// Cartesian product, points in row-major order of the factors. When
/// require_action is set every factor must carry an action and the product
/// action is bound.
IndexSpace make_product_grid(std::span<const IndexSpace> grids, bool require_action = false);

struct Kernel {
  IndexSpace space;
  Matrix R;

  Index size() const { return R.rows(); }
  const Vector& weights() const { return space.weights; }
};

struct PsdReport {
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double asymmetry = 0.0;
  bool passed = true;
};

/// Symmetry within 1e-12 (relative to max |R|) and min eigenvalue
/// >= -rel_tol * max eigenvalue.
PsdReport check_psd(const Matrix& R, double rel_tol = 1e-8);

/// Wraps a matrix as a kernel; throws Errc::not_psd if check_psd fails.
Kernel make_kernel(IndexSpace space, Matrix R, double rel_tol = 1e-8);

/// s ^ t - s t
double bridge_covariance(double s, double t);
/// s ^ t - (s + t)/2 + (s - t)^2/2 + 1/12, the compensated (Watson) bridge.
double watson_covariance(double s, double t);
/// (frac(u) - 1/2)^2 / 2 - 1/24, the stationary form of watson_covariance.
double watson_profile(double u);

/// Names: bridge, watson, torus_watson (1-d); sheet_tied, sheet_compensated
/// (2-d). user_matrix is handled by make_kernel.
Kernel builtin_kernel(std::string_view name, const IndexSpace& space);

struct InvarianceReport {
  double max_deviation = 0.0;
  double tolerance = kExactTol;
  bool passed = true;
};

/// max_{g,i,j} |R[g.i][g.j] - R[i][j]|; requires a bound action.
InvarianceReport check_invariance(const Kernel& k, double tol = kExactTol);

/// R^{pi x sigma}(y1, y2) = (d_pi d_sigma / |G|^2) sum_{g1,g2} chi_pi(g1) chi_sigma(g2)
///                          R(g1^-1 . y1, g2^-1 . y2).
/// Real characters only.
Matrix project_kernel(const Kernel& k, const Irrep& pi, const Irrep& sigma);

/// Diagonal block R^{pi x pi}, PSD-checked.
Kernel project_kernel(const Kernel& k, const Irrep& pi);

/// [K1 (x)_2 K2](y1, y2) = sum_x K1(y1, x) K2(y2, x) mu(x), i.e. K1 diag(mu) K2^T.
template <typename D1, typename D2, typename DW>
Matrix contract(const Eigen::MatrixBase<D1>& k1, const Eigen::MatrixBase<D2>& k2,
                const Eigen::MatrixBase<DW>& weights) {
  if (k1.cols() != weights.size() || k2.cols() != weights.size())
    throw Error(Errc::dimension_mismatch, "contract: kernel shape does not match weights");
  Matrix out(k1.rows(), k2.rows());
  out.noalias() = (k1 * weights.asDiagonal()) * k2.transpose();
  return out;
}

/// sum_i M[i][i] mu_i
template <typename D, typename DW>
double weighted_diag_trace(const Eigen::MatrixBase<D>& m, const Eigen::MatrixBase<DW>& weights) {
  if (m.rows() != weights.size() || m.cols() != weights.size())
    throw Error(Errc::dimension_mismatch, "weighted_diag_trace: shape mismatch");
  return m.diagonal().cwiseProduct(weights).sum();
}

/// The n-fold contraction chain [K (x)_n K]: n = 1 is K itself and each further
/// order contracts once more with K.
Matrix contract_power(const Matrix& k, const Vector& weights, int n);

inline Matrix contract_power(const Kernel& k, int n) { return contract_power(k.R, k.weights(), n); }

/// weighted_diag_trace(contract_power(K, n)) evaluated as tr(B^n) with
/// B = diag(mu)^1/2 K diag(mu)^1/2, using two half powers.
double contraction_trace(const Matrix& k, const Vector& weights, int n);

inline double contraction_trace(const Kernel& k, int n) {
  return contraction_trace(k.R, k.weights(), n);
}

/// contraction_trace for n = 1..n_max, sharing the operator powers.
std::vector<double> contraction_traces(const Matrix& k, const Vector& weights, int n_max);

inline std::vector<double> contraction_traces(const Kernel& k, int n_max) {
  return contraction_traces(k.R, k.weights(), n_max);
}

/// Volterra representation on a finite auxiliary space: the process is
/// Z(y_i) = sum_k phi[i][k] sqrt(tau_k) xi_k, with covariance phi diag(tau) phi^T.
struct FeatureMap {
  IndexSpace space;
  Matrix phi;  // m x p
  Vector tau;  // p

  Matrix induced_kernel() const { return phi * tau.asDiagonal() * phi.transpose(); }
};

/// phi^(pi)(y, t) = (d_pi / |G|) sum_g phi(g . y, t) chi_pi(g^-1).
FeatureMap project_feature_map(const FeatureMap& fm, const Irrep& pi);

}  // namespace invdecomp
