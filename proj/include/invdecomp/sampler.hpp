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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "invdecomp/cumulants.hpp"
#include "invdecomp/kernels.hpp"

namespace invdecomp {

/// requested if > 0, else INVDECOMP_THREADS, else the hardware concurrency.
/// Never affects results.
int resolve_threads(int requested = 0);

/// Samples are generated in fixed column chunks of this size, so products and
/// reductions see the same shapes whatever the thread count.
inline constexpr Index kSampleChunk = 256;

/// L with L L^T = R: eigenvectors scaled by sqrt of the eigenvalues, with
/// eigenvalues below clip * lambda_max dropped.
struct GaussianFactor {
  Matrix L;  // m x rank

  Index size() const { return L.rows(); }
  Index rank() const { return L.cols(); }
};

GaussianFactor factorize(const Kernel& k, double clip = 1e-12);

/// Unit normals for column `index` of stream `stream`. Every column has its own
/// generator seeded from (seed, stream, index).
void fill_normals(std::uint64_t seed, std::uint64_t stream, std::uint64_t index,
                  Eigen::Ref<Vector> out);

struct PathEnsemble {
  IndexSpace space;
  Matrix samples;  // m x S
  std::uint64_t seed = 0;
  Index factorization_rank = 0;

  Index count() const { return samples.cols(); }
};

struct CorrelatedPair {
  PathEnsemble first;
  PathEnsemble second;
  double rho = 1.0;
};

struct SampleOptions {
  std::uint64_t stream = 0;  // independent copies use distinct streams
  int threads = 0;
};

PathEnsemble sample(const Kernel& k, Index count, std::uint64_t seed, SampleOptions opt = {});

/// Z2 = rho Z1 + sqrt(1 - rho^2) Z1' with Z1' independent; Z2 is a copy of Z1
/// when rho = 1. Uses streams 2 * opt.stream and 2 * opt.stream + 1.
CorrelatedPair sample_pair(const Kernel& k, double rho, Index count, std::uint64_t seed,
                           SampleOptions opt = {});

/// Per-sample sum_i Z1[i] Z2[i] mu_i.
Vector quadratic_functional(const CorrelatedPair& p);

/// quadratic_functional(sample_pair(k, rho, count, seed, opt)) computed chunk by
/// chunk without keeping the ensembles.
Vector pair_functional(const Kernel& k, double rho, Index count, std::uint64_t seed,
                       SampleOptions opt = {});

/// Same draws as pair_functional but with a precomputed factor.
Vector pair_functional(const GaussianFactor& f, const Vector& weights, double rho, Index count,
                       std::uint64_t seed, SampleOptions opt = {});

struct Component {
  std::string label;
  PathEnsemble ensemble;
};

/// Character projection of every sample path, one ensemble per irrep.
std::vector<Component> decompose_ensemble(const PathEnsemble& e, const CharacterTable& table);

/// Empirical covariance (1/S) Z1 Z2^T of centered-in-law ensembles.
Matrix empirical_cross_covariance(const Matrix& a, const Matrix& b);

/// Fisher k-statistics k1..k4.
std::array<double, 4> k_statistics(const Vector& x);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(const Vector& a, const Vector& b);

struct DistributionComparison {
  double ks_distance = 0.0;
  std::array<double, 4> kstats_a{};
  std::array<double, 4> kstats_b{};
  std::array<double, 4> cumulant_gaps{};  // kstats_a - kstats_b
};

/// Throws Errc::undersized_sample unless both sides have at least 1000 draws.
DistributionComparison compare_distributions(const Vector& a, const Vector& b);

/// Sampling variances of k1..k4 for S draws of a law with cumulants kappa_1..8
/// (kappa.n_max() >= 8).
std::array<double, 4> k_statistic_variances(const CumulantVector& kappa, Index S);

struct IdentityCheckReport {
  std::string name;
  double rho = 1.0;
  Index samples = 0;
  std::uint64_t seed = 0;
  std::vector<int> grid;
  DistributionComparison comparison;
  CumulantVector lhs_analytic;
  CumulantVector rhs_analytic;
  std::array<double, 4> gap_tolerance{};  // 4 standard errors + analytic gap
  std::array<bool, 4> gap_passed{};
  int orders_checked = 4;
  double ks_threshold = 0.01;
  bool ks_passed = false;
  double mean_target = 0.0;
  double mean_rel_tol = 0.01;
  std::array<double, 2> mean_rel_error{};  // lhs, rhs
  bool mean_passed = true;
  bool mean_checked = false;
  Vector lhs_samples;
  Vector rhs_samples;

  bool passed() const;
};

struct DuplicationConfig {
  int grid = 256;
  Index samples = 100000;
  double rho = 1.0;
  std::uint64_t seed = 1;
  double ks_threshold = 0.01;
  double mean_rel_tol = 0.01;
  int threads = 0;
};

/// int v1 v2 (compensated bridge pair) against 1/4 (int b1 b2 + int b1* b2*)
/// (two independent bridge pairs), both with correlation rho.
IdentityCheckReport duplication_check(const DuplicationConfig& cfg);

struct QuadruplicationConfig {
  int grid = 32;  // per axis
  Index samples = 50000;
  double rho = 0.5;
  std::uint64_t seed = 1;
  double ks_threshold = 0.015;
  int orders = 3;
  int threads = 0;
};

/// Compensated sheet pair against 1/16 of four independent tied-down sheet
/// pair functionals.
IdentityCheckReport quadruplication_check(const QuadruplicationConfig& cfg);

struct CumulantMcReport {
  double rho = 1.0;
  Index samples = 0;
  std::uint64_t seed = 0;
  std::array<double, 3> analytic{};
  std::array<double, 3> empirical{};
  /// Relative error, or |k_n| / kappa_2^(n/2) where kappa_n vanishes.
  std::array<double, 3> error{};
  std::array<bool, 3> standardized{};
  std::array<double, 3> tolerance{0.01, 0.03, 0.10};

  bool passed() const;
};

/// Empirical k-statistics of int Z1 Z2 dmu against analytic_cumulants.
CumulantMcReport cumulant_mc_check(const Kernel& k, double rho, Index S, std::uint64_t seed,
                                   SampleOptions opt = {});

/// Sample mean of exp(lambda^2 int Z1 Z2 dmu).
double mgf_monte_carlo(const Kernel& k, double lambda, double rho, Index S, std::uint64_t seed,
                       SampleOptions opt = {});

}  // namespace invdecomp
