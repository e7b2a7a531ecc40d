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

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "invdecomp/sampler.hpp"

namespace invdecomp {

/// Lattice {sum a_i v_i : a in Z^n}; the basis vectors are the columns.
struct Lattice {
  Matrix basis;

  Index dim() const { return basis.rows(); }
  double volume() const;
  double condition_number() const;
};

/// Throws Errc::singular_basis for a non-square or (numerically) singular
/// basis.
Lattice make_lattice(Matrix basis);

/// Basis V^{-T}; verifies <v_i | w_j> = delta_ij within tol.
Lattice dual_lattice(const Lattice& l, double tol = 1e-10);

/// Uniform grid x_a = V (a / N) on the flat torus R^n / lattice, a_i in
/// [0, N_i), with weights vol / prod N. Negation a -> -a mod N is bound as a
/// Z/2Z action.
struct TorusGrid {
  Lattice lattice;
  std::vector<int> resolution;
  IndexSpace space;
  std::vector<std::vector<int>> coords;  // integer lattice coordinates per point
  std::vector<int> negation;             // index of -x_a

  Index size() const { return space.size(); }
  /// Linear index of integer coordinates (taken mod N).
  int index_of(const std::vector<int>& a) const;
  /// Indices of the points fixed by negation.
  std::vector<int> fixed_points() const;
};

TorusGrid make_torus_grid(const Lattice& l, std::vector<int> resolution);

/// Profile of a stationary kernel as a function of lattice coordinates c
/// (the torus variable u = V c).
using Profile = std::function<double(const Vector& lattice_coords)>;

/// "watson": product over axes of watson_profile(c_i); "constant": value.
Profile builtin_profile(const std::string& name, double value = 0.0);

/// K[i][j] = k(x_j - x_i).
Kernel profile_kernel(const TorusGrid& grid, const Profile& k);

struct StationarityReport {
  double max_spread = 0.0;
  double tolerance = 1e-10;
  bool passed = true;
};

/// Largest spread of K[i][j] among pairs with the same x_j - x_i mod lattice.
StationarityReport check_stationarity(const TorusGrid& grid, const Matrix& K, double tol = 1e-10);

struct FourierCoefficient {
  std::vector<int> v;  // integer coordinates in the dual basis
  double a = 0.0;      // cosine coefficient
  double b = 0.0;      // sine coefficient
};

/// k(u) = sum_v a_v cos(2 pi <v|u>) over the retained dual vectors, with the
/// coefficients of v and -v kept separately (a_v = a_-v). The operator
/// eigenvalue of the pair cos/sin at v is vol * a_v.
struct TorusKernelSpec {
  Lattice lattice;
  Lattice dual;
  std::vector<int> resolution;
  int cutoff = 0;
  std::vector<FourierCoefficient> coefficients;
  double max_sine = 0.0;
  double min_cosine = 0.0;
  double discrete_tail = 0.0;  // sum of |a_v| over the dropped part of the box

  /// Eigenvalue of the pair at v (a_v times the fundamental-domain volume).
  double eigenvalue(const FourierCoefficient& c) const;
};

/// Discrete Fourier coefficients of profile samples (one per grid point) over
/// all dual vectors with max |v_i| <= cutoff. Throws Errc::nyquist_violation
/// unless cutoff < N_i / 2, Errc::not_even if a sine coefficient exceeds
/// even_tol, Errc::not_psd if a cosine coefficient is below -psd_tol.
TorusKernelSpec fourier_kl(const Vector& profile_samples, const TorusGrid& grid, int cutoff,
                           double even_tol = 1e-10, double psd_tol = 1e-10);

/// sum_v max(a_v, 0) cos(2 pi <v | x_j - x_i>)
Matrix assemble_kernel(const TorusKernelSpec& spec, const TorusGrid& grid);

struct ParityParts {
  Matrix odd;   // X1 = (X - X o neg) / 2
  Matrix even;  // X2 = (X + X o neg) / 2
};

/// Throws Errc::not_negation_closed if the grid has no negation permutation.
ParityParts parity_decompose(const Matrix& paths, const TorusGrid& grid);

struct TorusWatsonReport {
  Index samples = 0;
  std::uint64_t seed = 0;
  double stationarity_spread = 0.0;
  // pathwise residuals, max over samples
  double halved_plain_residual = 0.0;     // int X^2 - int X1^2 - int X2^2
  double unhalved_quarter_residual = 0.0; // int X^2 - (int (2 X1)^2 + int (2 X2)^2) / 4
  double halved_quarter_residual = 0.0;   // int X^2 - (int X1^2 + int X2^2) / 4
  double inner_product_residual = 0.0;    // <X1, X2>_m
  double pathwise_tol = 1e-10;
  double max_cross_covariance = 0.0;
  double cross_covariance_bound = 0.0;  // 4 / sqrt(S)
  double odd_at_fixed_points = 0.0;
  DistributionComparison comparison;  // int X1^2 vs int X2^2
  double ks_threshold = 0.02;
  std::vector<double> mean_energy;  // int X^2, int X1^2, int X2^2

  bool halved_plain_holds() const { return halved_plain_residual <= pathwise_tol; }
  bool unhalved_quarter_holds() const { return unhalved_quarter_residual <= pathwise_tol; }
  bool halved_quarter_holds() const { return halved_quarter_residual <= pathwise_tol; }
  bool passed() const;
};

/// Samples X from the assembled kernel of spec and checks the parity split.
/// Throws Errc::not_stationary if the assembled kernel fails stationarity.
TorusWatsonReport torus_watson_check(const TorusKernelSpec& spec, const TorusGrid& grid, Index S,
                                     std::uint64_t seed, int threads = 0, double ks_threshold = 0.02);

}  // namespace invdecomp
