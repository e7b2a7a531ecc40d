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

/// K(n, rho) for the cumulants of int Z1 Z2 dmu, evaluated by its binomial
/// sums: 2 rho for n = 1, separate even and odd cases for n >= 2.
double k_coeff(int n, double rho);

/// c_n = 2^(n-1) (n-1)!
double cumulant_coefficient(int n);

struct CumulantVector {
  double rho = 1.0;
  std::vector<double> values;  // values[n-1] = kappa_n

  double operator[](int n) const { return values[static_cast<std::size_t>(n - 1)]; }
  int n_max() const { return static_cast<int>(values.size()); }
};

/// kappa_1 = rho tr_1, kappa_n = c_n K(n, rho) 2^-n tr_n from precomputed
/// contraction traces tr_n.
CumulantVector cumulants_from_traces(const std::vector<double>& traces, double rho);

/// Cumulants of the uncentered functional int Z1 Z2 dmu for a rho-correlated
/// pair with marginal covariance k.
CumulantVector analytic_cumulants(const Kernel& k, double rho, int n_max);

/// Cumulants of a * J_1 + ... (independent copies): kappa_n scales by
/// copies * scale^n.
CumulantVector scale_cumulants(const CumulantVector& c, double scale, int copies = 1);

struct IrrepTraces {
  std::string label;
  std::vector<double> traces;     // tr of the n-fold contraction of R^{pi x pi}
  std::vector<double> cumulants;  // analytic cumulants of the irrep functional
  std::vector<double> cII_dev;    // relative gap to K(n,rho) tr(R_n) / |G^|
  std::vector<double> cIII_dev;   // largest relative gap to any other irrep
};

struct WatsonCheckReport {
  double rho = 1.0;
  int n_max = 0;
  double tolerance = 1e-3;
  double invariance_deviation = 0.0;
  std::vector<double> full_traces;
  std::vector<bool> vacuous;  // K(n, rho) = 0
  std::vector<IrrepTraces> per_irrep;
  bool cII_passed = true;
  bool cIII_passed = true;
  double max_cII_dev = 0.0;
  double max_cIII_dev = 0.0;

  bool passed() const { return cII_passed && cIII_passed; }
};

/// Relative gap |a - b| / max(|a|, |b|), 0 when both vanish.
double relative_gap(double a, double b);

/// Compares the per-irrep contraction traces across irreps and against the
/// equal share of the full trace. Throws Errc::not_invariant if the kernel is
/// not invariant under its action, Errc::complex_characters for complex
/// irreps.
WatsonCheckReport watson_relation_check(const Kernel& k, const CharacterTable& table, double rho,
                                        int n_max, double tol = 1e-3);

struct Z2ConditionReport {
  std::vector<double> values;  // sum_i M_n[i][g.i] mu_i
  double tolerance = 1e-8;
  bool passed = true;
  double max_abs = 0.0;
};

/// Twisted traces of the contraction powers under the non-identity element of
/// a Z/2Z action. Throws Errc::wrong_group for any other group.
Z2ConditionReport z2_condition_check(const Kernel& k, int n_max, double tol = 1e-8);

struct MgfValues {
  double closed_form = 1.0;
  double spectral = 1.0;
  double relative_error = 0.0;
};

/// Singularity of E exp(lambda^2 int v1 v2): 2 pi / sqrt(1 + rho).
double mgf_watson_radius(double rho);

/// closed form (x / sin x)(y / sinh y), x = (lambda/2) sqrt(1+rho),
/// y = (lambda/2) sqrt(1-rho); spectral product over the compensated-bridge
/// eigenvalues 1/(4 pi^2 k^2), k = 1..pairs, each of multiplicity 2.
MgfValues mgf_watson(double lambda, double rho, int pairs = 2000);

/// prod_k [(1 - theta (1+rho) l_k)(1 + theta (1-rho) l_k)]^(-1/2),
/// theta = lambda^2, over the given eigenvalues (with multiplicity).
double mgf_spectral(const Vector& eigenvalues, double lambda, double rho);

}  // namespace invdecomp
