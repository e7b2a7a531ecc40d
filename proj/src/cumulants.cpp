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

#include "invdecomp/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace invdecomp {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void require_rho(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0))
    throw Error(Errc::invalid_argument, "rho must lie in [0, 1], got " + std::to_string(rho));
}

}  // namespace

double k_coeff(int n, double rho) {
  if (n < 1) throw Error(Errc::invalid_argument, "K(n, rho) needs n >= 1");
  if (n == 1) return 2.0 * rho;
  double s = 0.0;
  if (n % 2 == 0) {
    for (int j = 0; j <= n / 2 - 1; ++j) {
      s += binomial(n - 1, 2 * j) * std::pow(rho, 2 * j);
      s += binomial(n - 1, 2 * j + 1) * std::pow(rho, 2 * j + 2);
    }
  } else {
    for (int j = 0; j <= (n - 1) / 2; ++j) s += binomial(n - 1, 2 * j) * std::pow(rho, 2 * j + 1);
    for (int j = 0; j <= (n - 3) / 2; ++j) s += binomial(n - 1, 2 * j + 1) * std::pow(rho, 2 * j + 1);
  }
  return 2.0 * s;
}

double cumulant_coefficient(int n) {
  if (n < 1) throw Error(Errc::invalid_argument, "c_n needs n >= 1");
  double c = std::ldexp(1.0, n - 1);
  for (int i = 2; i < n; ++i) c *= i;
  return c;
}

CumulantVector cumulants_from_traces(const std::vector<double>& traces, double rho) {
  require_rho(rho);
  CumulantVector out;
  out.rho = rho;
  out.values.resize(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    out.values[i] = n == 1 ? rho * traces[0]
                           : cumulant_coefficient(n) * k_coeff(n, rho) * std::ldexp(traces[i], -n);
  }
  return out;
}

CumulantVector analytic_cumulants(const Kernel& k, double rho, int n_max) {
  return cumulants_from_traces(contraction_traces(k, n_max), rho);
}

CumulantVector scale_cumulants(const CumulantVector& c, double scale, int copies) {
  CumulantVector out = c;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] *= copies * std::pow(scale, static_cast<double>(i + 1));
  return out;
}

double relative_gap(double a, double b) {
  const double m = std::max(std::abs(a), std::abs(b));
  return m == 0.0 ? 0.0 : std::abs(a - b) / m;
}

WatsonCheckReport watson_relation_check(const Kernel& k, const CharacterTable& table, double rho,
                                        int n_max, double tol) {
  require_rho(rho);
  if (n_max < 1) throw Error(Errc::invalid_argument, "n_max must be >= 1");
  if (!table.all_real())
    throw Error(Errc::complex_characters, "the Watson relation check needs real characters");
  const InvarianceReport inv = check_invariance(k);
  if (!inv.passed)
    throw Error(Errc::not_invariant,
                "kernel is not invariant, max deviation " + std::to_string(inv.max_deviation));

  WatsonCheckReport rep;
  rep.rho = rho;
  rep.n_max = n_max;
  rep.tolerance = tol;
  rep.invariance_deviation = inv.max_deviation;
  rep.full_traces = contraction_traces(k, n_max);
  for (int n = 1; n <= n_max; ++n) rep.vacuous.push_back(k_coeff(n, rho) == 0.0);

  const double nirr = static_cast<double>(table.size());
  for (const Irrep& pi : table.irreps) {
    IrrepTraces it;
    it.label = pi.label;
    const Matrix R = project_kernel(k, pi, pi);
    it.traces = contraction_traces(R, k.weights(), n_max);
    it.cumulants = cumulants_from_traces(it.traces, rho).values;
    rep.per_irrep.push_back(std::move(it));
  }
  for (auto& it : rep.per_irrep) {
    it.cII_dev.assign(static_cast<std::size_t>(n_max), 0.0);
    it.cIII_dev.assign(static_cast<std::size_t>(n_max), 0.0);
    for (int n = 1; n <= n_max; ++n) {
      const auto i = static_cast<std::size_t>(n - 1);
      if (rep.vacuous[i]) continue;
      // K(n, rho) != 0 cancels from both sides
      it.cII_dev[i] = relative_gap(it.traces[i], rep.full_traces[i] / nirr);
      for (const auto& other : rep.per_irrep)
        it.cIII_dev[i] = std::max(it.cIII_dev[i], relative_gap(it.traces[i], other.traces[i]));
      rep.max_cII_dev = std::max(rep.max_cII_dev, it.cII_dev[i]);
      rep.max_cIII_dev = std::max(rep.max_cIII_dev, it.cIII_dev[i]);
    }
  }
  rep.cII_passed = rep.max_cII_dev <= tol;
  rep.cIII_passed = rep.max_cIII_dev <= tol;
  return rep;
}

Z2ConditionReport z2_condition_check(const Kernel& k, int n_max, double tol) {
  const GroupAction& a = k.space.bound_action();
  if (a.group.order != 2)
    throw Error(Errc::wrong_group, "the twisted-trace condition needs a Z/2Z action, got order " +
                                       std::to_string(a.group.order));
  if (n_max < 1) throw Error(Errc::invalid_argument, "n_max must be >= 1");
  const int g = a.group.identity == 0 ? 1 : 0;
  Z2ConditionReport rep;
  rep.tolerance = tol;
  Matrix M = k.R;
  const Vector& mu = k.weights();
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1) M = contract(M, k.R, mu);
    double s = 0.0;
    for (Index i = 0; i < k.size(); ++i) s += M(i, a.image(g, static_cast<int>(i))) * mu[i];
    rep.values.push_back(s);
    rep.max_abs = std::max(rep.max_abs, std::abs(s));
  }
  rep.passed = rep.max_abs <= tol;
  return rep;
}

double mgf_watson_radius(double rho) { return 2.0 * std::numbers::pi / std::sqrt(1.0 + rho); }

namespace {

double x_over_sin(double x) { return x == 0.0 ? 1.0 : x / std::sin(x); }
double x_over_sinh(double x) { return x == 0.0 ? 1.0 : x / std::sinh(x); }

}  // namespace

double mgf_spectral(const Vector& eigenvalues, double lambda, double rho) {
  require_rho(rho);
  const double theta = lambda * lambda;
  double log_m = 0.0;
  for (Index k = 0; k < eigenvalues.size(); ++k) {
    const double a = 1.0 - theta * (1.0 + rho) * eigenvalues[k];
    const double b = 1.0 + theta * (1.0 - rho) * eigenvalues[k];
    if (a <= 0.0) throw Error(Errc::invalid_argument, "lambda beyond the moment generating radius");
    log_m -= 0.5 * (std::log(a) + std::log(b));
  }
  return std::exp(log_m);
}

MgfValues mgf_watson(double lambda, double rho, int pairs) {
  require_rho(rho);
  if (lambda < 0.0) throw Error(Errc::invalid_argument, "lambda must be >= 0");
  if (lambda >= mgf_watson_radius(rho))
    throw Error(Errc::invalid_argument, "lambda = " + std::to_string(lambda) +
                                            " is at or beyond the singularity 2 pi / sqrt(1 + rho) = " +
                                            std::to_string(mgf_watson_radius(rho)));
  if (pairs < 1) throw Error(Errc::invalid_argument, "pairs must be >= 1");
  MgfValues out;
  const double x = 0.5 * lambda * std::sqrt(1.0 + rho);
  const double y = 0.5 * lambda * std::sqrt(1.0 - rho);
  out.closed_form = x_over_sin(x) * x_over_sinh(y);
  Vector eig(2 * pairs);
  const double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
  for (int k = 1; k <= pairs; ++k) eig[2 * (k - 1)] = eig[2 * (k - 1) + 1] = 1.0 / (four_pi2 * k * k);
  out.spectral = mgf_spectral(eig, lambda, rho);
  out.relative_error = relative_gap(out.closed_form, out.spectral);
  return out;
}

}  // namespace invdecomp
