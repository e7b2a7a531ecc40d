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

#include "invdecomp/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace invdecomp {

const GroupAction& IndexSpace::bound_action() const {
  if (!action) throw Error(Errc::no_action, "index space has no bound group action");
  return *action;
}

namespace {

// Golub-Welsch: nodes and weights of the k-point rule on [-1, 1].
std::pair<Vector, Vector> gauss_legendre(int k) {
  Matrix J = Matrix::Zero(k, k);
  for (int i = 1; i < k; ++i) J(i, i - 1) = J(i - 1, i) = i / std::sqrt(4.0 * i * i - 1.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(J);
  Vector x = es.eigenvalues();
  Vector w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
  // enforce the reflection symmetry exactly
  for (int i = 0; i < k / 2; ++i) {
    const double xs = 0.5 * (x[k - 1 - i] - x[i]), ws = 0.5 * (w[i] + w[k - 1 - i]);
    x[i] = -xs;
    x[k - 1 - i] = xs;
    w[i] = w[k - 1 - i] = ws;
  }
  if (k % 2 == 1) x[k / 2] = 0.0;
  return {x, w};
}

}  // namespace

IndexSpace make_interval_grid(int n, QuadratureRule rule) {
  if (n < 1) throw Error(Errc::invalid_argument, "interval grid needs n >= 1");
  IndexSpace s;
  s.points.resize(n, 1);
  if (rule == QuadratureRule::midpoint) {
    for (int i = 0; i < n; ++i) s.points(i, 0) = (i + 0.5) / n;
    s.weights = Vector::Constant(n, 1.0 / n);
    return s;
  }
  if (n % 2 != 0) throw Error(Errc::invalid_argument, "gauss_split needs an even number of points");
  const int k = n / 2;
  const auto [x, w] = gauss_legendre(k);
  s.weights.resize(n);
  for (int i = 0; i < k; ++i) {
    const double left = 0.25 * (1.0 + x[i]);  // node on [0, 1/2]
    s.points(i, 0) = left;
    s.points(n - 1 - i, 0) = 1.0 - left;
    s.weights[i] = s.weights[n - 1 - i] = 0.25 * w[i];
  }
  return s;
}

QuadratureRule quadrature_rule(std::string_view name) {
  if (name == "midpoint") return QuadratureRule::midpoint;
  if (name == "gauss_split") return QuadratureRule::gauss_split;
  throw Error(Errc::invalid_argument, "unknown quadrature rule '" + std::string(name) + "'");
}

const char* to_string(QuadratureRule r) {
  return r == QuadratureRule::midpoint ? "midpoint" : "gauss_split";
}

GroupAction action_from_map(const IndexSpace& space, const FiniteGroup& group,
                            const std::function<Vector(int, const Vector&)>& map,
                            double match_tol) {
  const Index m = space.size();
  // lexicographic lookup of grid points
  std::vector<Index> order(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
  auto less_row = [&](Index a, Index b) {
    for (Index c = 0; c < space.dim(); ++c) {
      if (space.points(a, c) < space.points(b, c)) return true;
      if (space.points(a, c) > space.points(b, c)) return false;
    }
    return false;
  };
  std::sort(order.begin(), order.end(), less_row);

  std::vector<std::vector<int>> perms(static_cast<std::size_t>(group.order));
  for (int g = 0; g < group.order; ++g) {
    auto& p = perms[static_cast<std::size_t>(g)];
    p.resize(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i) {
      const Vector y = space.points.row(i).transpose();
      const Vector gy = map(g, y);
      // candidates share the first coordinate within tolerance
      auto lo = std::lower_bound(order.begin(), order.end(), gy[0] - match_tol,
                                 [&](Index a, double v) { return space.points(a, 0) < v; });
      Index found = -1;
      for (auto it = lo; it != order.end() && space.points(*it, 0) <= gy[0] + match_tol; ++it) {
        if ((space.points.row(*it).transpose() - gy).cwiseAbs().maxCoeff() <= match_tol) {
          found = *it;
          break;
        }
      }
      if (found < 0)
        throw Error(Errc::invalid_argument,
                    "image of point " + std::to_string(i) + " under element " +
                        std::to_string(g) + " is not a grid point; approximate actions are rejected");
      p[static_cast<std::size_t>(i)] = static_cast<int>(found);
    }
  }
  return make_action(group, perms);
}

GroupAction reversal_action(const IndexSpace& space) {
  if (space.dim() != 1) throw Error(Errc::dimension_mismatch, "reversal needs a 1-d space");
  return action_from_map(space, build_cyclic(2), [](int g, const Vector& y) -> Vector {
    if (g == 0) return y;
    return Vector::Constant(1, 1.0 - y[0]);
  });
}

IndexSpace with_action(IndexSpace space, GroupAction action, double tol) {
  if (action.space_size != space.size())
    throw Error(Errc::dimension_mismatch, "action space size != number of points");
  const ActionReport rep = check_action(action, space.weights, tol);
  if (!rep.passed) throw Error(Errc::not_invariant, rep.violations.front());
  space.action = std::move(action);
  return space;
}

IndexSpace with_reversal(IndexSpace space) {
  GroupAction a = reversal_action(space);
  return with_action(std::move(space), std::move(a));
}

IndexSpace make_product_grid(std::span<const IndexSpace> grids, bool require_action) {
  if (grids.empty()) throw Error(Errc::invalid_argument, "product of zero grids");
  bool all_actions = true;
  for (const auto& g : grids) all_actions = all_actions && g.action.has_value();
  if (require_action && !all_actions)
    throw Error(Errc::no_action, "product action requested but a factor has no action");

  IndexSpace acc = grids.front();
  for (std::size_t k = 1; k < grids.size(); ++k) {
    const IndexSpace& b = grids[k];
    IndexSpace out;
    const Index ma = acc.size(), mb = b.size();
    out.points.resize(ma * mb, acc.dim() + b.dim());
    out.weights.resize(ma * mb);
    for (Index i = 0; i < ma; ++i)
      for (Index j = 0; j < mb; ++j) {
        const Index r = i * mb + j;
        out.points.row(r) << acc.points.row(i), b.points.row(j);
        out.weights[r] = acc.weights[i] * b.weights[j];
      }
    if (all_actions) out.action = product_action(*acc.action, *b.action);
    acc = std::move(out);
  }
  if (all_actions) {
    GroupAction a = *acc.action;
    return with_action(std::move(acc), std::move(a));
  }
  return acc;
}

PsdReport check_psd(const Matrix& R, double rel_tol) {
  PsdReport rep;
  if (R.rows() != R.cols()) throw Error(Errc::dimension_mismatch, "kernel must be square");
  if (R.size() == 0) return rep;
  const double scale = std::max(1.0, R.cwiseAbs().maxCoeff());
  rep.asymmetry = (R - R.transpose()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Matrix> es(R, Eigen::EigenvaluesOnly);
  rep.min_eigenvalue = es.eigenvalues().minCoeff();
  rep.max_eigenvalue = es.eigenvalues().maxCoeff();
  rep.passed = rep.asymmetry <= 1e-12 * scale &&
               rep.min_eigenvalue >= -rel_tol * std::max(rep.max_eigenvalue, 0.0);
  return rep;
}

Kernel make_kernel(IndexSpace space, Matrix R, double rel_tol) {
  if (R.rows() != space.size() || R.cols() != space.size())
    throw Error(Errc::dimension_mismatch, "kernel matrix does not match the index space");
  const PsdReport rep = check_psd(R, rel_tol);
  if (!rep.passed)
    throw Error(Errc::not_psd, "min eigenvalue " + std::to_string(rep.min_eigenvalue) +
                                   ", max eigenvalue " + std::to_string(rep.max_eigenvalue) +
                                   ", asymmetry " + std::to_string(rep.asymmetry));
  return Kernel{std::move(space), std::move(R)};
}

double bridge_covariance(double s, double t) { return std::min(s, t) - s * t; }

double watson_covariance(double s, double t) {
  return std::min(s, t) - (s + t) / 2.0 + (s - t) * (s - t) / 2.0 + 1.0 / 12.0;
}

double watson_profile(double u) {
  const double frac = u - std::floor(u);
  return (frac - 0.5) * (frac - 0.5) / 2.0 - 1.0 / 24.0;
}

namespace {

Matrix evaluate(const IndexSpace& space, const std::function<double(const Vector&, const Vector&)>& f) {
  const Index m = space.size();
  Matrix R(m, m);
  for (Index i = 0; i < m; ++i) {
    const Vector yi = space.points.row(i).transpose();
    for (Index j = i; j < m; ++j) {
      R(i, j) = f(yi, space.points.row(j).transpose());
      R(j, i) = R(i, j);
    }
  }
  return R;
}

}  // namespace

Kernel builtin_kernel(std::string_view name, const IndexSpace& space) {
  auto need_dim = [&](Index d) {
    if (space.dim() != d)
      throw Error(Errc::dimension_mismatch, std::string(name) + " needs a " + std::to_string(d) +
                                                "-d index space");
  };
  Matrix R;
  if (name == "bridge") {
    need_dim(1);
    R = evaluate(space, [](const Vector& a, const Vector& b) { return bridge_covariance(a[0], b[0]); });
  } else if (name == "watson") {
    need_dim(1);
    R = evaluate(space, [](const Vector& a, const Vector& b) { return watson_covariance(a[0], b[0]); });
  } else if (name == "torus_watson") {
    need_dim(1);
    R = evaluate(space, [](const Vector& a, const Vector& b) { return watson_profile(b[0] - a[0]); });
  } else if (name == "sheet_tied") {
    need_dim(2);
    R = evaluate(space, [](const Vector& a, const Vector& b) {
      return bridge_covariance(a[0], b[0]) * bridge_covariance(a[1], b[1]);
    });
  } else if (name == "sheet_compensated") {
    need_dim(2);
    R = evaluate(space, [](const Vector& a, const Vector& b) {
      return watson_covariance(a[0], b[0]) * watson_covariance(a[1], b[1]);
    });
  } else {
    throw Error(Errc::invalid_argument, "unknown kernel '" + std::string(name) + "'");
  }
  return make_kernel(space, std::move(R));
}

InvarianceReport check_invariance(const Kernel& k, double tol) {
  const GroupAction& a = k.space.bound_action();
  InvarianceReport rep;
  rep.tolerance = tol;
  const Index m = k.size();
  for (int g = 0; g < a.group.order; ++g) {
    if (g == a.group.identity) continue;
    for (Index j = 0; j < m; ++j) {
      const int gj = a.image(g, static_cast<int>(j));
      for (Index i = 0; i < m; ++i) {
        const double d = std::abs(k.R(a.image(g, static_cast<int>(i)), gj) - k.R(i, j));
        rep.max_deviation = std::max(rep.max_deviation, d);
      }
    }
  }
  rep.passed = rep.max_deviation <= tol;
  return rep;
}

Matrix project_kernel(const Kernel& k, const Irrep& pi, const Irrep& sigma) {
  const GroupAction& a = k.space.bound_action();
  if (!pi.real_valued || !sigma.real_valued)
    throw Error(Errc::complex_characters, "kernel projection needs real characters");
  const Matrix rows = project_columns(k.R, a, pi);
  Matrix rt = rows.transpose();
  return project_columns(rt, a, sigma).transpose();
}

Kernel project_kernel(const Kernel& k, const Irrep& pi) {
  Matrix R = project_kernel(k, pi, pi);
  // the two one-sided projections commute only up to roundoff
  R = (0.5 * (R + R.transpose())).eval();
  return make_kernel(k.space, std::move(R));
}

Matrix contract_power(const Matrix& k, const Vector& weights, int n) {
  if (n < 1) throw Error(Errc::invalid_argument, "contraction order must be >= 1");
  if (k.rows() != weights.size() || k.cols() != weights.size())
    throw Error(Errc::dimension_mismatch, "contract_power: shape mismatch");
  Matrix acc = k;
  for (int p = 2; p <= n; ++p) acc = contract(acc, k, weights);
  return acc;
}

double contraction_trace(const Matrix& k, const Vector& weights, int n) {
  if (n < 1) throw Error(Errc::invalid_argument, "contraction order must be >= 1");
  if (k.rows() != weights.size() || k.cols() != weights.size())
    throw Error(Errc::dimension_mismatch, "contraction_trace: shape mismatch");
  const Vector root = weights.cwiseSqrt();
  const Matrix B = root.asDiagonal() * k * root.asDiagonal();
  if (n == 1) return B.trace();
  const int lo = n / 2, hi = n - lo;
  Matrix P = B;
  Matrix Q;
  for (int p = 2; p <= hi; ++p) {
    Matrix next(B.rows(), B.cols());
    next.noalias() = P * B;
    if (p == lo) Q = next;
    P = std::move(next);
  }
  if (lo == 1) Q = B;
  else if (lo == hi) Q = P;
  // tr(P Q) for symmetric Q
  return P.cwiseProduct(Q).sum();
}

std::vector<double> contraction_traces(const Matrix& k, const Vector& weights, int n_max) {
  if (n_max < 1) throw Error(Errc::invalid_argument, "contraction order must be >= 1");
  if (k.rows() != weights.size() || k.cols() != weights.size())
    throw Error(Errc::dimension_mismatch, "contraction_traces: shape mismatch");
  const Vector root = weights.cwiseSqrt();
  std::vector<Matrix> powers;  // powers[p] = B^(p+1)
  powers.push_back(root.asDiagonal() * k * root.asDiagonal());
  const int top = (n_max + 1) / 2;
  for (int p = 1; p < top; ++p) {
    Matrix next(k.rows(), k.cols());
    next.noalias() = powers.back() * powers.front();
    powers.push_back(std::move(next));
  }
  std::vector<double> out(static_cast<std::size_t>(n_max));
  out[0] = powers[0].trace();
  for (int n = 2; n <= n_max; ++n) {
    const int lo = n / 2, hi = n - lo;
    out[static_cast<std::size_t>(n - 1)] =
        powers[static_cast<std::size_t>(hi - 1)].cwiseProduct(powers[static_cast<std::size_t>(lo - 1)]).sum();
  }
  return out;
}

FeatureMap project_feature_map(const FeatureMap& fm, const Irrep& pi) {
  const GroupAction& a = fm.space.bound_action();
  FeatureMap out = fm;
  out.phi = project_columns(fm.phi, a, pi);
  return out;
}

}  // namespace invdecomp
