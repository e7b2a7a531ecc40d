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

#include "invdecomp/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <random>
#include <thread>

namespace invdecomp {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("INVDECOMP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 1024L));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

// Runs fn(begin, cols) over fixed chunks of [0, count). Chunks are claimed
// dynamically but each writes only its own columns.
void for_chunks(Index count, int threads, const std::function<void(Index, Index)>& fn) {
  const Index nchunks = (count + kSampleChunk - 1) / kSampleChunk;
  const int workers = static_cast<int>(std::min<Index>(resolve_threads(threads), std::max<Index>(nchunks, 1)));
  std::atomic<Index> next{0};
  auto work = [&] {
    for (Index c = next++; c < nchunks; c = next++) {
      const Index b = c * kSampleChunk;
      fn(b, std::min(kSampleChunk, count - b));
    }
  };
  if (workers <= 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        work();
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
        next = nchunks;
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

Matrix normals(Index rows, std::uint64_t seed, std::uint64_t stream, Index first, Index cols) {
  Matrix xi(rows, cols);
  for (Index j = 0; j < cols; ++j)
    fill_normals(seed, stream, static_cast<std::uint64_t>(first + j), xi.col(j));
  return xi;
}

void weighted_products(const Matrix& z1, const Matrix& z2, const Vector& mu, Eigen::Ref<Vector> out) {
  for (Index j = 0; j < z1.cols(); ++j) out[j] = z1.col(j).cwiseProduct(z2.col(j)).dot(mu);
}

void check_rho(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0))
    throw Error(Errc::invalid_argument, "rho must lie in [0, 1], got " + std::to_string(rho));
}

// Z1 and Z2 for columns [b, b + c) of a correlated pair.
void pair_chunk(const GaussianFactor& f, double rho, std::uint64_t seed, std::uint64_t stream,
                Index b, Index c, Matrix& z1, Matrix& z2) {
  z1.resize(f.size(), c);
  z1.noalias() = f.L * normals(f.rank(), seed, 2 * stream, b, c);
  if (rho == 1.0) {
    z2 = z1;
    return;
  }
  z2.resize(f.size(), c);
  z2.noalias() = f.L * normals(f.rank(), seed, 2 * stream + 1, b, c);
  z2 = rho * z1 + std::sqrt(1.0 - rho * rho) * z2;
}

}  // namespace

void fill_normals(std::uint64_t seed, std::uint64_t stream, std::uint64_t index, Eigen::Ref<Vector> out) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(stream), hi(stream), lo(index), hi(index)};
  std::mt19937_64 eng(seq);
  std::normal_distribution<double> dist;
  for (Index i = 0; i < out.size(); ++i) out[i] = dist(eng);
}

GaussianFactor factorize(const Kernel& k, double clip) {
  const PsdReport psd = check_psd(k.R);
  if (!psd.passed)
    throw Error(Errc::not_psd, "cannot factor a kernel with min eigenvalue " +
                                   std::to_string(psd.min_eigenvalue));
  GaussianFactor f;
  const Index m = k.size();
  if (m == 0 || k.R.cwiseAbs().maxCoeff() == 0.0) {
    f.L = Matrix::Zero(m, 0);
    return f;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(k.R);
  const Vector& ev = es.eigenvalues();  // ascending
  const double cut = clip * ev[m - 1];
  Index first = 0;
  while (first < m && ev[first] <= cut) ++first;
  const Index r = m - first;
  f.L = es.eigenvectors().rightCols(r) * ev.tail(r).cwiseSqrt().asDiagonal();
  return f;
}

PathEnsemble sample(const Kernel& k, Index count, std::uint64_t seed, SampleOptions opt) {
  if (count < 1) throw Error(Errc::invalid_argument, "sample count must be >= 1");
  const GaussianFactor f = factorize(k);
  PathEnsemble e{k.space, Matrix(k.size(), count), seed, f.rank()};
  for_chunks(count, opt.threads, [&](Index b, Index c) {
    if (f.rank() == 0) {
      e.samples.middleCols(b, c).setZero();
      return;
    }
    e.samples.middleCols(b, c).noalias() = f.L * normals(f.rank(), seed, opt.stream, b, c);
  });
  return e;
}

CorrelatedPair sample_pair(const Kernel& k, double rho, Index count, std::uint64_t seed,
                           SampleOptions opt) {
  check_rho(rho);
  if (count < 1) throw Error(Errc::invalid_argument, "sample count must be >= 1");
  const GaussianFactor f = factorize(k);
  CorrelatedPair p{{k.space, Matrix(k.size(), count), seed, f.rank()},
                   {k.space, Matrix(k.size(), count), seed, f.rank()},
                   rho};
  for_chunks(count, opt.threads, [&](Index b, Index c) {
    Matrix z1, z2;
    pair_chunk(f, rho, seed, opt.stream, b, c, z1, z2);
    p.first.samples.middleCols(b, c) = z1;
    p.second.samples.middleCols(b, c) = z2;
  });
  return p;
}

Vector quadratic_functional(const CorrelatedPair& p) {
  const Vector& mu = p.first.space.weights;
  Vector out(p.first.count());
  for (Index b = 0; b < out.size(); b += kSampleChunk) {
    const Index c = std::min(kSampleChunk, out.size() - b);
    weighted_products(p.first.samples.middleCols(b, c), p.second.samples.middleCols(b, c), mu,
                      out.segment(b, c));
  }
  return out;
}

Vector pair_functional(const GaussianFactor& f, const Vector& weights, double rho, Index count,
                       std::uint64_t seed, SampleOptions opt) {
  check_rho(rho);
  if (count < 1) throw Error(Errc::invalid_argument, "sample count must be >= 1");
  if (weights.size() != f.size()) throw Error(Errc::dimension_mismatch, "weights do not match factor");
  Vector out(count);
  for_chunks(count, opt.threads, [&](Index b, Index c) {
    if (f.rank() == 0) {
      out.segment(b, c).setZero();
      return;
    }
    Matrix z1, z2;
    pair_chunk(f, rho, seed, opt.stream, b, c, z1, z2);
    weighted_products(z1, z2, weights, out.segment(b, c));
  });
  return out;
}

Vector pair_functional(const Kernel& k, double rho, Index count, std::uint64_t seed,
                       SampleOptions opt) {
  return pair_functional(factorize(k), k.weights(), rho, count, seed, opt);
}

std::vector<Component> decompose_ensemble(const PathEnsemble& e, const CharacterTable& table) {
  const GroupAction& a = e.space.bound_action();
  std::vector<Component> out;
  for (const Irrep& pi : table.irreps) {
    PathEnsemble c = e;
    c.samples = project_columns(e.samples, a, pi);
    out.push_back({pi.label, std::move(c)});
  }
  return out;
}

Matrix empirical_cross_covariance(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols() || a.cols() == 0)
    throw Error(Errc::dimension_mismatch, "ensembles must have the same positive sample count");
  Matrix c(a.rows(), b.rows());
  c.noalias() = a * b.transpose();
  return c / static_cast<double>(a.cols());
}

std::array<double, 4> k_statistics(const Vector& x) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 4) throw Error(Errc::undersized_sample, "k-statistics need at least 4 draws");
  double mean = 0.0;
  for (Index i = 0; i < x.size(); ++i) mean += x[i];
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const double d = x[i] - mean, d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  return {mean, n * m2 / (n - 1.0), n * n * m3 / ((n - 1.0) * (n - 2.0)),
          n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2) / ((n - 1.0) * (n - 2.0) * (n - 3.0))};
}

double ks_statistic(const Vector& a, const Vector& b) {
  std::vector<double> x(a.data(), a.data() + a.size()), y(b.data(), b.data() + b.size());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

DistributionComparison compare_distributions(const Vector& a, const Vector& b) {
  constexpr Index kMin = 1000;
  if (a.size() < kMin || b.size() < kMin)
    throw Error(Errc::undersized_sample, "distribution comparison needs at least 1000 draws per side, got " +
                                             std::to_string(a.size()) + " and " + std::to_string(b.size()));
  DistributionComparison c;
  c.ks_distance = ks_statistic(a, b);
  c.kstats_a = k_statistics(a);
  c.kstats_b = k_statistics(b);
  for (int i = 0; i < 4; ++i) c.cumulant_gaps[static_cast<std::size_t>(i)] = c.kstats_a[static_cast<std::size_t>(i)] - c.kstats_b[static_cast<std::size_t>(i)];
  return c;
}

std::array<double, 4> k_statistic_variances(const CumulantVector& kappa, Index S) {
  if (kappa.n_max() < 8) throw Error(Errc::invalid_argument, "k-statistic variances need kappa_1..8");
  const double n = static_cast<double>(S);
  const double k2 = kappa[2], k3 = kappa[3], k4 = kappa[4], k5 = kappa[5], k6 = kappa[6], k8 = kappa[8];
  const double n1 = n - 1.0, n2 = n - 2.0, n3 = n - 3.0;
  return {k2 / n,
          k4 / n + 2.0 * k2 * k2 / n1,
          k6 / n + 9.0 * k2 * k4 / n1 + 9.0 * k3 * k3 / n1 + 6.0 * n * k2 * k2 * k2 / (n1 * n2),
          k8 / n + 16.0 * k2 * k6 / n1 + 48.0 * k3 * k5 / n1 + 34.0 * k4 * k4 / n1 +
              72.0 * n * k2 * k2 * k4 / (n1 * n2) + 144.0 * n * k2 * k3 * k3 / (n1 * n2) +
              24.0 * n * (n + 1.0) * k2 * k2 * k2 * k2 / (n1 * n2 * n3)};
}

bool IdentityCheckReport::passed() const {
  if (!ks_passed) return false;
  for (int i = 0; i < orders_checked; ++i)
    if (!gap_passed[static_cast<std::size_t>(i)]) return false;
  return !mean_checked || mean_passed;
}

namespace {

void fill_verdicts(IdentityCheckReport& r, const Vector& lhs, const Vector& rhs) {
  r.comparison = compare_distributions(lhs, rhs);
  r.lhs_samples = lhs;
  r.rhs_samples = rhs;
  r.ks_passed = r.comparison.ks_distance < r.ks_threshold;
  const auto vl = k_statistic_variances(r.lhs_analytic, r.samples);
  const auto vr = k_statistic_variances(r.rhs_analytic, r.samples);
  for (std::size_t i = 0; i < 4; ++i) {
    const int n = static_cast<int>(i) + 1;
    r.gap_tolerance[i] = 4.0 * std::sqrt(vl[i] + vr[i]) + std::abs(r.lhs_analytic[n] - r.rhs_analytic[n]);
    r.gap_passed[i] = std::abs(r.comparison.cumulant_gaps[i]) <= r.gap_tolerance[i];
  }
}

}  // namespace

IdentityCheckReport duplication_check(const DuplicationConfig& cfg) {
  check_rho(cfg.rho);
  if (cfg.grid < 2 || cfg.samples < 1000)
    throw Error(Errc::config_error, "duplication check needs grid >= 2 and samples >= 1000");
  const IndexSpace space = make_interval_grid(cfg.grid);
  const Kernel watson = builtin_kernel("watson", space);
  const Kernel bridge = builtin_kernel("bridge", space);

  IdentityCheckReport r;
  r.name = "duplication";
  r.rho = cfg.rho;
  r.samples = cfg.samples;
  r.seed = cfg.seed;
  r.grid = {cfg.grid};
  r.ks_threshold = cfg.ks_threshold;
  r.mean_rel_tol = cfg.mean_rel_tol;

  const Vector lhs = pair_functional(watson, cfg.rho, cfg.samples, cfg.seed, {0, cfg.threads});
  const GaussianFactor fb = factorize(bridge);
  const Vector rhs = 0.25 * (pair_functional(fb, space.weights, cfg.rho, cfg.samples, cfg.seed, {1, cfg.threads}) +
                             pair_functional(fb, space.weights, cfg.rho, cfg.samples, cfg.seed, {2, cfg.threads}));
  r.lhs_analytic = analytic_cumulants(watson, cfg.rho, 8);
  r.rhs_analytic = scale_cumulants(analytic_cumulants(bridge, cfg.rho, 8), 0.25, 2);
  fill_verdicts(r, lhs, rhs);

  r.mean_target = cfg.rho / 12.0;
  r.mean_checked = cfg.rho > 0.0;
  if (r.mean_checked) {
    r.mean_rel_error = {std::abs(r.comparison.kstats_a[0] - r.mean_target) / r.mean_target,
                        std::abs(r.comparison.kstats_b[0] - r.mean_target) / r.mean_target};
    r.mean_passed = r.mean_rel_error[0] <= r.mean_rel_tol && r.mean_rel_error[1] <= r.mean_rel_tol;
  }
  return r;
}

IdentityCheckReport quadruplication_check(const QuadruplicationConfig& cfg) {
  check_rho(cfg.rho);
  if (cfg.grid < 2 || cfg.samples < 1000 || cfg.orders < 1 || cfg.orders > 4)
    throw Error(Errc::config_error, "quadruplication check needs grid >= 2, samples >= 1000, orders in 1..4");
  const IndexSpace line = make_interval_grid(cfg.grid);
  const std::array<IndexSpace, 2> factors{line, line};
  const IndexSpace sheet = make_product_grid(factors);
  const Kernel comp = builtin_kernel("sheet_compensated", sheet);
  const Kernel tied = builtin_kernel("sheet_tied", sheet);

  IdentityCheckReport r;
  r.name = "quadruplication";
  r.rho = cfg.rho;
  r.samples = cfg.samples;
  r.seed = cfg.seed;
  r.grid = {cfg.grid, cfg.grid};
  r.ks_threshold = cfg.ks_threshold;
  r.orders_checked = cfg.orders;

  const Vector lhs = pair_functional(comp, cfg.rho, cfg.samples, cfg.seed, {0, cfg.threads});
  const GaussianFactor ft = factorize(tied);
  Vector rhs = Vector::Zero(cfg.samples);
  for (std::uint64_t copy = 1; copy <= 4; ++copy)
    rhs += pair_functional(ft, sheet.weights, cfg.rho, cfg.samples, cfg.seed, {copy, cfg.threads});
  rhs /= 16.0;
  r.lhs_analytic = analytic_cumulants(comp, cfg.rho, 8);
  r.rhs_analytic = scale_cumulants(analytic_cumulants(tied, cfg.rho, 8), 1.0 / 16.0, 4);
  fill_verdicts(r, lhs, rhs);
  return r;
}

bool CumulantMcReport::passed() const {
  for (std::size_t i = 0; i < 3; ++i)
    if (!(error[i] <= tolerance[i])) return false;
  return true;
}

CumulantMcReport cumulant_mc_check(const Kernel& k, double rho, Index S, std::uint64_t seed,
                                   SampleOptions opt) {
  CumulantMcReport r;
  r.rho = rho;
  r.samples = S;
  r.seed = seed;
  const CumulantVector kappa = analytic_cumulants(k, rho, 3);
  const auto ks = k_statistics(pair_functional(k, rho, S, seed, opt));
  const double scale = std::sqrt(std::max(kappa[2], 0.0));
  for (std::size_t i = 0; i < 3; ++i) {
    const int n = static_cast<int>(i) + 1;
    r.analytic[i] = kappa[n];
    r.empirical[i] = ks[i];
    // K(n, rho) = 0 makes kappa_n vanish exactly; compare on the standardized scale
    r.standardized[i] = k_coeff(n, rho) == 0.0 || kappa[n] == 0.0;
    if (r.standardized[i])
      r.error[i] = scale > 0.0 ? std::abs(ks[i]) / std::pow(scale, n) : std::abs(ks[i]);
    else
      r.error[i] = std::abs(ks[i] - kappa[n]) / std::abs(kappa[n]);
  }
  return r;
}

double mgf_monte_carlo(const Kernel& k, double lambda, double rho, Index S, std::uint64_t seed,
                       SampleOptions opt) {
  const Vector j = pair_functional(k, rho, S, seed, opt);
  double s = 0.0;
  for (Index i = 0; i < j.size(); ++i) s += std::exp(lambda * lambda * j[i]);
  return s / static_cast<double>(j.size());
}

}  // namespace invdecomp
