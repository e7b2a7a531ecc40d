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

#include "invdecomp/io.hpp"

#include <bit>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace invdecomp {

namespace {

json vec(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json mat_rows(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) rows.push_back(vec(m.row(i).transpose()));
  return rows;
}

template <typename T, std::size_t N>
json arr(const std::array<T, N>& a) {
  return json(std::vector<T>(a.begin(), a.end()));
}

std::ofstream open_out(const std::filesystem::path& p, bool binary = false) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p, binary ? std::ios::binary : std::ios::out);
  if (!os) throw Error(Errc::io_error, "cannot write " + p.string());
  return os;
}

json read_json(const std::filesystem::path& p) {
  std::ifstream is(p);
  if (!is) throw Error(Errc::io_error, "cannot read " + p.string());
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw Error(Errc::io_error, p.string() + ": " + e.what());
  }
}

void write_binary(const std::filesystem::path& p, const Matrix& m) {
  static_assert(std::endian::native == std::endian::little, "binary format is little endian");
  auto os = open_out(p, true);
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  os.write(reinterpret_cast<const char*>(rm.data()), static_cast<std::streamsize>(rm.size() * sizeof(double)));
}

Matrix read_binary(const std::filesystem::path& p, Index rows, Index cols) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw Error(Errc::io_error, "cannot read " + p.string());
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
  is.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(rm.size() * sizeof(double)));
  if (is.gcount() != static_cast<std::streamsize>(rm.size() * sizeof(double)))
    throw Error(Errc::io_error, p.string() + " is shorter than its header says");
  return rm;
}

}  // namespace

json to_json(const FiniteGroup& g) {
  return json{{"order", g.order}, {"mul", g.mul}, {"inv", g.inv}, {"identity", g.identity}};
}

json to_json(const CharacterTable& t) {
  json irreps = json::array();
  for (const Irrep& pi : t.irreps) {
    std::vector<double> re, im;
    for (Index g = 0; g < pi.chi.size(); ++g) {
      re.push_back(pi.chi[g].real());
      im.push_back(pi.chi[g].imag());
    }
    irreps.push_back({{"label", pi.label}, {"dim", pi.dim}, {"re", re}, {"im", im}, {"real_valued", pi.real_valued}});
  }
  return irreps;
}

json to_json(const GroupAction& a) { return json{{"space_size", a.space_size}, {"perm", a.perm}}; }

json to_json(const GroupWithTable& gt, const GroupAction* action) {
  json j = to_json(gt.group);
  j["irreps"] = to_json(gt.table);
  if (action) {
    j["space_size"] = action->space_size;
    j["perm"] = action->perm;
  }
  return j;
}

FiniteGroup group_from_json(const json& j) {
  try {
    FiniteGroup g;
    g.order = j.at("order").get<int>();
    g.mul = j.at("mul").get<std::vector<int>>();
    g.inv = j.at("inv").get<std::vector<int>>();
    g.identity = j.at("identity").get<int>();
    validate_group(g);
    return g;
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_argument, std::string("group JSON: ") + e.what());
  }
}

CharacterTable table_from_json(const FiniteGroup& g, const json& j) {
  try {
    std::vector<Irrep> irreps;
    for (const auto& r : j) {
      Irrep pi;
      pi.label = r.at("label").get<std::string>();
      pi.dim = r.at("dim").get<int>();
      const auto re = r.at("re").get<std::vector<double>>();
      const auto im = r.contains("im") ? r.at("im").get<std::vector<double>>() : std::vector<double>(re.size(), 0.0);
      if (re.size() != im.size()) throw Error(Errc::table_invalid, "re/im lengths differ for " + pi.label);
      pi.chi.resize(static_cast<Index>(re.size()));
      for (std::size_t q = 0; q < re.size(); ++q) pi.chi[static_cast<Index>(q)] = Complex(re[q], im[q]);
      irreps.push_back(std::move(pi));
    }
    return character_table(g, table_kind::UserSupplied{std::move(irreps)});
  } catch (const json::exception& e) {
    throw Error(Errc::table_invalid, std::string("table JSON: ") + e.what());
  }
}

GroupAction action_from_json(const FiniteGroup& g, const json& j) {
  try {
    const int m = j.at("space_size").get<int>();
    const auto flat = j.at("perm").get<std::vector<int>>();
    if (flat.size() != static_cast<std::size_t>(g.order) * static_cast<std::size_t>(m))
      throw Error(Errc::dimension_mismatch, "perm table must have |G| * space_size entries");
    std::vector<std::vector<int>> perms(static_cast<std::size_t>(g.order));
    for (int e = 0; e < g.order; ++e)
      perms[static_cast<std::size_t>(e)].assign(flat.begin() + static_cast<long>(e) * m,
                                                flat.begin() + static_cast<long>(e + 1) * m);
    return make_action(g, perms);
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_argument, std::string("action JSON: ") + e.what());
  }
}

json to_json(const CumulantVector& c) { return json{{"rho", c.rho}, {"values", c.values}}; }

json to_json(const WatsonCheckReport& r) {
  json per = json::array();
  for (const auto& it : r.per_irrep)
    per.push_back({{"label", it.label},
                   {"traces", it.traces},
                   {"cumulants", it.cumulants},
                   {"cII_dev", it.cII_dev},
                   {"cIII_dev", it.cIII_dev}});
  std::vector<int> vac;
  for (bool b : r.vacuous) vac.push_back(b ? 1 : 0);
  return json{{"rho", r.rho},
              {"n_max", r.n_max},
              {"full_traces", r.full_traces},
              {"vacuous_orders", vac},
              {"invariance_deviation", r.invariance_deviation},
              {"per_irrep", per},
              {"verdicts", {{"cII", r.cII_passed}, {"cIII", r.cIII_passed}}},
              {"max_dev", {{"cII", r.max_cII_dev}, {"cIII", r.max_cIII_dev}}},
              {"tolerances", {{"cII", r.tolerance}, {"cIII", r.tolerance}, {"kind", "relative"}}}};
}

json to_json(const Z2ConditionReport& r) {
  return json{{"values", r.values}, {"max_abs", r.max_abs}, {"tolerance", r.tolerance}, {"passed", r.passed}};
}

json to_json(const MgfValues& m) {
  return json{{"closed_form", m.closed_form}, {"spectral", m.spectral}, {"relative_error", m.relative_error}};
}

json to_json(const DistributionComparison& c) {
  return json{{"ks_distance", c.ks_distance},
              {"kstats_lhs", arr(c.kstats_a)},
              {"kstats_rhs", arr(c.kstats_b)},
              {"cumulant_gaps", arr(c.cumulant_gaps)}};
}

json to_json(const IdentityCheckReport& r) {
  json j{{"name", r.name},
         {"rho", r.rho},
         {"samples", r.samples},
         {"seed", r.seed},
         {"grid", r.grid},
         {"comparison", to_json(r.comparison)},
         {"lhs_analytic", r.lhs_analytic.values},
         {"rhs_analytic", r.rhs_analytic.values},
         {"orders_checked", r.orders_checked},
         {"gap_tolerance", arr(r.gap_tolerance)},
         {"gap_passed", arr(r.gap_passed)},
         {"ks_threshold", r.ks_threshold},
         {"ks_passed", r.ks_passed}};
  if (r.mean_checked)
    j["mean"] = {{"target", r.mean_target},
                 {"relative_error", arr(r.mean_rel_error)},
                 {"tolerance", r.mean_rel_tol},
                 {"passed", r.mean_passed}};
  j["passed"] = r.passed();
  return j;
}

json to_json(const CumulantMcReport& r) {
  return json{{"rho", r.rho},
              {"samples", r.samples},
              {"seed", r.seed},
              {"analytic", arr(r.analytic)},
              {"empirical", arr(r.empirical)},
              {"error", arr(r.error)},
              {"standardized", arr(r.standardized)},
              {"tolerance", arr(r.tolerance)},
              {"passed", r.passed()}};
}

json to_json(const EigenspaceReport& r) {
  json worst = json::array();
  std::vector<ClusterResidual> sorted = r.clusters;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.residual > b.residual; });
  for (std::size_t i = 0; i < std::min<std::size_t>(sorted.size(), 10); ++i)
    worst.push_back({{"cluster", sorted[i].cluster},
                     {"lambda", sorted[i].value},
                     {"multiplicity", sorted[i].multiplicity},
                     {"residual", sorted[i].residual}});
  return json{{"clusters", r.clusters.size()},
              {"max_residual", r.max_residual},
              {"tolerance", r.tolerance},
              {"passed", r.passed},
              {"largest", worst}};
}

json to_json(const Lattice& l) { return mat_rows(l.basis.transpose()); }

json to_json(const TorusKernelSpec& s) {
  json coeffs = json::array();
  for (const auto& c : s.coefficients) coeffs.push_back({{"v", c.v}, {"a_v", c.a}, {"eigenvalue", s.eigenvalue(c)}});
  return json{{"basis", to_json(s.lattice)},
              {"dual_basis", to_json(s.dual)},
              {"grid", s.resolution},
              {"cutoff", s.cutoff},
              {"max_sine", s.max_sine},
              {"min_cosine", s.min_cosine},
              {"discrete_tail", s.discrete_tail},
              {"coefficients", coeffs}};
}

json to_json(const TorusWatsonReport& r) {
  return json{
      {"samples", r.samples},
      {"seed", r.seed},
      {"stationarity_spread", r.stationarity_spread},
      {"conventions",
       {{"halved_parts_no_factor", {{"residual", r.halved_plain_residual}, {"holds", r.halved_plain_holds()}}},
        {"unhalved_parts_quarter", {{"residual", r.unhalved_quarter_residual}, {"holds", r.unhalved_quarter_holds()}}},
        {"halved_parts_quarter", {{"residual", r.halved_quarter_residual}, {"holds", r.halved_quarter_holds()}}},
        {"tolerance", r.pathwise_tol}}},
      {"inner_product_residual", r.inner_product_residual},
      {"cross_covariance", {{"max", r.max_cross_covariance}, {"bound", r.cross_covariance_bound}}},
      {"odd_part_at_fixed_points", r.odd_at_fixed_points},
      {"energy_means", r.mean_energy},
      {"odd_vs_even", to_json(r.comparison)},
      {"ks_threshold", r.ks_threshold},
      {"passed", r.passed()}};
}

void write_kernel(const std::filesystem::path& stem, const Kernel& k, MatrixFormat format) {
  if (format == MatrixFormat::automatic)
    format = k.R.size() > 1000000 ? MatrixFormat::binary : MatrixFormat::csv;
  const bool bin = format == MatrixFormat::binary;
  std::filesystem::path data = stem;
  data += bin ? ".bin" : ".csv";
  json h{{"rows", k.size()},
         {"cols", k.size()},
         {"dim", k.space.dim()},
         {"points", mat_rows(k.space.points)},
         {"weights", vec(k.space.weights)},
         {"format", bin ? "binary-f64-le-rowmajor" : "csv"},
         {"data", data.filename().string()}};
  std::filesystem::path header = stem;
  header += ".json";
  open_out(header) << h.dump(1) << '\n';
  if (bin) {
    write_binary(data, k.R);
  } else {
    auto os = open_out(data);
    os << std::setprecision(17);
    for (Index i = 0; i < k.R.rows(); ++i) {
      for (Index j = 0; j < k.R.cols(); ++j) os << (j ? "," : "") << k.R(i, j);
      os << '\n';
    }
  }
}

Kernel read_kernel(const std::filesystem::path& header) {
  const json h = read_json(header);
  try {
    const Index m = h.at("rows").get<Index>();
    const Index d = h.at("dim").get<Index>();
    IndexSpace s;
    s.points.resize(m, d);
    const auto pts = h.at("points");
    for (Index i = 0; i < m; ++i)
      for (Index c = 0; c < d; ++c) s.points(i, c) = pts.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(c)).get<double>();
    const auto w = h.at("weights").get<std::vector<double>>();
    s.weights = Eigen::Map<const Vector>(w.data(), static_cast<Index>(w.size()));
    const auto data = header.parent_path() / h.at("data").get<std::string>();
    Matrix R;
    if (h.at("format").get<std::string>() == "csv") {
      std::ifstream is(data);
      if (!is) throw Error(Errc::io_error, "cannot read " + data.string());
      R.resize(m, m);
      std::string line;
      for (Index i = 0; i < m; ++i) {
        if (!std::getline(is, line)) throw Error(Errc::io_error, data.string() + " has too few rows");
        std::stringstream ls(line);
        std::string cell;
        for (Index j = 0; j < m; ++j) {
          if (!std::getline(ls, cell, ',')) throw Error(Errc::io_error, data.string() + " has too few columns");
          R(i, j) = std::stod(cell);
        }
      }
    } else {
      R = read_binary(data, m, m);
    }
    return make_kernel(std::move(s), std::move(R));
  } catch (const json::exception& e) {
    throw Error(Errc::io_error, header.string() + ": " + e.what());
  }
}

void write_ensemble(const std::filesystem::path& stem, const PathEnsemble& e) {
  std::filesystem::path data = stem;
  data += ".bin";
  json h{{"rows", e.samples.rows()},
         {"cols", e.samples.cols()},
         {"seed", e.seed},
         {"factorization_rank", e.factorization_rank},
         {"format", "binary-f64-le-rowmajor"},
         {"data", data.filename().string()}};
  std::filesystem::path header = stem;
  header += ".json";
  open_out(header) << h.dump(1) << '\n';
  write_binary(data, e.samples);
}

Matrix read_ensemble(const std::filesystem::path& header) {
  const json h = read_json(header);
  try {
    return read_binary(header.parent_path() / h.at("data").get<std::string>(), h.at("rows").get<Index>(),
                       h.at("cols").get<Index>());
  } catch (const json::exception& e) {
    throw Error(Errc::io_error, header.string() + ": " + e.what());
  }
}

void write_column_csv(const std::filesystem::path& path, const Vector& v, const std::string& header) {
  auto os = open_out(path);
  os << std::setprecision(17) << header << '\n';
  for (Index i = 0; i < v.size(); ++i) os << v[i] << '\n';
}

void write_text(const std::filesystem::path& path, const std::string& text) { open_out(path) << text; }

}  // namespace invdecomp
