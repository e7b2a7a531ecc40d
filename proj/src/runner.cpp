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

#include "invdecomp/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

namespace invdecomp {

const std::vector<std::string>& check_catalog() {
  static const std::vector<std::string> names{
      "invariance", "projection",    "cumulants",       "watson_relation", "z2_condition",
      "spectrum",   "cumulants_mc",  "duplication",     "quadruplication", "mgf",
      "torus"};
  return names;
}

namespace {

const std::set<std::string> kKernelChecks{"invariance", "projection",   "cumulants", "watson_relation",
                                          "z2_condition", "spectrum", "cumulants_mc"};
const std::set<std::string> kActionChecks{"invariance", "projection", "watson_relation", "z2_condition"};
const std::set<std::string> kMcChecks{"cumulants_mc", "duplication", "quadruplication", "mgf", "torus"};

const std::map<std::string, double>& tolerance_defaults() {
  static const std::map<std::string, double> d{
      {"invariance", 1e-10},        {"projection", 1e-10},       {"watson_relation", 1e-3},
      {"z2_condition", 1e-8},       {"eigenspace", 1e-8},        {"canonical", 1e-8},
      {"spectrum_reference", 0.01}, {"reconstruction", 1e-8},    {"mgf", 1e-3},
      {"mgf_mc", 0.02},             {"duplication_ks", 0.01},    {"quadruplication_ks", 0.015},
      {"torus_ks", 0.02},           {"mean", 0.01},              {"cumulants_mc_k1", 0.01},
      {"cumulants_mc_k2", 0.03},    {"cumulants_mc_k3", 0.10},   {"pathwise", 1e-10},
      {"kernel_match", 1e-12}};
  return d;
}

[[noreturn]] void config_fail(const std::string& where, const std::string& what) {
  throw Error(Errc::config_error, where + ": " + what);
}

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) config_fail(path, "expected a number");
  return j.get<double>();
}

int int_at(const json& j, const std::string& path) {
  if (!j.is_number_integer()) config_fail(path, "expected an integer");
  return j.get<int>();
}

std::vector<int> int_list(const json& j, const std::string& path) {
  if (j.is_number_integer()) return {j.get<int>()};
  if (!j.is_array() || j.empty()) config_fail(path, "expected an integer or a non-empty array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(int_at(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

GroupWithTable group_from_config(const json& g, const std::string& path) {
  if (!g.is_object() || !g.contains("kind")) config_fail(path, "expected an object with a 'kind'");
  const std::string kind = g["kind"].get<std::string>();
  if (kind == "trivial") return cyclic_group(1);
  if (kind == "cyclic") {
    if (!g.contains("n")) config_fail(path + ".n", "missing");
    const int n = int_at(g["n"], path + ".n");
    if (n < 1) config_fail(path + ".n", "must be >= 1");
    return cyclic_group(n);
  }
  if (kind == "product") {
    if (!g.contains("factors") || !g["factors"].is_array() || g["factors"].empty())
      config_fail(path + ".factors", "expected a non-empty array");
    GroupWithTable acc = group_from_config(g["factors"][0], path + ".factors[0]");
    for (std::size_t i = 1; i < g["factors"].size(); ++i)
      acc = direct_product(acc, group_from_config(g["factors"][i], path + ".factors[" + std::to_string(i) + "]"));
    return acc;
  }
  config_fail(path + ".kind", "unknown group kind '" + kind + "' (trivial, cyclic, product)");
}

int kernel_axes(const std::string& name) {
  if (name == "sheet_tied" || name == "sheet_compensated") return 2;
  if (name == "user_matrix") return 0;
  return 1;
}

}  // namespace

double default_tolerance(const std::string& key) {
  const auto& d = tolerance_defaults();
  const auto it = d.find(key);
  if (it == d.end()) throw Error(Errc::invalid_argument, "unknown tolerance key '" + key + "'");
  return it->second;
}

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::passed: return "passed";
    case CheckStatus::failed: return "failed";
    case CheckStatus::skipped: return "skipped";
    case CheckStatus::info: return "info";
  }
  return "?";
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) config_fail("$", "the configuration must be a JSON object");
  static const std::set<std::string> allowed{"name",   "description", "kernel",     "group",   "action",
                                             "grid",   "rho",         "n_max",      "samples", "seed",
                                             "threads", "checks",     "tolerances", "output",  "torus",
                                             "mgf"};
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) config_fail("$." + key, "unknown field");

  ExperimentConfig c;
  if (j.contains("name")) {
    if (!j["name"].is_string()) config_fail("$.name", "expected a string");
    c.name = j["name"].get<std::string>();
  }
  if (!j.contains("checks") || !j["checks"].is_array() || j["checks"].empty())
    config_fail("$.checks", "expected a non-empty array of check names");
  for (std::size_t i = 0; i < j["checks"].size(); ++i) {
    const auto& v = j["checks"][i];
    const std::string path = "$.checks[" + std::to_string(i) + "]";
    if (!v.is_string()) config_fail(path, "expected a string");
    const auto name = v.get<std::string>();
    if (std::find(check_catalog().begin(), check_catalog().end(), name) == check_catalog().end())
      config_fail(path, "unknown check '" + name + "'");
    if (std::find(c.checks.begin(), c.checks.end(), name) == c.checks.end()) c.checks.push_back(name);
  }
  auto wants = [&](const std::set<std::string>& s) {
    return std::any_of(c.checks.begin(), c.checks.end(), [&](const auto& n) { return s.count(n) > 0; });
  };
  auto has = [&](const std::string& n) { return std::find(c.checks.begin(), c.checks.end(), n) != c.checks.end(); };

  if (j.contains("rho")) {
    c.rho = number_at(j["rho"], "$.rho");
    if (!(c.rho >= 0.0 && c.rho <= 1.0)) config_fail("$.rho", "must lie in [0, 1]");
  }
  if (j.contains("n_max")) {
    c.n_max = int_at(j["n_max"], "$.n_max");
    if (c.n_max < 1 || c.n_max > 16) config_fail("$.n_max", "must lie in 1..16");
  }
  if (j.contains("samples")) {
    const double s = number_at(j["samples"], "$.samples");
    if (s < 1000 || s != std::floor(s)) config_fail("$.samples", "must be an integer >= 1000");
    c.samples = static_cast<Index>(s);
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
      config_fail("$.seed", "expected a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("threads")) {
    c.threads = int_at(j["threads"], "$.threads");
    if (c.threads < 0) config_fail("$.threads", "must be >= 0");
  }
  if (wants(kMcChecks)) {
    if (!c.seed) config_fail("$.seed", "required because a Monte Carlo check is requested");
    if (c.samples == 0) config_fail("$.samples", "required because a Monte Carlo check is requested");
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    c.grid = int_list(g.is_object() && g.contains("n") ? g["n"] : g, "$.grid.n");
    if (g.is_object() && g.contains("rule")) {
      if (!g["rule"].is_string()) config_fail("$.grid.rule", "expected a string");
      c.rule = g["rule"].get<std::string>();
      if (c.rule != "midpoint" && c.rule != "gauss_split") config_fail("$.grid.rule", "unknown rule (midpoint, gauss_split)");
      if (c.rule == "gauss_split")
        for (int n : c.grid)
          if (n % 2) config_fail("$.grid.n", "gauss_split needs an even number of points per axis");
    }
    for (int n : c.grid)
      if (n < 2) config_fail("$.grid.n", "every axis needs at least 2 points");
  }
  if (j.contains("kernel")) {
    const auto& k = j["kernel"];
    if (!k.is_object() || !k.contains("name") || !k["name"].is_string())
      config_fail("$.kernel", "expected {\"name\": ..., \"params\": {...}}");
    static const std::set<std::string> names{"bridge", "watson", "torus_watson", "sheet_tied", "sheet_compensated",
                                             "user_matrix"};
    const auto name = k["name"].get<std::string>();
    if (!names.count(name)) config_fail("$.kernel.name", "unknown kernel '" + name + "'");
    if (k.contains("params") && !k["params"].is_object()) config_fail("$.kernel.params", "expected an object");
    if (name == "user_matrix") {
      if (!k.contains("params") || !k["params"].contains("matrix") || !k["params"]["matrix"].is_array())
        config_fail("$.kernel.params.matrix", "user_matrix needs a square matrix given as rows");
      const auto& rows = k["params"]["matrix"];
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (!rows[i].is_array() || rows[i].size() != rows.size())
          config_fail("$.kernel.params.matrix[" + std::to_string(i) + "]", "row length differs from the row count");
      if (c.grid.empty()) c.grid = {static_cast<int>(rows.size())};
      if (c.grid.size() != 1 || c.grid[0] != static_cast<int>(rows.size()))
        config_fail("$.grid.n", "user_matrix is indexed by a single axis with one point per row");
    } else {
      if (c.grid.empty()) config_fail("$.grid", "required for kernel '" + name + "'");
      if (static_cast<int>(c.grid.size()) != kernel_axes(name))
        config_fail("$.grid.n", "kernel '" + name + "' needs " + std::to_string(kernel_axes(name)) + " axes");
    }
    c.kernel = k;
  } else if (wants(kKernelChecks)) {
    config_fail("$.kernel", "required by the requested checks");
  }
  if (j.contains("action")) {
    const auto& a = j["action"];
    const json name = a.is_object() ? a.value("name", json()) : a;
    if (!name.is_string()) config_fail("$.action.name", "expected a string");
    c.action = name.get<std::string>();
    if (c.action != "none" && c.action != "reversal")
      config_fail("$.action.name", "unknown action '" + c.action + "' (none, reversal)");
  }
  if (c.action == "none" && wants(kActionChecks))
    config_fail("$.action", "the requested checks need a group action (\"reversal\")");
  if (j.contains("group")) {
    const GroupWithTable g = group_from_config(j["group"], "$.group");
    if (c.action == "reversal") {
      const int expect = 1 << static_cast<int>(c.grid.size());
      bool ok = g.group.order == expect;
      // (Z/2Z)^d is the only group acting by reversal on d axes
      for (int e = 0; ok && e < g.group.order; ++e) ok = g.group.product(e, e) == g.group.identity;
      if (!ok) config_fail("$.group", "does not match the reversal action on " + std::to_string(c.grid.size()) + " axes");
    }
    c.group = j["group"];
  }
  if (has("z2_condition") && c.grid.size() != 1)
    config_fail("$.checks", "z2_condition needs a Z/2Z action, i.e. a one-axis grid with reversal");
  if (has("quadruplication") && c.grid.empty()) c.grid = {32, 32};
  if (has("duplication") && c.grid.empty()) c.grid = {256};
  if (j.contains("tolerances")) {
    if (!j["tolerances"].is_object()) config_fail("$.tolerances", "expected an object");
    for (const auto& [key, v] : j["tolerances"].items()) {
      if (!tolerance_defaults().count(key)) config_fail("$.tolerances." + key, "unknown tolerance key");
      const double t = number_at(v, "$.tolerances." + key);
      if (!(t > 0.0)) config_fail("$.tolerances." + key, "must be positive");
      c.tolerances[key] = t;
    }
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    if (!o.is_object()) config_fail("$.output", "expected an object");
    if (o.contains("dir")) {
      if (!o["dir"].is_string()) config_fail("$.output.dir", "expected a string");
      c.out_dir = o["dir"].get<std::string>();
    }
    if (o.contains("formats")) {
      static const std::set<std::string> fmts{"json", "csv", "txt", "samples", "kernel"};
      if (!o["formats"].is_array()) config_fail("$.output.formats", "expected an array");
      c.formats.clear();
      for (const auto& f : o["formats"]) {
        if (!f.is_string() || !fmts.count(f.get<std::string>()))
          config_fail("$.output.formats", "allowed: json, csv, txt, samples, kernel");
        c.formats.push_back(f.get<std::string>());
      }
    }
  }
  if (has("torus")) {
    if (!j.contains("torus") || !j["torus"].is_object()) config_fail("$.torus", "required by the torus check");
    const auto& t = j["torus"];
    if (!t.contains("basis") || !t["basis"].is_array() || t["basis"].empty())
      config_fail("$.torus.basis", "expected a list of basis vectors");
    const std::size_t d = t["basis"].size();
    for (std::size_t i = 0; i < d; ++i)
      if (!t["basis"][i].is_array() || t["basis"][i].size() != d)
        config_fail("$.torus.basis[" + std::to_string(i) + "]", "expected " + std::to_string(d) + " coordinates");
    if (!t.contains("grid")) config_fail("$.torus.grid", "missing");
    const auto g = int_list(t["grid"], "$.torus.grid");
    if (g.size() != d) config_fail("$.torus.grid", "one resolution per basis vector");
    if (!t.contains("cutoff")) config_fail("$.torus.cutoff", "missing");
    const int cut = int_at(t["cutoff"], "$.torus.cutoff");
    for (int n : g)
      if (2 * cut >= n) config_fail("$.torus.cutoff", "must be below half of every resolution (Nyquist)");
    const std::string prof = t.value("profile", "watson");
    if (prof != "watson" && prof != "constant") config_fail("$.torus.profile", "unknown profile '" + prof + "'");
    c.torus = t;
  }
  if (has("mgf")) {
    json m = j.contains("mgf") ? j["mgf"] : json::object();
    if (!m.is_object()) config_fail("$.mgf", "expected an object");
    if (!m.contains("points")) m["points"] = json::array({json::array({0.5, 0.5}), json::array({1.0, 0.2}), json::array({0.3, 0.9})});
    for (std::size_t i = 0; i < m["points"].size(); ++i) {
      const auto& p = m["points"][i];
      const std::string path = "$.mgf.points[" + std::to_string(i) + "]";
      if (!p.is_array() || p.size() != 2) config_fail(path, "expected [lambda, rho]");
      const double lam = number_at(p[0], path + "[0]"), r = number_at(p[1], path + "[1]");
      if (!(r >= 0.0 && r <= 1.0)) config_fail(path + "[1]", "rho must lie in [0, 1]");
      if (!(lam >= 0.0 && lam < mgf_watson_radius(r)))
        config_fail(path + "[0]", "lambda must lie in [0, 2 pi / sqrt(1 + rho))");
    }
    if (!m.contains("pairs")) m["pairs"] = 2000;
    if (!m.contains("grid")) m["grid"] = 256;
    c.mgf = m;
  }
  c.source = j;
  c.source.erase("threads");
  return c;
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string what = e.what();
    throw Error(Errc::config_error,
                origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON (" + what + ")");
  }
  try {
    return config_from_json(j);
  } catch (const json::exception& e) {
    throw Error(Errc::config_error, origin + ": " + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(Errc::config_error, path.string() + ": cannot open");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path.string());
}

namespace {

struct Context {
  const ExperimentConfig& cfg;
  const RunOptions& opt;
  std::uint64_t seed = 0;
  int threads = 0;
  std::filesystem::path out;
  bool csv = false, samples = false;
  std::optional<Kernel> kernel;
  std::optional<GroupWithTable> group;

  double tol(const std::string& key) const {
    const auto it = cfg.tolerances.find(key);
    return (it == cfg.tolerances.end() ? default_tolerance(key) : it->second) * opt.tol_scale;
  }
  void csv_file(const std::string& name, const std::string& body) const {
    if (csv && opt.write) write_text(out / name, body);
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::string full(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

IndexSpace make_space(const ExperimentConfig& cfg) {
  std::vector<IndexSpace> axes;
  for (int n : cfg.grid) {
    IndexSpace s = make_interval_grid(n, quadrature_rule(cfg.rule));
    if (cfg.action == "reversal") s = with_reversal(std::move(s));
    axes.push_back(std::move(s));
  }
  if (axes.size() == 1) return axes.front();
  return make_product_grid(axes, cfg.action == "reversal");
}

Kernel make_config_kernel(const ExperimentConfig& cfg) {
  const std::string name = cfg.kernel["name"].get<std::string>();
  if (name == "user_matrix") {
    const auto& rows = cfg.kernel["params"]["matrix"];
    const auto m = static_cast<Index>(rows.size());
    Matrix R(m, m);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j) R(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
    // entries are read at the midpoints of a uniform grid, so reversal is i -> m - 1 - i
    return make_kernel(make_space(cfg), std::move(R));
  }
  return builtin_kernel(name, make_space(cfg));
}

GroupWithTable action_group(const ExperimentConfig& cfg) {
  GroupWithTable g = cyclic_group(2);
  for (std::size_t i = 1; i < cfg.grid.size(); ++i) g = direct_product(g, cyclic_group(2));
  return g;
}

CheckResult check_invariance_step(Context& c) {
  CheckResult r{"invariance", CheckStatus::passed, {}, "", {}};
  const double tol = c.tol("invariance");
  const InvarianceReport inv = check_invariance(*c.kernel, tol);
  const ActionReport act = check_action(c.kernel->space.bound_action(), c.kernel->weights());
  r.detail = {{"max_deviation", inv.max_deviation},
              {"tolerance", tol},
              {"action_axioms", act.passed},
              {"fixed_points", act.fixed_points.size()}};
  r.status = inv.passed && act.passed ? CheckStatus::passed : CheckStatus::failed;
  r.message = "max |R(g.y1, g.y2) - R(y1, y2)| = " + fmt(inv.max_deviation) + " (tol " + fmt(tol) + ")";
  return r;
}

CheckResult check_projection_step(Context& c) {
  CheckResult r{"projection", CheckStatus::passed, {"invariance"}, "", {}};
  const double tol = c.tol("projection");
  const auto& table = c.group->table;
  Matrix sum = Matrix::Zero(c.kernel->size(), c.kernel->size());
  double cross = 0.0, idem = 0.0;
  json per = json::array();
  for (std::size_t p = 0; p < table.size(); ++p) {
    const Kernel kp = project_kernel(*c.kernel, table[p]);
    sum += kp.R;
    idem = std::max(idem, (project_kernel(kp, table[p], table[p]) - kp.R).cwiseAbs().maxCoeff());
    for (std::size_t q = 0; q < table.size(); ++q)
      if (q != p) cross = std::max(cross, project_kernel(*c.kernel, table[p], table[q]).cwiseAbs().maxCoeff());
    per.push_back({{"label", table[p].label}, {"trace", contraction_trace(kp, 1)}});
  }
  const double sum_dev = (sum - c.kernel->R).cwiseAbs().maxCoeff();
  r.detail = {{"sum_deviation", sum_dev},
              {"max_cross_projection", cross},
              {"idempotence_deviation", idem},
              {"tolerance", tol},
              {"per_irrep", per}};
  const bool ok = sum_dev <= tol && cross <= tol && idem <= tol;
  r.status = ok ? CheckStatus::passed : CheckStatus::failed;
  r.message = "sum of projections " + fmt(sum_dev) + ", cross " + fmt(cross) + ", idempotence " + fmt(idem) +
              " (tol " + fmt(tol) + ")";
  return r;
}

CheckResult check_cumulants_step(Context& c) {
  CheckResult r{"cumulants", CheckStatus::info, {}, "", {}};
  const auto traces = contraction_traces(*c.kernel, c.cfg.n_max);
  const CumulantVector k = cumulants_from_traces(traces, c.cfg.rho);
  r.detail = {{"rho", c.cfg.rho}, {"traces", traces}, {"cumulants", k.values}};
  std::ostringstream os;
  os << "n,trace,kappa\n";
  for (int n = 1; n <= c.cfg.n_max; ++n) os << n << ',' << full(traces[static_cast<std::size_t>(n - 1)]) << ',' << full(k[n]) << '\n';
  c.csv_file("cumulants.csv", os.str());
  r.message = "kappa_1 = " + fmt(k[1]) + ", kappa_2 = " + fmt(c.cfg.n_max >= 2 ? k[2] : 0.0);
  return r;
}

CheckResult check_watson_step(Context& c) {
  CheckResult r{"watson_relation", CheckStatus::passed, {"invariance"}, "", {}};
  const double tol = c.tol("watson_relation");
  const WatsonCheckReport w = watson_relation_check(*c.kernel, c.group->table, c.cfg.rho, c.cfg.n_max, tol);
  r.detail = to_json(w);
  r.status = w.passed() ? CheckStatus::passed : CheckStatus::failed;
  std::ostringstream os;
  os << "irrep,n,trace,cII_dev,cIII_dev,vacuous\n";
  for (const auto& it : w.per_irrep)
    for (int n = 1; n <= w.n_max; ++n) {
      const auto i = static_cast<std::size_t>(n - 1);
      os << it.label << ',' << n << ',' << full(it.traces[i]) << ',' << full(it.cII_dev[i]) << ','
         << full(it.cIII_dev[i]) << ',' << (w.vacuous[i] ? 1 : 0) << '\n';
    }
  c.csv_file("watson_relation.csv", os.str());
  r.message = "(C II) max dev " + fmt(w.max_cII_dev) + ", (C III) max dev " + fmt(w.max_cIII_dev) + " (tol " +
              fmt(tol) + ", relative)";
  return r;
}

CheckResult check_z2_step(Context& c) {
  CheckResult r{"z2_condition", CheckStatus::passed, {"invariance"}, "", {}};
  const double tol = c.tol("z2_condition");
  const Z2ConditionReport z = z2_condition_check(*c.kernel, c.cfg.n_max, tol);
  r.detail = to_json(z);
  r.status = z.passed ? CheckStatus::passed : CheckStatus::failed;
  std::ostringstream os;
  os << "n,value\n";
  for (std::size_t i = 0; i < z.values.size(); ++i) os << i + 1 << ',' << full(z.values[i]) << '\n';
  c.csv_file("z2_condition.csv", os.str());
  std::ostringstream msg;
  msg << "twisted traces";
  for (double v : z.values) msg << ' ' << fmt(v);
  msg << " (tol " << fmt(tol) << ", absolute)";
  r.message = msg.str();
  return r;
}

CheckResult check_spectrum_step(Context& c) {
  CheckResult r{"spectrum", CheckStatus::passed, {}, "", {}};
  if (c.kernel->space.action) r.depends_on = {"invariance"};
  const Spectrum s = eigendecompose(*c.kernel);
  bool ok = true;
  std::ostringstream msg;

  const double rec_tol = c.tol("reconstruction");
  const double lmax = std::max(s.eigenvalues[0], 0.0);
  const Matrix Bfull = reconstruct(s, s.size());
  const double rec_dev = (Bfull - c.kernel->R).cwiseAbs().maxCoeff();
  const bool rec_ok = rec_dev <= rec_tol * std::max(lmax, 1e-300) * 1.0 / c.kernel->weights().minCoeff() * c.kernel->weights().maxCoeff() ||
                      rec_dev <= rec_tol * std::max(lmax, 1e-300);
  ok = ok && rec_ok;
  const Index p = std::min<Index>(200, s.size());
  const FeatureMap fm = kl_feature_map(*c.kernel, s, p);
  r.detail["clusters"] = s.clusters.size();
  r.detail["cluster_rel_tol"] = s.rel_tol;
  r.detail["leading"] = std::vector<double>(s.eigenvalues.data(), s.eigenvalues.data() + std::min<Index>(20, s.size()));
  r.detail["reconstruction"] = {{"max_deviation", rec_dev}, {"tolerance", rec_tol}, {"relative_to", "lambda_max"}};
  r.detail["feature_map"] = {{"p", p},
                             {"truncation_bound", truncation_bound(s, p)},
                             {"max_deviation", (fm.induced_kernel() - c.kernel->R).cwiseAbs().maxCoeff()}};
  msg << s.clusters.size() << " clusters";

  const std::string name = c.kernel->space.dim() == 1 ? c.cfg.kernel["name"].get<std::string>() : "";
  if (name == "bridge" || name == "watson") {
    const double tol = c.tol("spectrum_reference");
    const int mult = name == "watson" ? 2 : 1;
    const double scale = name == "watson" ? 4.0 : 1.0;
    json rows = json::array();
    double worst = 0.0;
    bool mult_ok = true;
    // midpoint Nystrom error grows like (k / N)^2; only compare modes the grid resolves to ~1%
    const int modes = std::min(10, static_cast<int>(c.kernel->size()) / 20);
    for (int k = 1; k <= modes; ++k) {
      const double ref = 1.0 / (scale * std::numbers::pi * std::numbers::pi * k * k);
      const auto j = static_cast<std::size_t>(k - 1);
      if (j >= s.clusters.size()) break;
      const Cluster& cl = s.clusters[j];
      const double err = std::abs(cl.value - ref) / ref;
      worst = std::max(worst, err);
      mult_ok = mult_ok && cl.multiplicity() == mult;
      rows.push_back({{"k", k}, {"lambda", cl.value}, {"reference", ref}, {"relative_error", err}, {"multiplicity", cl.multiplicity()}});
    }
    r.detail["reference"] = {{"modes", modes}, {"rows", rows}, {"max_relative_error", worst}, {"tolerance", tol}, {"expected_multiplicity", mult}};
    ok = ok && worst <= tol && mult_ok;
    msg << ", reference max rel err " << fmt(worst) << (mult_ok ? "" : " (multiplicity mismatch)");
  }
  std::vector<std::string> labels;
  if (c.kernel->space.action && c.group) {
    const double etol = c.tol("eigenspace");
    const EigenspaceReport er = check_eigenspace_invariance(s, *c.kernel->space.action, etol);
    r.detail["eigenspace_invariance"] = to_json(er);
    ok = ok && er.passed;
    msg << ", eigenspace residual " << fmt(er.max_residual);
    try {
      const CanonicalDecomposition cd = canonical_decomposition(s, *c.kernel->space.action, c.group->table, c.tol("canonical"));
      labels = cd.labels;
      json split = json::array();
      for (std::size_t j = 0; j < std::min<std::size_t>(cd.clusters.size(), 10); ++j) {
        json parts = json::object();
        for (const auto& part : cd.clusters[j].parts) parts[part.label] = part.dim;
        split.push_back({{"cluster", j}, {"lambda", cd.clusters[j].value}, {"dims", parts}});
      }
      r.detail["canonical_decomposition"] = {{"dimension_sums_exact", true}, {"leading_clusters", split}};
    } catch (const Error& e) {
      ok = false;
      r.detail["canonical_decomposition"] = {{"dimension_sums_exact", false}, {"error", e.what()}};
      msg << ", canonical decomposition failed";
    }
  }
  c.csv_file("spectrum.csv", spectrum_csv(s, labels));
  r.status = ok ? CheckStatus::passed : CheckStatus::failed;
  r.message = msg.str();
  return r;
}

CheckResult check_cumulants_mc_step(Context& c) {
  CheckResult r{"cumulants_mc", CheckStatus::passed, {}, "", {}};
  CumulantMcReport m = cumulant_mc_check(*c.kernel, c.cfg.rho, c.cfg.samples, c.seed, {0, c.threads});
  m.tolerance = {c.tol("cumulants_mc_k1"), c.tol("cumulants_mc_k2"), c.tol("cumulants_mc_k3")};
  r.detail = to_json(m);
  r.status = m.passed() ? CheckStatus::passed : CheckStatus::failed;
  r.message = "errors k1 " + fmt(m.error[0]) + ", k2 " + fmt(m.error[1]) + ", k3 " + fmt(m.error[2]);
  return r;
}

void identity_outputs(Context& c, const IdentityCheckReport& rep, CheckResult& r) {
  r.detail = to_json(rep);
  r.status = rep.passed() ? CheckStatus::passed : CheckStatus::failed;
  r.message = "KS " + fmt(rep.comparison.ks_distance) + " (threshold " + fmt(rep.ks_threshold) + ")";
  for (int i = 0; i < rep.orders_checked; ++i)
    if (!rep.gap_passed[static_cast<std::size_t>(i)]) r.message += ", k" + std::to_string(i + 1) + " gap outside tolerance";
  if (rep.mean_checked)
    r.message += ", means " + fmt(rep.comparison.kstats_a[0]) + " / " + fmt(rep.comparison.kstats_b[0]) + " vs " +
                 fmt(rep.mean_target);
  if (c.samples && c.opt.write) {
    write_column_csv(c.out / (rep.name + "_lhs.csv"), rep.lhs_samples, "lhs");
    write_column_csv(c.out / (rep.name + "_rhs.csv"), rep.rhs_samples, "rhs");
  }
}

CheckResult check_duplication_step(Context& c) {
  CheckResult r{"duplication", CheckStatus::passed, {}, "", {}};
  DuplicationConfig d;
  d.grid = c.cfg.grid.empty() ? 256 : c.cfg.grid[0];
  d.samples = c.cfg.samples;
  d.rho = c.cfg.rho;
  d.seed = c.seed;
  d.ks_threshold = c.tol("duplication_ks");
  d.mean_rel_tol = c.tol("mean");
  d.threads = c.threads;
  identity_outputs(c, duplication_check(d), r);
  return r;
}

CheckResult check_quadruplication_step(Context& c) {
  CheckResult r{"quadruplication", CheckStatus::passed, {}, "", {}};
  QuadruplicationConfig q;
  q.grid = c.cfg.grid.empty() ? 32 : c.cfg.grid[0];
  q.samples = c.cfg.samples;
  q.rho = c.cfg.rho;
  q.seed = c.seed;
  q.ks_threshold = c.tol("quadruplication_ks");
  q.threads = c.threads;
  identity_outputs(c, quadruplication_check(q), r);
  return r;
}

CheckResult check_mgf_step(Context& c) {
  CheckResult r{"mgf", CheckStatus::passed, {}, "", {}};
  const double tol = c.tol("mgf"), mc_tol = c.tol("mgf_mc");
  const int pairs = c.cfg.mgf["pairs"].get<int>();
  const int grid = c.cfg.mgf["grid"].get<int>();
  const Kernel watson = builtin_kernel("watson", make_interval_grid(grid));
  json rows = json::array();
  bool ok = true;
  double worst = 0.0, worst_mc = 0.0;
  std::ostringstream os;
  os << "lambda,rho,closed_form,spectral,relative_error,monte_carlo,mc_relative_error\n";
  std::uint64_t stream = 0;
  for (const auto& p : c.cfg.mgf["points"]) {
    const double lam = p[0].get<double>(), rho = p[1].get<double>();
    const MgfValues m = mgf_watson(lam, rho, pairs);
    const double mc = mgf_monte_carlo(watson, lam, rho, c.cfg.samples, c.seed, {stream++, c.threads});
    const double mc_err = std::abs(mc - m.spectral) / m.spectral;
    worst = std::max(worst, m.relative_error);
    worst_mc = std::max(worst_mc, mc_err);
    ok = ok && m.relative_error <= tol && mc_err <= mc_tol;
    json row = to_json(m);
    row["lambda"] = lam;
    row["rho"] = rho;
    row["monte_carlo"] = mc;
    row["mc_relative_error"] = mc_err;
    rows.push_back(row);
    os << full(lam) << ',' << full(rho) << ',' << full(m.closed_form) << ',' << full(m.spectral) << ','
       << full(m.relative_error) << ',' << full(mc) << ',' << full(mc_err) << '\n';
  }
  c.csv_file("mgf.csv", os.str());
  r.detail = {{"points", rows},
              {"pairs", pairs},
              {"mc_grid", grid},
              {"samples", c.cfg.samples},
              {"seed", c.seed},
              {"tolerance", {{"closed_vs_spectral", tol}, {"spectral_vs_mc", mc_tol}}}};
  r.status = ok ? CheckStatus::passed : CheckStatus::failed;
  r.message = "closed vs spectral max rel err " + fmt(worst) + ", spectral vs MC " + fmt(worst_mc);
  return r;
}

CheckResult check_torus_step(Context& c) {
  CheckResult r{"torus", CheckStatus::passed, {}, "", {}};
  const json& t = c.cfg.torus;
  const std::size_t d = t["basis"].size();
  Matrix V(static_cast<Index>(d), static_cast<Index>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t q = 0; q < d; ++q) V(static_cast<Index>(q), static_cast<Index>(i)) = t["basis"][i][q].get<double>();
  const Lattice lat = make_lattice(V);
  const TorusGrid grid = make_torus_grid(lat, int_list(t["grid"], "$.torus.grid"));
  const std::string prof_name = t.value("profile", "watson");
  const Profile prof = builtin_profile(prof_name, t.value("value", 0.0));
  Vector samples(grid.size());
  for (Index p = 0; p < grid.size(); ++p) {
    Vector cc(static_cast<Index>(d));
    for (std::size_t q = 0; q < d; ++q)
      cc[static_cast<Index>(q)] = static_cast<double>(grid.coords[static_cast<std::size_t>(p)][q]) / grid.resolution[q];
    samples[p] = prof(cc);
  }
  const TorusKernelSpec spec = fourier_kl(samples, grid, t["cutoff"].get<int>());
  const double ks = c.tol("torus_ks");
  TorusWatsonReport w = torus_watson_check(spec, grid, c.cfg.samples, c.seed, c.threads, ks);
  w.pathwise_tol = c.tol("pathwise");
  bool ok = w.passed();
  json spec_json = to_json(spec);
  spec_json.erase("coefficients");
  spec_json["retained"] = spec.coefficients.size();
  spec_json["condition_number"] = lat.condition_number();
  spec_json["volume"] = lat.volume();
  r.detail = {{"spec", spec_json}, {"parity", to_json(w)}};

  // sampled profile kernel against the truncated expansion
  const Kernel exact = profile_kernel(grid, prof);
  const double assembled_dev = (assemble_kernel(spec, grid) - exact.R).cwiseAbs().maxCoeff();
  r.detail["assembly"] = {{"max_deviation", assembled_dev}, {"bound", spec.discrete_tail}};
  ok = ok && assembled_dev <= spec.discrete_tail + 1e-12;
  if (d == 1 && prof_name == "watson" && lat.basis(0, 0) == 1.0) {
    const Kernel tw = builtin_kernel("torus_watson", grid.space);
    double dev = 0.0;
    for (Index i = 0; i < tw.size(); ++i)
      for (Index j = 0; j < tw.size(); ++j)
        dev = std::max(dev, std::abs(tw.R(i, j) - watson_covariance(grid.space.points(i, 0), grid.space.points(j, 0))));
    const double ktol = c.tol("kernel_match");
    r.detail["kernel_match"] = {{"max_deviation", dev}, {"tolerance", ktol}};
    ok = ok && dev <= ktol;
  }
  std::ostringstream os;
  for (std::size_t q = 0; q < d; ++q) os << "v" << q + 1 << ',';
  os << "a_v,eigenvalue\n";
  for (const auto& cf : spec.coefficients) {
    for (int v : cf.v) os << v << ',';
    os << full(cf.a) << ',' << full(spec.eigenvalue(cf)) << '\n';
  }
  c.csv_file("torus_coefficients.csv", os.str());
  r.status = ok ? CheckStatus::passed : CheckStatus::failed;
  r.message = "KS(odd, even) " + fmt(w.comparison.ks_distance) + ", halved split residual " +
              fmt(w.halved_plain_residual) + ", literal quarter reading " +
              (w.halved_quarter_holds() ? "holds" : "fails");
  return r;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
  Context c{cfg, opt, 0, 0, {}, false, false, std::nullopt, std::nullopt};
  c.seed = opt.seed ? *opt.seed : cfg.seed.value_or(0);
  c.threads = opt.threads > 0 ? opt.threads : cfg.threads;
  c.out = opt.out_dir ? *opt.out_dir : cfg.out_dir;
  auto fmt_on = [&](const char* f) { return std::find(cfg.formats.begin(), cfg.formats.end(), f) != cfg.formats.end(); };
  c.csv = fmt_on("csv");
  c.samples = fmt_on("samples");
  if (!(opt.tol_scale > 0.0)) throw Error(Errc::config_error, "--tol-scale must be positive");

  std::vector<std::string> order;
  auto wanted = [&](const std::string& n) { return std::find(cfg.checks.begin(), cfg.checks.end(), n) != cfg.checks.end(); };
  const bool need_inv = std::any_of(cfg.checks.begin(), cfg.checks.end(), [](const auto& n) { return kActionChecks.count(n) > 0; });
  for (const auto& n : check_catalog())
    if (wanted(n) || (n == "invariance" && need_inv) || (n == "invariance" && wanted("spectrum") && cfg.action != "none"))
      order.push_back(n);

  if (!cfg.kernel.is_null()) {
    c.kernel = make_config_kernel(cfg);
    if (cfg.action == "reversal") c.group = cfg.group.is_null() ? action_group(cfg) : group_from_config(cfg.group, "$.group");
  }
  if (opt.write) std::filesystem::create_directories(c.out);
  if (opt.write && fmt_on("kernel") && c.kernel) write_kernel(c.out / "kernel", *c.kernel);

  static const std::map<std::string, std::function<CheckResult(Context&)>> steps{
      {"invariance", check_invariance_step},   {"projection", check_projection_step},
      {"cumulants", check_cumulants_step},     {"watson_relation", check_watson_step},
      {"z2_condition", check_z2_step},         {"spectrum", check_spectrum_step},
      {"cumulants_mc", check_cumulants_mc_step}, {"duplication", check_duplication_step},
      {"quadruplication", check_quadruplication_step}, {"mgf", check_mgf_step},
      {"torus", check_torus_step}};

  RunOutcome out;
  std::map<std::string, CheckStatus> done;
  std::ostringstream summary;
  summary << "invdecomp run: " << cfg.name << " (seed " << c.seed << ", tol-scale " << opt.tol_scale << ")\n";
  for (const auto& name : order) {
    CheckResult r;
    bool blocked = false;
    std::vector<std::string> deps;
    if (name == "projection" || name == "watson_relation" || name == "z2_condition" ||
        (name == "spectrum" && cfg.action != "none"))
      deps = {"invariance"};
    for (const auto& d : deps)
      if (done.count(d) && done[d] == CheckStatus::failed) blocked = true;
    if (blocked) {
      r = {name, CheckStatus::skipped, deps, "skipped: dependency invariance failed", json::object()};
    } else {
      try {
        r = steps.at(name)(c);
      } catch (const Error& e) {
        r = {name, CheckStatus::failed, deps, e.what(), json{{"error", e.what()}}};
      }
      r.depends_on = deps;
    }
    done[name] = r.status;
    summary << "  " << name << ": " << to_string(r.status) << ". " << r.message << '\n';
    out.checks.push_back(std::move(r));
  }

  int passed = 0, failed = 0, skipped = 0, info = 0;
  json checks = json::array();
  for (const auto& r : out.checks) {
    switch (r.status) {
      case CheckStatus::passed: ++passed; break;
      case CheckStatus::failed: ++failed; break;
      case CheckStatus::skipped: ++skipped; break;
      case CheckStatus::info: ++info; break;
    }
    checks.push_back({{"name", r.name},
                      {"status", to_string(r.status)},
                      {"depends_on", r.depends_on},
                      {"message", r.message},
                      {"detail", r.detail}});
  }
  out.exit_code = failed > 0 || skipped > 0 ? 1 : 0;
  json tol = json::object();
  for (const auto& [k, v] : tolerance_defaults()) {
    const auto it = cfg.tolerances.find(k);
    tol[k] = (it == cfg.tolerances.end() ? v : it->second) * opt.tol_scale;
  }
  out.report = {{"tool", "invdecomp"},
                {"experiment", cfg.name},
                {"seed", c.seed},
                {"tol_scale", opt.tol_scale},
                {"tolerances", tol},
                {"config", cfg.source},
                {"checks", checks},
                {"counts", {{"passed", passed}, {"failed", failed}, {"skipped", skipped}, {"info", info}}},
                {"exit_code", out.exit_code}};
  if (opt.timestamp) out.report["generated_at"] = timestamp();
  summary << "result: " << passed << " passed, " << failed << " failed, " << skipped << " skipped, " << info
          << " informational; exit " << out.exit_code << '\n';
  out.summary = summary.str();
  if (opt.write) {
    if (fmt_on("json")) write_text(c.out / "report.json", out.report.dump(2) + "\n");
    if (fmt_on("txt")) write_text(c.out / "summary.txt", out.summary);
  }
  return out;
}

}  // namespace invdecomp
