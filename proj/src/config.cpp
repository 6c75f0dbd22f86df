#include "cmclab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "cmclab/expr.hpp"

namespace cmclab {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

std::string path_of(const std::string& where, const char* key) { return where.empty() ? key : where + "." + key; }

template <class T>
void read(const json& j, const std::string& where, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path_of(where, key) + ": wrong type");
  }
}

void read_int(const json& j, const std::string& where, const char* key, int& out) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number_integer()) throw ConfigError(path_of(where, key) + ": expected an integer");
  out = j.at(key).get<int>();
}

void read_pair(const json& j, const std::string& where, const char* key,
               std::optional<std::pair<double, double>>& out) {
  if (!j.contains(key)) return;
  std::vector<double> v;
  read(j, where, key, v);
  if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError(path_of(where, key) + ": expected [lo, hi] with lo < hi");
  out = std::make_pair(v[0], v[1]);
}

void positive(double v, const std::string& key) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key + ": must be positive");
}

}  // namespace

ExactSolution ExactConfig::build(int n) const {
  if (kind == "plane") {
    if (static_cast<int>(p.size()) != n - 1) throw ConfigError("exact.p: needs n - 1 entries");
    return ExactSolution::plane(a, p, c);
  }
  std::vector<double> q = center.empty() ? std::vector<double>(n - 1, 0.0) : center;
  if (static_cast<int>(q.size()) != n - 1) throw ConfigError("exact.center: needs n - 1 entries");
  return ExactSolution::sphere(q, y_offset, height, radius, branch);
}

GridSpec Config::grid() const {
  GridSpec s;
  s.n = n;
  s.x_center = x_center;
  s.x_extent = x_extent;
  s.nodes_x = nodes;
  s.nodes_t = nodes_t;
  s.delta = delta;
  s.t_max = t_max;
  return s;
}

ProblemData Config::problem() const { return ProblemData::make(n, phi, H, base_point); }

Config parse_config(const json& j) {
  only_keys(j, "config",
            {"n", "phi", "H", "base_point", "jet_order", "expansion_order", "c_global", "domain", "grid", "newton",
             "fit", "boundary", "exact", "verify", "inputs", "seed"});
  Config c;
  read_int(j, "", "n", c.n);
  if (c.n < 2 || c.n > 8) throw ConfigError("n: must lie in [2, 8]");
  read(j, "", "phi", c.phi);
  read(j, "", "H", c.H);
  read(j, "", "base_point", c.base_point);
  if (c.base_point.empty()) c.base_point.assign(c.n - 1, 0.0);
  if (static_cast<int>(c.base_point.size()) != c.n - 1) throw ConfigError("base_point: needs n - 1 entries");
  read_int(j, "", "expansion_order", c.expansion_order);
  if (c.expansion_order == 0) c.expansion_order = c.n + 1;
  if (c.expansion_order < 1) throw ConfigError("expansion_order: must be >= 1");
  read_int(j, "", "jet_order", c.jet_order);
  const int k = std::max(c.expansion_order, c.n + 1);
  if (c.jet_order == 0) c.jet_order = std::max(k + 3, c.n + 4);
  if (c.jet_order < std::max(k + 2, c.n + 3))
    throw ConfigError("jet_order: must be >= max(expansion_order + 2, n + 3) = " +
                      std::to_string(std::max(k + 2, c.n + 3)));
  read(j, "", "c_global", c.c_global);
  read(j, "", "boundary", c.boundary);
  if (c.boundary != "expansion" && c.boundary != "exact") throw ConfigError("boundary: expected expansion or exact");

  if (j.contains("exact")) {
    const json& e = j.at("exact");
    only_keys(e, "exact", {"kind", "a", "p", "c", "center", "y_offset", "height", "radius", "branch"});
    ExactConfig ec;
    read(e, "exact", "kind", ec.kind);
    if (ec.kind != "plane" && ec.kind != "sphere") throw ConfigError("exact.kind: expected plane or sphere");
    read(e, "exact", "a", ec.a);
    read(e, "exact", "p", ec.p);
    read(e, "exact", "c", ec.c);
    read(e, "exact", "center", ec.center);
    read(e, "exact", "y_offset", ec.y_offset);
    read(e, "exact", "height", ec.height);
    read(e, "exact", "radius", ec.radius);
    read_int(e, "exact", "branch", ec.branch);
    if (ec.branch != 1 && ec.branch != -1) throw ConfigError("exact.branch: expected 1 or -1");
    if (ec.kind == "plane" && ec.p.empty()) ec.p.assign(c.n - 1, 0.0);
    ExactSolution sol = [&] {
      try {
        return ec.build(c.n);
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& err) {
        throw ConfigError(std::string("exact: ") + err.what());
      }
    }();
    if (!c.phi.empty() || !c.H.empty()) throw ConfigError("phi/H: not allowed together with exact");
    c.phi = sol.phi_expr();
    c.H = sol.H_expr();
    c.exact = ec;
  } else if (c.boundary == "exact") {
    throw ConfigError("boundary: exact needs an exact block");
  }
  if (c.phi.empty()) throw ConfigError("phi: required");
  if (c.H.empty()) throw ConfigError("H: required");

  if (j.contains("domain")) {
    const json& d = j.at("domain");
    only_keys(d, "domain", {"x_center", "x_extent", "t_max", "delta"});
    read(d, "domain", "x_center", c.x_center);
    read(d, "domain", "x_extent", c.x_extent);
    read(d, "domain", "t_max", c.t_max);
    read(d, "domain", "delta", c.delta);
  }
  if (c.x_center.empty()) c.x_center = c.base_point;
  if (static_cast<int>(c.x_center.size()) != c.n - 1) throw ConfigError("domain.x_center: needs n - 1 entries");
  positive(c.x_extent, "domain.x_extent");
  positive(c.delta, "domain.delta");
  if (!(c.t_max > c.delta)) throw ConfigError("domain.t_max: must exceed delta");

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    only_keys(g, "grid", {"nodes", "nodes_t"});
    read_int(g, "grid", "nodes", c.nodes);
    read_int(g, "grid", "nodes_t", c.nodes_t);
  }
  if (c.nodes_t == 0) c.nodes_t = c.nodes;
  if (c.nodes < 3 || c.nodes_t < 3) throw ConfigError("grid: at least 3 nodes per axis");

  if (j.contains("newton")) {
    const json& nw = j.at("newton");
    only_keys(nw, "newton", {"tol", "max_iter", "damping_factor", "min_step", "linear_solver_tol"});
    read(nw, "newton", "tol", c.newton.newton_tol);
    read_int(nw, "newton", "max_iter", c.newton.max_iter);
    read(nw, "newton", "damping_factor", c.newton.damping_factor);
    read(nw, "newton", "min_step", c.newton.min_step);
    read(nw, "newton", "linear_solver_tol", c.newton.linear_solver_tol);
  }
  try {
    c.newton.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("newton: ") + e.what());
  }

  if (j.contains("fit")) {
    const json& f = j.at("fit");
    only_keys(f, "fit",
              {"window", "log_threshold", "x_window", "orders", "drop_global", "gradient_point", "global_window",
               "extra_terms", "max_condition"});
    read_pair(f, "fit", "window", c.fit.window);
    read(f, "fit", "log_threshold", c.fit.log_threshold);
    read(f, "fit", "x_window", c.fit.x_window);
    read(f, "fit", "orders", c.fit.orders);
    read(f, "fit", "drop_global", c.fit.drop_global);
    if (f.contains("gradient_point")) {
      std::vector<double> g;
      read(f, "fit", "gradient_point", g);
      if (static_cast<int>(g.size()) != c.n - 1) throw ConfigError("fit.gradient_point: needs n - 1 entries");
      c.fit.gradient_point = g;
    }
    read_pair(f, "fit", "global_window", c.fit.global_window);
    read_int(f, "fit", "extra_terms", c.fit.extra_terms);
    read(f, "fit", "max_condition", c.fit.max_condition);
  }
  if (!(c.fit.log_threshold > 0.0 && c.fit.log_threshold < 1.0)) throw ConfigError("fit.log_threshold: must lie in (0, 1)");
  if (!(c.fit.x_window > 0.0 && c.fit.x_window <= 1.0)) throw ConfigError("fit.x_window: must lie in (0, 1]");
  if (c.fit.extra_terms < 0) throw ConfigError("fit.extra_terms: must be >= 0");
  positive(c.fit.max_condition, "fit.max_condition");
  for (int o : c.fit.orders)
    if (o < 1 || o > k) throw ConfigError("fit.orders: entries must lie in [1, expansion_order]");

  if (j.contains("verify")) {
    const json& v = j.at("verify");
    only_keys(v, "verify", {"suite", "trials"});
    read(v, "verify", "suite", c.verify.suite);
    read_int(v, "verify", "trials", c.verify.trials);
  }
  if (j.contains("inputs")) {
    const json& in = j.at("inputs");
    only_keys(in, "inputs", {"solution", "expansion"});
    read(in, "inputs", "solution", c.solution_path);
    read(in, "inputs", "expansion", c.expansion_path);
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }

  try {
    parse(c.phi, c.n - 1);
    parse(c.H, c.n - 1);
    if (c.c_global != "zero" && c.c_global != "fit") parse(c.c_global, c.n - 1);
    ProblemData::make(c.n, c.phi, c.H, c.base_point);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("expression: ") + e.what());
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  check_H_lattice(c);
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

void check_H_lattice(const Config& c, int per_axis) {
  Expr H = parse(c.H, c.n - 1);
  const int d = c.n - 1;
  std::vector<int> idx(d + 1, 0);
  auto check = [&](std::span<const double> x, double t) {
    double h = eval_real(H, x, t);
    if (!(std::fabs(h) < 1.0)) {
      std::string where;
      for (double v : x) where += std::to_string(v) + ",";
      throw ConfigError("H: |H| = " + std::to_string(std::fabs(h)) + " >= 1 at (" + where + std::to_string(t) + ")");
    }
  };
  check(c.base_point, 0.0);
  for (;;) {
    std::vector<double> x(d);
    for (int a = 0; a < d; ++a) x[a] = c.x_center[a] - c.x_extent + 2.0 * c.x_extent * idx[a] / (per_axis - 1);
    double t = c.t_max * idx[d] / (per_axis - 1);
    check(x, t);
    int a = 0;
    while (a <= d && ++idx[a] == per_axis) idx[a++] = 0;
    if (a > d) break;
  }
}

}  // namespace cmclab
