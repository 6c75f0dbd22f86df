#include "cmclab/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "cmclab/decay.hpp"
#include "cmclab/expr.hpp"
#include "cmclab/io.hpp"
#include "cmclab/suites.hpp"

namespace cmclab {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string out_path(const RunOptions& opt, const std::string& name) {
  fs::create_directories(opt.out_dir);
  return (fs::path(opt.out_dir) / name).string();
}

int global_jet_order(const Config& cfg) { return cfg.jet_order - cfg.n - 1; }

std::optional<Jet<double>> global_at(const Config& cfg, std::span<const double> x) {
  if (cfg.zero_global() || cfg.fit_global()) return std::nullopt;
  return eval_jet(parse(cfg.c_global, cfg.n - 1), x, 0.0, global_jet_order(cfg));
}

std::string global_source(const Config& cfg) {
  if (cfg.zero_global()) return "zero";
  if (cfg.fit_global()) return "fit";
  return "config expression";
}

std::vector<std::optional<Jet<double>>> column_globals(const Config& cfg, const GridSpec& spec) {
  std::vector<std::optional<Jet<double>>> g;
  if (cfg.zero_global() || cfg.fit_global()) return g;
  GridField probe(spec);
  for (int col = 0; col < spec.columns(); ++col) g.push_back(global_at(cfg, probe.column_point(col)));
  return g;
}

/// Jets of order <= 2 from values on the column lattice by centered differences.
std::vector<std::optional<Jet<double>>> jets_from_columns(const GridSpec& s, const std::vector<double>& v, int order) {
  const int d = s.dim();
  const int q = std::min(order, 2);
  std::vector<std::optional<Jet<double>>> out(s.columns());
  auto idx_of = [&](int col) {
    std::vector<int> m(d);
    for (int a = 0; a < d; ++a) {
      m[a] = col % s.nodes_x;
      col /= s.nodes_x;
    }
    return m;
  };
  auto col_of = [&](const std::vector<int>& m) {
    int c = 0;
    for (int a = d - 1; a >= 0; --a) c = c * s.nodes_x + m[a];
    return c;
  };
  const double h = s.h_prime();
  for (int col = 0; col < s.columns(); ++col) {
    Jet<double> j = Jet<double>::constant(d, order, v[col]);
    auto m = idx_of(col);
    std::vector<std::vector<std::pair<int, double>>> first(d);
    for (int a = 0; a < d; ++a) first[a] = first_derivative_stencil(s.nodes_x, m[a], h);
    if (q >= 1)
      for (int a = 0; a < d; ++a) {
        double g = 0.0;
        for (auto [off, w] : first[a]) {
          auto mm = m;
          mm[a] += off;
          g += w * v[col_of(mm)];
        }
        std::vector<int> beta(d, 0);
        beta[a] = 1;
        j.set_coeff(beta, g);
      }
    if (q >= 2)
      for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) {
          double hv = 0.0;
          if (a == b) {
            for (auto [off, w] : second_derivative_stencil(s.nodes_x, m[a], h)) {
              auto mm = m;
              mm[a] += off;
              hv += w * v[col_of(mm)];
            }
          } else {
            for (auto [oa, wa] : first[a])
              for (auto [ob, wb] : first[b]) {
                auto mm = m;
                mm[a] += oa;
                mm[b] += ob;
                hv += wa * wb * v[col_of(mm)];
              }
          }
          std::vector<int> beta(d, 0);
          beta[a] += 1;
          beta[b] += 1;
          j.set_coeff(beta, a == b ? 0.5 * hv : hv);
        }
    out[col] = j;
  }
  return out;
}

bool close(double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(b)); }

void check_compatible(const GridSpec& a, const GridSpec& b, const std::string& what) {
  bool ok = a.n == b.n && a.nodes_x == b.nodes_x && a.nodes_t == b.nodes_t && close(a.delta, b.delta) &&
            close(a.t_max, b.t_max) && close(a.x_extent, b.x_extent) && a.x_center.size() == b.x_center.size();
  for (std::size_t i = 0; ok && i < a.x_center.size(); ++i) ok = close(a.x_center[i], b.x_center[i]);
  if (!ok) throw ConfigError(what + ": grid metadata does not match");
}

json analysis(const Config& cfg, const GridField& u, const ExpansionField& field, const ProblemData& data,
              const RunOptions& opt, const std::string& tag, std::ostream& log) {
  const int n = cfg.n;
  struct Item {
    int order;
    bool drop;
  };
  std::vector<Item> items;
  if (cfg.fit.orders.empty()) {
    items.push_back({1, false});
    items.push_back({n + 1, true});
    if (field.k > n + 1) items.push_back({field.k, cfg.fit.drop_global});
  } else {
    for (int o : cfg.fit.orders) items.push_back({o, cfg.fit.drop_global});
  }
  XWindow xw{cfg.fit.x_window};
  json rems = json::array();
  for (const auto& it : items) {
    auto r = fit_exponent(remainder(u, field, it.order, it.drop, xw), cfg.fit.window, cfg.fit.log_threshold);
    log << "  sup|u - u_" << it.order << (it.drop ? ",local" : "") << "|: exponent " << r.fitted_exponent << " +/- "
        << r.std_error << (r.log_flag ? " (log factor)" : "") << "\n";
    rems.push_back({{"order", it.order}, {"local", it.drop}, {"report", to_json(r)}});
    if (opt.plot)
      write_text(out_path(opt, "decay" + tag + "_u" + std::to_string(it.order) + (it.drop ? "_local" : "") + ".svg"),
                 decay_svg(r, "sup|u - u_" + std::to_string(it.order) + "|"));
  }
  std::vector<double> gp = cfg.fit.gradient_point.value_or(cfg.x_center);
  auto gr = fit_exponent(gradient_levels(u, field, data, gp), cfg.fit.window, cfg.fit.log_threshold);
  log << "  |Dv| at x' = (" << gp[0] << (gp.size() > 1 ? ", ..." : "") << "): exponent " << gr.fitted_exponent
      << " +/- " << gr.std_error << "\n";
  if (opt.plot) write_text(out_path(opt, "decay" + tag + "_gradient.svg"), decay_svg(gr, "|Dv|"));
  return {{"remainders", rems},
          {"gradient", {{"point", gp}, {"report", to_json(gr)}}},
          {"x_window", cfg.fit.x_window},
          {"unverified",
           {"Hoelder seminorms of u - u_k in x' (not resolvable on desk-scale grids)",
            "derivative bounds of order m >= 1 beyond first differences", "constants C of the decay estimates"}}};
}

/// Fit c_{n+1,0}, re-expand with it, and analyze again.
json fit_and_reanalyze(const Config& cfg, const GridField& u, const ExpansionField& field, const ProblemData& data,
                       const RunOptions& opt, std::ostream& log) {
  auto gf = fit_global_coefficient(u, field, cfg.fit.global_window, cfg.fit.extra_terms, cfg.fit.max_condition);
  log << "fitted c_{" << cfg.n + 1 << ",0} on " << gf.levels << " levels (condition " << gf.max_condition << ")\n";
  auto refit = expansion_field(data, field.spec, cfg.jet_order, field.k,
                               jets_from_columns(field.spec, gf.values, global_jet_order(cfg)), "fit");
  write_json(out_path(opt, "expansion_field_fit.json"), to_json(refit));
  log << "analysis with fitted global coefficient:\n";
  json rep = analysis(cfg, u, refit, data, opt, "_fit", log);
  return {{"global_fit", to_json(gf)}, {"analysis", rep}};
}

double lower_half_error(const GridField& u, const ExactSolution& s) {
  double e = 0.0;
  const auto& g = u.spec();
  for (int idx = 0; idx < u.size(); ++idx) {
    if (u.on_boundary(idx)) continue;
    auto x = u.coordinates(idx);
    double t = x.back();
    if (t > 0.5 * (g.delta + g.t_max)) continue;
    x.pop_back();
    e = std::max(e, std::fabs(u[idx] - s.value(x, t)));
  }
  return e;
}

void write_history(const RunOptions& opt, const std::vector<ConvergenceEntry>& h) {
  std::string s;
  for (const auto& e : h) s += to_json(e).dump() + "\n";
  write_text(out_path(opt, "convergence.jsonl"), s);
}

}  // namespace

void cmd_expand(const Config& cfg, const RunOptions& opt, std::ostream& log) {
  auto data = cfg.problem();
  const int n = cfg.n;
  auto g = global_at(cfg, cfg.base_point);
  auto T = expand(data, cfg.jet_order, cfg.expansion_order, g, global_source(cfg));
  if (cfg.fit_global()) T.notices.push_back("c_global = fit needs a solution; run solve or analyze");
  json out = to_json(T);
  out["report"] = {{"residual_order", out["residual_order"]},
                   {"resonance", {{"slot", {n + 1, 0}}, {"pivot", 0.0}, {"global_source", T.global_source}}}};
  write_json(out_path(opt, "expansion.json"), out);
  log << "expansion n=" << n << " k=" << T.k << " jet_order=" << T.jet_order << " log_cap=" << T.log_cap << "\n";
  log << "c_1 = " << T.coeff(1, 0).constant_term() << "\n";
  if (T.residual_order)
    log << "residual t Q(u_" << T.k << ") vanishes below t^" << *T.residual_order << " (max "
        << T.residual_below << ")\n";
  else
    log << "residual t Q(u_" << T.k << ") vanishes through the computed orders\n";
  log << "resonance at (" << n + 1 << ",0): pivot 0, c_{" << n + 1 << ",0} free (" << T.global_source << ")\n";
  for (const auto& s : T.notices) log << "notice: " << s << "\n";
}

void cmd_solve(const Config& cfg, const RunOptions& opt, std::ostream& log) {
  auto data = cfg.problem();
  GridSpec spec = cfg.grid();
  spec.validate();
  std::optional<ExactSolution> sol;
  if (cfg.exact) sol = cfg.exact->build(cfg.n);
  std::optional<ExpansionField> field;
  BoundarySpec b;
  if (cfg.boundary == "exact") {
    b = boundary_from_exact(*sol, spec);
  } else {
    field = expansion_field(data, spec, cfg.jet_order, cfg.expansion_order, column_globals(cfg, spec),
                            global_source(cfg));
    b = boundary_from_expansion(*field, field->k);
    write_json(out_path(opt, "expansion_field.json"), to_json(*field));
  }
  SolveResult res;
  try {
    res = solve(data, spec, b, cfg.newton);
  } catch (const NonConvergence& e) {
    write_history(opt, e.history());
    write_csv(out_path(opt, "solution_failed.csv"), e.iterate());
    throw;
  }
  write_csv(out_path(opt, "solution.csv"), res.u);
  write_history(opt, res.history);
  json summary = {{"grid", to_json(spec)},
                  {"boundary", b.source},
                  {"top_face_approximate", b.top_approximate},
                  {"iterations", res.iterations},
                  {"residual", res.residual},
                  {"notes", res.notes},
                  {"error_region", "interior lower half-domain"}};
  log << "solve: " << res.iterations << " Newton iterations, residual " << res.residual << "\n";
  for (const auto& s : res.notes) log << "note: " << s << "\n";
  if (sol) {
    double e = lower_half_error(res.u, *sol);
    summary["lower_half_error"] = e;
    log << "sup error on the lower half-domain: " << e << "\n";
  }
  if (field && cfg.fit_global()) {
    log << "analysis with zero global coefficient:\n";
    json rep = analysis(cfg, res.u, *field, data, opt, "", log);
    json fit = fit_and_reanalyze(cfg, res.u, *field, data, opt, log);
    write_json(out_path(opt, "decay_report.json"), {{"zero_global", rep}, {"fit", fit}});
  }
  write_json(out_path(opt, "solve.json"), summary);
}

void cmd_analyze(const Config& cfg, const RunOptions& opt, std::ostream& log) {
  if (cfg.solution_path.empty() || cfg.expansion_path.empty())
    throw ConfigError("inputs: analyze needs inputs.solution and inputs.expansion");
  GridField u = read_csv(cfg.solution_path);
  ExpansionField field = field_from_json(read_json(cfg.expansion_path));
  check_compatible(u.spec(), field.spec, "solution vs expansion");
  check_compatible(u.spec(), cfg.grid(), "solution vs config");
  if (field.columns.front().n != cfg.n) throw ConfigError("expansion: dimension does not match config");
  auto data = cfg.problem();
  log << "analysis:\n";
  json out = {{"analysis", analysis(cfg, u, field, data, opt, "", log)}};
  if (cfg.fit_global()) out["fit"] = fit_and_reanalyze(cfg, u, field, data, opt, log);
  write_json(out_path(opt, "decay_report.json"), out);
}

bool cmd_verify(const Config& cfg, const RunOptions& opt, std::ostream& log) {
  std::uint64_t seed = opt.seed.value_or(cfg.seed);
  auto r = run_suite(cfg.verify.suite, seed, cfg.verify.trials);
  json out = r.to_json();
  out["seed"] = seed;
  write_json(out_path(opt, "verify.json"), out);
  log << "verify " << r.name << ": " << (r.pass ? "PASS" : "FAIL") << "\n";
  return r.pass;
}

void cmd_exact(const Config& cfg, const RunOptions& opt, std::ostream& log) {
  if (!cfg.exact) throw ConfigError("exact: block required");
  auto sol = cfg.exact->build(cfg.n);
  GridSpec spec = cfg.grid();
  spec.validate();
  write_csv(out_path(opt, "exact.csv"), sol.sample(spec));
  const int k = cfg.n + 3, m = k + 2;
  auto ts = sol.taylor_at_boundary(cfg.base_point, k, m, default_log_cap(k, cfg.n));
  json tay = json::object();
  for (int i = 0; i <= k; ++i) tay[std::to_string(i)] = to_json(ts.coeff(i, 0).truncated(m - i));
  json out = {{"kind", cfg.exact->kind}, {"H", sol.H()},     {"phi", sol.phi_expr()},
              {"H_expr", sol.H_expr()}, {"grid", to_json(spec)}, {"base_point", cfg.base_point},
              {"taylor", tay}};
  write_json(out_path(opt, "exact.json"), out);
  log << "exact " << cfg.exact->kind << ": H = " << sol.H() << ", phi = " << sol.phi_expr() << "\n";
}

int run_command(const std::string& command, const std::string& config_path, const RunOptions& opt, std::ostream& log,
                std::ostream& err) {
  static const std::set<std::string> known{"expand", "solve", "analyze", "verify", "exact"};
  if (!known.count(command)) {
    err << "error: unknown command '" << command << "'\n";
    return kConfigError;
  }
  Config cfg;
  try {
    cfg = load_config(config_path);
    if (opt.seed) cfg.seed = *opt.seed;
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    if (command == "expand") cmd_expand(cfg, opt, log);
    else if (command == "solve") cmd_solve(cfg, opt, log);
    else if (command == "analyze") cmd_analyze(cfg, opt, log);
    else if (command == "exact") cmd_exact(cfg, opt, log);
    else if (!cmd_verify(cfg, opt, log)) return kNumericalFailure;
    return kSuccess;
  } catch (const ConfigError& e) {
    err << command << ": config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ParseError& e) {
    err << command << ": expression error: " << e.what() << "\n";
    return kConfigError;
  } catch (const PreconditionError& e) {
    err << command << ": precondition: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    err << command << ": domain: " << e.what() << "\n";
    return kConfigError;
  } catch (const StructuralError& e) {
    err << command << ": input: " << e.what() << "\n";
    return kConfigError;
  } catch (const NonConvergence& e) {
    err << command << ": nonconvergence: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const Error& e) {
    err << command << ": numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const fs::filesystem_error& e) {
    err << command << ": " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace cmclab
