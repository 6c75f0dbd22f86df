#include "cmclab/io.hpp"

#include <fstream>
#include <sstream>

namespace cmclab {

using nlohmann::json;

json to_json(const Jet<double>& j) {
  json mons = json::array(), cs = json::array();
  const auto& b = j.basis();
  for (int i = 0; i < b.size(); ++i) {
    auto e = b.exponents(i);
    mons.push_back(std::vector<int>(e.begin(), e.end()));
    cs.push_back(j.coeffs()[i]);
  }
  return {{"dim", j.dim()}, {"order", j.order()}, {"monomials", mons}, {"coeffs", cs}};
}

Jet<double> jet_from_json(const json& j) {
  try {
    Jet<double> r(j.at("dim").get<int>(), j.at("order").get<int>());
    const auto& cs = j.at("coeffs");
    if (static_cast<int>(cs.size()) != r.basis().size()) throw StructuralError("jet coefficient count mismatch");
    for (int i = 0; i < r.basis().size(); ++i) r.coeffs()[i] = cs.at(i).get<double>();
    return r;
  } catch (const json::exception& e) {
    throw StructuralError(std::string("malformed jet: ") + e.what());
  }
}

json to_json(const ExpansionTable<double>& T) {
  json coeffs = json::object();
  for (const auto& [ij, c] : T.coeffs) coeffs[std::to_string(ij.first) + "," + std::to_string(ij.second)] = to_json(c);
  json probes = json::array();
  for (const auto& p : T.probes)
    probes.push_back({{"i", p.i}, {"j", p.j}, {"equation", {p.eq_i, p.eq_j}}, {"pivot", p.pivot},
                      {"affine_defect", p.affine_defect}});
  json out = {{"n", T.n},
              {"k", T.k},
              {"jet_order", T.jet_order},
              {"log_cap", T.log_cap},
              {"base_point", T.data.base_point},
              {"scale", T.data.phi.valid() ? T.scale() : 1.0},
              {"global_source", T.global_source},
              {"coefficients", coeffs},
              {"probes", probes},
              {"residual_order", T.residual_order ? json(*T.residual_order) : json(nullptr)},
              {"residual_below", T.residual_below},
              {"notices", T.notices}};
  return out;
}

ExpansionTable<double> table_from_json(const json& j) {
  try {
    ExpansionTable<double> T;
    T.n = j.at("n").get<int>();
    T.k = j.at("k").get<int>();
    T.jet_order = j.at("jet_order").get<int>();
    T.log_cap = j.at("log_cap").get<int>();
    T.data.n = T.n;
    T.data.base_point = j.at("base_point").get<std::vector<double>>();
    T.global_source = j.at("global_source").get<std::string>();
    for (auto it = j.at("coefficients").begin(); it != j.at("coefficients").end(); ++it) {
      int i = 0, jj = 0;
      char comma = 0;
      std::istringstream key(it.key());
      if (!(key >> i >> comma >> jj) || comma != ',') throw StructuralError("bad coefficient key '" + it.key() + "'");
      T.coeffs[{i, jj}] = jet_from_json(it.value());
    }
    if (!j.at("residual_order").is_null()) T.residual_order = j.at("residual_order").get<int>();
    T.residual_below = j.at("residual_below").get<double>();
    T.notices = j.at("notices").get<std::vector<std::string>>();
    return T;
  } catch (const json::exception& e) {
    throw StructuralError(std::string("malformed expansion table: ") + e.what());
  }
}

json to_json(const GridSpec& s) {
  return {{"n", s.n},         {"x_center", s.x_center}, {"x_extent", s.x_extent}, {"nodes_x", s.nodes_x},
          {"delta", s.delta}, {"t_max", s.t_max},       {"nodes_t", s.nodes_t}};
}

GridSpec grid_from_json(const json& j) {
  try {
    GridSpec s;
    s.n = j.at("n").get<int>();
    s.x_center = j.at("x_center").get<std::vector<double>>();
    s.x_extent = j.at("x_extent").get<double>();
    s.nodes_x = j.at("nodes_x").get<int>();
    s.delta = j.at("delta").get<double>();
    s.t_max = j.at("t_max").get<double>();
    s.nodes_t = j.at("nodes_t").get<int>();
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw StructuralError(std::string("malformed grid metadata: ") + e.what());
  }
}

json to_json(const ExpansionField& f) {
  json cols = json::array();
  for (const auto& T : f.columns) cols.push_back(to_json(T));
  return {{"grid", to_json(f.spec)}, {"k", f.k}, {"columns", cols}};
}

ExpansionField field_from_json(const json& j) {
  try {
    ExpansionField f;
    f.spec = grid_from_json(j.at("grid"));
    f.k = j.at("k").get<int>();
    for (const auto& c : j.at("columns")) f.columns.push_back(table_from_json(c));
    if (static_cast<int>(f.columns.size()) != f.spec.columns())
      throw StructuralError("expansion field has the wrong number of columns");
    return f;
  } catch (const json::exception& e) {
    throw StructuralError(std::string("malformed expansion field: ") + e.what());
  }
}

json to_json(const DecayReport& r) {
  json lv = json::array();
  for (const auto& l : r.levels) lv.push_back({{"t", l.t}, {"norm", l.norm}});
  return {{"levels", lv},
          {"fitted_exponent", r.fitted_exponent},
          {"std_error", r.std_error},
          {"log_flag", r.log_flag},
          {"log_exponent", r.log_exponent},
          {"fit_window", {r.fit_window.first, r.fit_window.second}},
          {"used_levels", r.used_levels},
          {"model_residual", r.model_residual},
          {"log_model_residual", r.log_model_residual},
          {"notices", r.notices}};
}

json to_json(const GlobalFit& f) {
  return {{"values", f.values},
          {"window", {f.window.first, f.window.second}},
          {"levels", f.levels},
          {"condition", f.max_condition}};
}

json to_json(const ConvergenceEntry& e) { return {{"iter", e.iter}, {"residual", e.residual}, {"step", e.step}}; }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("failed writing '" + path + "'");
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace cmclab
