#pragma once

#include <string>

#include <json.hpp>

#include "cmclab/decay.hpp"
#include "cmclab/expansion.hpp"
#include "cmclab/solver.hpp"

namespace cmclab {

/// {"dim", "order", "monomials": [[beta]...], "coeffs": [...]} in basis order.
nlohmann::json to_json(const Jet<double>& j);
Jet<double> jet_from_json(const nlohmann::json& j);

/// Coefficients keyed "i,j" with their jets, plus probes, notices and residual order.
nlohmann::json to_json(const ExpansionTable<double>& T);
/// Restores what evaluation needs (coefficients, orders, caps); input data is not stored.
ExpansionTable<double> table_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GridSpec& s);
GridSpec grid_from_json(const nlohmann::json& j);

/// Grid metadata plus one table per column.
nlohmann::json to_json(const ExpansionField& f);
ExpansionField field_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DecayReport& r);
nlohmann::json to_json(const GlobalFit& f);
nlohmann::json to_json(const ConvergenceEntry& e);

/// Pretty JSON with a trailing newline; throws Error when the file cannot be written.
void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace cmclab
