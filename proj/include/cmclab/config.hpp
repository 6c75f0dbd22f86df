#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cmclab/exact.hpp"
#include "cmclab/grid.hpp"
#include "cmclab/operator.hpp"
#include "cmclab/solver.hpp"

namespace cmclab {

struct ExactConfig {
  std::string kind;  // plane | sphere
  double a = 0.0, c = 0.0;
  std::vector<double> p;
  std::vector<double> center;
  double y_offset = 0.0, height = 0.5, radius = 1.0;
  int branch = -1;

  ExactSolution build(int n) const;
};

struct FitConfig {
  std::optional<std::pair<double, double>> window;
  double log_threshold = 0.25;
  double x_window = 0.5;
  std::vector<int> orders;  // remainder orders; empty: 1, n + 1, k
  bool drop_global = false;
  std::optional<std::vector<double>> gradient_point;
  std::optional<std::pair<double, double>> global_window;
  int extra_terms = 3;
  double max_condition = 1e12;
};

struct VerifyConfig {
  std::string suite = "c31";
  int trials = -1;
};

struct Config {
  int n = 2;
  std::string phi;
  std::string H;
  std::vector<double> base_point;
  int jet_order = 0;
  int expansion_order = 0;
  std::string c_global = "zero";  // zero | fit | expression in x'
  std::vector<double> x_center;
  double x_extent = 0.5;
  double t_max = 0.42;
  double delta = 0.02;
  int nodes = 33;
  int nodes_t = 0;
  SolveConfig newton;
  FitConfig fit;
  std::string boundary = "expansion";  // expansion | exact
  std::optional<ExactConfig> exact;
  VerifyConfig verify;
  std::string solution_path;
  std::string expansion_path;
  std::uint64_t seed = 1;

  GridSpec grid() const;
  ProblemData problem() const;
  bool fit_global() const { return c_global == "fit"; }
  bool zero_global() const { return c_global == "zero"; }
};

/// Parses and validates; throws ConfigError with the offending key.
Config parse_config(const nlohmann::json& j);
Config load_config(const std::string& path);

/// |H| < 1 on a lattice over the box and base point; throws ConfigError.
void check_H_lattice(const Config& c, int per_axis = 9);

}  // namespace cmclab
