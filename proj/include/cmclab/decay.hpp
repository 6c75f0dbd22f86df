#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmclab/solver.hpp"

namespace cmclab {

struct Level {
  double t = 0.0;
  double norm = 0.0;
};

struct DecayReport {
  std::vector<Level> levels;
  double fitted_exponent = 0.0;
  double std_error = 0.0;
  bool log_flag = false;
  double log_exponent = 0.0;  // slope of the t^p log(1/t) model
  std::pair<double, double> fit_window{0.0, 0.0};
  int used_levels = 0;
  double model_residual = 0.0;      // power-law sum of squared residuals
  double log_model_residual = 0.0;  // log-augmented model
  std::vector<std::string> notices;
};

/// Central part of the tangential box, as a fraction of the half-extent.
struct XWindow {
  double fraction = 0.5;
};

/// sup over the x'-window of |u - u_k| at every interior t-level.
std::vector<Level> remainder(const GridField& u, const ExpansionField& field, int k, bool drop_global = false,
                             XWindow window = {});
/// Same with a second expansion subtracted as nuisance-free reference: |u - ref|.
std::vector<Level> sup_levels(const GridField& diff, XWindow window = {});

/// |D v| with v = u - phi - c_1 t at the column nearest x', per interior t-level.
std::vector<Level> gradient_levels(const GridField& u, const ExpansionField& field, const ProblemData& data,
                                   std::span<const double> x);

/// Least-squares slope of log(norm) against log(t). Without a window the two
/// smallest and two largest t are dropped. The log model fits
/// log(norm) - log(log(1/t)); log_flag is set when it lowers the residual by
/// at least log_threshold (relative).
DecayReport fit_exponent(std::vector<Level> levels, std::optional<std::pair<double, double>> window = std::nullopt,
                         double log_threshold = 0.25);

struct GlobalFit {
  std::vector<double> values;  // c_{n+1,0} per column
  std::vector<double> condition;
  std::pair<double, double> window{0.0, 0.0};
  int levels = 0;
  double max_condition = 0.0;
};

/// Per-column least squares of u - u_{n+1} (slot (n+1,0) dropped) on t^{n+1}
/// with nuisance terms t^i (log t)^j, n+2 <= i <= n+1+extra, j <= [(i-1)/n].
/// Throws PreconditionError when the scaled design is ill-conditioned.
GlobalFit fit_global_coefficient(const GridField& u, const ExpansionField& field,
                                 std::optional<std::pair<double, double>> window = std::nullopt, int extra = 3,
                                 double max_condition = 1e12);

/// Log-log plot of the levels with the fitted line.
std::string decay_svg(const DecayReport& r, const std::string& title);

}  // namespace cmclab
