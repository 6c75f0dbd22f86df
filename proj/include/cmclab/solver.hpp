#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "cmclab/exact.hpp"
#include "cmclab/expansion.hpp"
#include "cmclab/grid.hpp"
#include "cmclab/operator.hpp"

namespace cmclab {

struct SolveConfig {
  double newton_tol = 1e-10;
  int max_iter = 30;
  double damping_factor = 0.5;
  double min_step = 1e-4;
  double linear_solver_tol = 1e-10;

  void validate() const;
};

struct ConvergenceEntry {
  int iter = 0;
  double residual = 0.0;
  double step = 0.0;
};

/// Dirichlet values on every boundary node of the grid (interior entries are
/// ignored) and an optional initial iterate for the whole grid.
struct BoundarySpec {
  GridField values;
  std::optional<GridField> initial;
  bool top_approximate = false;
  std::string source;
};

/// Expansion tables solved at every grid column's x'. c_{i,j}(x') is read as
/// the constant term of the column's table.
struct ExpansionField {
  GridSpec spec;
  int k = 0;
  std::vector<ExpansionTable<double>> columns;

  double eval(int column, double t, int order, bool drop_global = false) const;
  double c1(int column) const { return columns[column].coeff(1, 0).constant_term(); }
  /// c_{n+1,0} per column.
  std::vector<double> global_values() const;
};

/// c_global per column: nullopt for the zero default, or a jet per column.
ExpansionField expansion_field(const ProblemData& data, const GridSpec& spec, int jet_order, int k,
                               const std::vector<std::optional<Jet<double>>>& c_global = {},
                               const std::string& global_source = "user");

/// u_k on all boundary faces (top face flagged approximate) and on the whole
/// grid as initial iterate.
BoundarySpec boundary_from_expansion(const ExpansionField& field, int order);
BoundarySpec boundary_from_exact(const ExactSolution& sol, const GridSpec& spec);

/// Residual F = t Q(u) at interior nodes (ordered by node index).
class DiscreteProblem {
 public:
  DiscreteProblem(const ProblemData& data, const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  int unknowns() const { return static_cast<int>(interior_.size()); }
  const std::vector<int>& interior() const { return interior_; }
  int unknown_of(int node) const { return unknown_[node]; }

  Eigen::VectorXd residual(const GridField& u) const;
  Eigen::SparseMatrix<double> jacobian(const GridField& u) const;
  Eigen::VectorXd jacobian_vector(const GridField& u, const Eigen::VectorXd& v) const;

  /// Interior values as a vector / written back into a field.
  Eigen::VectorXd gather(const GridField& u) const;
  void scatter(const Eigen::VectorXd& x, GridField& u) const;

 private:
  ProblemData data_;
  GridSpec spec_;
  GridField shape_;
  std::vector<int> interior_;
  std::vector<int> unknown_;
  std::vector<double> H_;
};

struct SolveResult {
  GridField u;
  std::vector<ConvergenceEntry> history;
  int iterations = 0;
  double residual = 0.0;
  std::vector<std::string> notes;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, GridField iterate, std::vector<ConvergenceEntry> history)
      : Error(what), iterate_(std::move(iterate)), history_(std::move(history)) {}
  const GridField& iterate() const { return iterate_; }
  const std::vector<ConvergenceEntry>& history() const { return history_; }

 private:
  GridField iterate_;
  std::vector<ConvergenceEntry> history_;
};

/// Damped Newton on F(u) = t Q(u) = 0 at interior nodes.
SolveResult solve(const ProblemData& data, const GridSpec& spec, const BoundarySpec& boundary, const SolveConfig& cfg);

/// Linear-in-t interpolation between bottom and top faces at each column.
GridField interpolate_boundary(const GridField& boundary);

}  // namespace cmclab
