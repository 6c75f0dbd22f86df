#include "cmclab/solver.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/SparseLU>

#include "cmclab/parallel.hpp"

namespace cmclab {

void SolveConfig::validate() const {
  if (!(newton_tol > 0.0)) throw PreconditionError("newton tol must be positive");
  if (!(damping_factor > 0.0 && damping_factor < 1.0)) throw PreconditionError("damping factor must lie in (0, 1)");
  if (!(min_step > 0.0 && min_step <= 1.0)) throw PreconditionError("min step must lie in (0, 1]");
  if (max_iter < 1) throw PreconditionError("max_iter must be >= 1");
  if (!(linear_solver_tol > 0.0)) throw PreconditionError("linear solver tol must be positive");
}

double ExpansionField::eval(int column, double t, int order, bool drop_global) const {
  return eval_uk(columns[column], order, {}, t, drop_global);
}

std::vector<double> ExpansionField::global_values() const {
  std::vector<double> v;
  v.reserve(columns.size());
  for (const auto& T : columns) v.push_back(T.coeff(T.n + 1, 0).constant_term());
  return v;
}

ExpansionField expansion_field(const ProblemData& data, const GridSpec& spec, int jet_order, int k,
                               const std::vector<std::optional<Jet<double>>>& c_global,
                               const std::string& global_source) {
  spec.validate();
  if (spec.n != data.n) throw StructuralError("grid dimension does not match problem");
  ExpansionField f;
  f.spec = spec;
  f.k = std::max(k, data.n + 1);
  GridField probe(spec);
  const int cols = spec.columns();
  if (!c_global.empty() && static_cast<int>(c_global.size()) != cols)
    throw StructuralError("c_global needs one entry per column");
  f.columns.resize(cols);
  parallel_for(cols, [&](int col) {
    ProblemData at = data;
    at.base_point = probe.column_point(col);
    std::optional<Jet<double>> g = c_global.empty() ? std::nullopt : c_global[col];
    f.columns[col] = expand(at, jet_order, f.k, g, global_source);
  });
  return f;
}

BoundarySpec boundary_from_expansion(const ExpansionField& field, int order) {
  if (order < 1 || order > field.k) throw PreconditionError("boundary order outside the expansion range");
  BoundarySpec b;
  b.values = GridField(field.spec);
  GridField init(field.spec);
  for (int idx = 0; idx < init.size(); ++idx) {
    double t = field.spec.t(init.t_index_of(idx));
    init[idx] = field.eval(init.column_of(idx), t, order);
    if (init.on_boundary(idx)) b.values[idx] = init[idx];
  }
  b.initial = std::move(init);
  b.top_approximate = true;
  b.source = "expansion u_" + std::to_string(order);
  return b;
}

BoundarySpec boundary_from_exact(const ExactSolution& sol, const GridSpec& spec) {
  BoundarySpec b;
  b.values = sol.sample(spec);
  b.top_approximate = false;
  b.source = sol.kind() == ExactSolution::Kind::Plane ? "exact plane" : "exact sphere";
  return b;
}

GridField interpolate_boundary(const GridField& boundary) {
  GridField u = boundary;
  const auto& s = boundary.spec();
  for (int col = 0; col < s.columns(); ++col) {
    double lo = boundary[u.node(col, 0)], hi = boundary[u.node(col, s.nodes_t - 1)];
    for (int it = 0; it < s.nodes_t; ++it) {
      int idx = u.node(col, it);
      if (u.on_boundary(idx)) continue;
      double w = static_cast<double>(it) / (s.nodes_t - 1);
      u[idx] = (1.0 - w) * lo + w * hi;
    }
  }
  return u;
}

DiscreteProblem::DiscreteProblem(const ProblemData& data, const GridSpec& spec)
    : data_(data), spec_(spec), shape_(spec) {
  if (spec.n != data.n) throw StructuralError("grid dimension does not match problem");
  unknown_.assign(shape_.size(), -1);
  H_.assign(shape_.size(), 0.0);
  for (int idx = 0; idx < shape_.size(); ++idx) {
    auto x = shape_.coordinates(idx);
    double t = x.back();
    H_[idx] = data_.H_at(std::span<const double>(x.data(), x.size() - 1), t);
    if (!shape_.on_boundary(idx)) {
      unknown_[idx] = static_cast<int>(interior_.size());
      interior_.push_back(idx);
    }
  }
}

Eigen::VectorXd DiscreteProblem::gather(const GridField& u) const {
  Eigen::VectorXd x(unknowns());
  for (int k = 0; k < unknowns(); ++k) x[k] = u[interior_[k]];
  return x;
}

void DiscreteProblem::scatter(const Eigen::VectorXd& x, GridField& u) const {
  for (int k = 0; k < unknowns(); ++k) u[interior_[k]] = x[k];
}

Eigen::VectorXd DiscreteProblem::residual(const GridField& u) const {
  Eigen::VectorXd F(unknowns());
  const int n = spec_.n;
  parallel_for(unknowns(), [&](int k) {
    int idx = interior_[k];
    auto nd = node_derivatives(u, idx);
    double t = spec_.t(u.t_index_of(idx));
    F[k] = tQ_point(n, nd.grad, nd.hess, t, H_[idx]);
  });
  return F;
}

Eigen::SparseMatrix<double> DiscreteProblem::jacobian(const GridField& u) const {
  const int n = spec_.n;
  const auto shape = spec_.shape();
  std::vector<std::vector<Eigen::Triplet<double>>> rows(unknowns());
  parallel_for(unknowns(), [&](int k) {
    int idx = interior_[k];
    auto m = u.multi_index(idx);
    auto nd = node_derivatives(u, idx);
    const Eigen::VectorXd& p = nd.grad;
    const Eigen::MatrixXd& U = nd.hess;
    double t = spec_.t(m[n - 1]);
    double W = 1.0 + p.squaredNorm();
    double S = std::sqrt(W);
    Eigen::MatrixXd A = curvature_coefficients(p);
    Eigen::VectorXd Up = U * p;
    double pUp = p.dot(Up);
    std::map<int, double> row;
    std::vector<std::vector<std::pair<int, double>>> first(n);
    for (int a = 0; a < n; ++a) first[a] = first_derivative_stencil(shape[a], m[a], spec_.spacing(a));
    for (int a = 0; a < n; ++a) {
      double dFdp = t * (-2.0 * Up[a] / W + 2.0 * p[a] * pUp / (W * W)) + n * H_[idx] * p[a] / S;
      if (a == n - 1) dFdp -= n;
      for (auto [off, w] : first[a]) row[idx + off * u.stride(a)] += dFdp * w;
      for (auto [off, w] : second_derivative_stencil(shape[a], m[a], spec_.spacing(a)))
        row[idx + off * u.stride(a)] += t * A(a, a) * w;
      for (int b = a + 1; b < n; ++b)
        for (auto [oa, wa] : first[a])
          for (auto [ob, wb] : first_derivative_stencil(shape[b], m[b], spec_.spacing(b)))
            row[idx + oa * u.stride(a) + ob * u.stride(b)] += 2.0 * t * A(a, b) * wa * wb;
    }
    for (auto [node, val] : row)
      if (unknown_[node] >= 0) rows[k].emplace_back(k, unknown_[node], val);
  });
  std::vector<Eigen::Triplet<double>> trips;
  for (auto& r : rows) trips.insert(trips.end(), r.begin(), r.end());
  Eigen::SparseMatrix<double> J(unknowns(), unknowns());
  J.setFromTriplets(trips.begin(), trips.end());
  return J;
}

Eigen::VectorXd DiscreteProblem::jacobian_vector(const GridField& u, const Eigen::VectorXd& v) const {
  return jacobian(u) * v;
}

SolveResult solve(const ProblemData& data, const GridSpec& spec, const BoundarySpec& boundary, const SolveConfig& cfg) {
  cfg.validate();
  spec.validate();
  if (boundary.values.size() != spec.size()) throw StructuralError("boundary data does not match the grid");
  SolveResult res;
  std::unique_ptr<DiscreteProblem> prob;
  try {
    prob = std::make_unique<DiscreteProblem>(data, spec);
  } catch (const DomainError& e) {
    throw PreconditionError(std::string("standing assumption violated: ") + e.what());
  }
  {
    GridField probe(spec);
    double hmax = 0.0;
    for (int idx = 0; idx < probe.size(); ++idx) {
      auto x = probe.coordinates(idx);
      hmax = std::max(hmax, std::fabs(eval_real(data.H, std::span<const double>(x.data(), x.size() - 1), x.back())));
    }
    if (hmax > 0.999) res.notes.push_back("warning: |H| reaches " + std::to_string(hmax) + ", close to 1");
  }
  for (int idx = 0; idx < boundary.values.size(); ++idx)
    if (!std::isfinite(boundary.values[idx])) throw PreconditionError("boundary data not finite");

  GridField u = boundary.initial ? *boundary.initial : interpolate_boundary(boundary.values);
  if (u.size() != spec.size()) throw StructuralError("initial iterate does not match the grid");
  for (int idx = 0; idx < u.size(); ++idx)
    if (u.on_boundary(idx)) u[idx] = boundary.values[idx];
  if (boundary.top_approximate) res.notes.push_back("top-face data approximate (" + boundary.source + ")");

  Eigen::VectorXd F = prob->residual(u);
  double r = F.lpNorm<Eigen::Infinity>();
  res.history.push_back({0, r, 0.0});
  int it = 0;
  while (r > cfg.newton_tol) {
    if (it >= cfg.max_iter)
      throw NonConvergence("Newton did not reach tolerance in " + std::to_string(cfg.max_iter) + " iterations", u,
                           res.history);
    ++it;
    Eigen::SparseMatrix<double> J = prob->jacobian(u);
    J.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) throw NonConvergence("singular Jacobian", u, res.history);
    Eigen::VectorXd d = lu.solve(-F);
    if (lu.info() != Eigen::Success || !d.allFinite()) throw NonConvergence("linear solve failed", u, res.history);
    double lin = (J * d + F).lpNorm<Eigen::Infinity>();
    if (lin > cfg.linear_solver_tol * std::max(1.0, r))
      res.notes.push_back("iteration " + std::to_string(it) + ": linear residual " + std::to_string(lin));

    Eigen::VectorXd x = prob->gather(u);
    double lambda = 1.0;
    for (;;) {
      GridField trial = u;
      prob->scatter(x + lambda * d, trial);
      Eigen::VectorXd Ft;
      bool ok = true;
      try {
        Ft = prob->residual(trial);
        ok = Ft.allFinite();
      } catch (const Error&) {
        ok = false;
      }
      double rt = ok ? Ft.lpNorm<Eigen::Infinity>() : INFINITY;
      if (rt <= (1.0 - 1e-4 * lambda) * r || (ok && rt <= cfg.newton_tol)) {
        u = std::move(trial);
        F = std::move(Ft);
        r = rt;
        break;
      }
      lambda *= cfg.damping_factor;
      if (lambda < cfg.min_step) {
        std::ostringstream os;
        os << "Newton stagnated at residual " << r << " (step below " << cfg.min_step << ")";
        throw NonConvergence(os.str(), u, res.history);
      }
    }
    res.history.push_back({it, r, lambda});
  }
  res.u = std::move(u);
  res.iterations = it;
  res.residual = r;
  return res;
}

}  // namespace cmclab
