#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "cmclab/expr.hpp"
#include "cmclab/grid.hpp"
#include "cmclab/jet.hpp"
#include "cmclab/log_series.hpp"

namespace cmclab {

// The operator throughout is
//   t Q(u) = t (Delta u - u_i u_j u_ij / (1 + |Du|^2)) - n (u_t - H sqrt(1 + |Du|^2)),
// the graph of u over {t > 0} having mean curvature H in hyperbolic half-space.
// Sign convention for H: H_0 > 0 exactly when c_1 = du/dt(x', 0) > 0.

/// Boundary data phi(x') and mean curvature H(x', t) for dimension n.
struct ProblemData {
  int n = 2;
  Expr phi;
  Expr H;
  std::vector<double> base_point;

  /// Parses both expressions; phi must not depend on t.
  static ProblemData make(int n, std::string_view phi, std::string_view H, std::vector<double> base_point = {});

  int dim() const { return n - 1; }
  /// H at a point; DomainError unless |H| < 1.
  double H_at(std::span<const double> x, double t) const;
  double phi_at(std::span<const double> x) const;
};

/// Jet data at a base point: phi as a jet of order m and the t-Taylor
/// coefficients H_0, H_1, ... as jets of order m.
template <class Scalar>
struct SeriesData {
  int n = 2;
  Jet<Scalar> phi;
  std::vector<Jet<Scalar>> H;
  std::vector<double> base_point;

  int dim() const { return n - 1; }
  int jet_order() const { return phi.order(); }
  int H_depth() const { return static_cast<int>(H.size()) - 1; }
  /// max(1, largest input coefficient magnitude); tolerances scale by it.
  double scale() const {
    double s = std::max(1.0, phi.max_abs());
    for (const auto& h : H) s = std::max(s, h.max_abs());
    return s;
  }
  /// H as a log-series with the given t_order and jet order.
  LogSeries<Scalar> H_series(int t_order, int jet_order, int log_cap) const {
    if (t_order > H_depth()) throw StructuralError("H Taylor data too short for requested t-order");
    LogSeries<Scalar> s(dim(), jet_order, t_order, log_cap);
    for (int i = 0; i <= t_order; ++i) s.set(i, 0, H[i].with_order(jet_order));
    return s;
  }
  void validate() const {
    if (n < 2) throw PreconditionError("dimension n must be >= 2");
    if (phi.dim() != dim()) throw StructuralError("phi jet dimension must be n - 1");
    if (H.empty()) throw StructuralError("missing H data");
    double h0 = std::fabs(ScalarOps<Scalar>::to_double(H[0].constant_term()));
    if (!(h0 < 1.0)) throw DomainError("|H| < 1 violated at the base point");
  }
};

/// Evaluates phi and H at data.base_point as jets of order `jet_order`, with
/// H expanded to `t_order` in t.
SeriesData<double> series_data(const ProblemData& data, int jet_order, int t_order);

/// t Q(u) on a log-series. With u of t_order K and jet order O the result has
/// t_order K - 1 and jet order O - 2 (two tangential derivatives are consumed).
template <class S>
LogSeries<S> tQ_series(const LogSeries<S>& u, const SeriesData<S>& data) {
  const int K = u.t_order();
  const int O = u.jet_order();
  const int d = u.dim();
  const int cap = u.log_cap();
  if (d != data.dim()) throw StructuralError("series dimension does not match problem");
  if (O < 2) throw StructuralError("insufficient jet budget: t Q needs two tangential derivatives");
  if (K < 1) throw StructuralError("t Q needs a series of t_order >= 1");
  const int M = O - 2;
  auto jets = [&](const LogSeries<S>& s) { return s.with_jet_order(M).with_t_order(std::min(s.t_order(), K - 1)); };

  LogSeries<S> ut_full = dt(u);
  LogSeries<S> ut = jets(ut_full);
  LogSeries<S> utt = jets(dt(ut_full));
  std::vector<LogSeries<S>> ua(d), uat(d);
  std::vector<LogSeries<S>> ua_full(d);
  for (int a = 0; a < d; ++a) {
    ua_full[a] = diff(u, a);
    ua[a] = jets(ua_full[a]);
    uat[a] = jets(diff(ut_full, a));
  }

  LogSeries<S> one = LogSeries<S>::constant(Jet<S>::constant(d, M, S(1)), K - 1, cap);
  LogSeries<S> G = one + ut * ut;
  LogSeries<S> lap = utt;
  LogSeries<S> N = ut * ut * utt;
  for (int a = 0; a < d; ++a) {
    G = G + ua[a] * ua[a];
    N = N + S(2) * (ua[a] * ut * uat[a]);
    for (int b = 0; b < d; ++b) {
      LogSeries<S> uab = jets(diff(ua_full[a], b));
      if (a == b) lap = lap + uab;
      N = N + ua[a] * ua[b] * uab;
    }
  }
  LogSeries<S> root = sqrt(G);
  LogSeries<S> second = mul_t(lap - N * recip(G));
  LogSeries<S> Hs = data.H_series(K - 1, M, cap);
  LogSeries<S> first = S(static_cast<double>(data.n)) * (ut - Hs * root);
  return second - first;
}

/// A_ij(p) = delta_ij - p_i p_j / (1 + |p|^2).
Eigen::MatrixXd curvature_coefficients(const Eigen::VectorXd& p);

/// t Q at a point from the gradient p = (D_x' u, u_t) and Hessian.
double tQ_point(int n, const Eigen::VectorXd& p, const Eigen::MatrixXd& hess, double t, double H);

/// Discrete first and second derivatives at a grid node (centered inside,
/// one-sided second order on the boundary ring).
struct NodeDerivatives {
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};
NodeDerivatives node_derivatives(const GridField& u, int idx);

/// Pointwise t Q(u) on a grid.
GridField tQ_grid(const GridField& u, const ProblemData& data);

/// Defect of v_tt - (n/t) v_t - F with v = u - phi - c1 t, F the rearranged
/// tangential and nonlinear part. `c1` holds c_1 per grid column.
GridField normal_ode_residual(const GridField& u, const ProblemData& data, std::span<const double> c1);

}  // namespace cmclab
