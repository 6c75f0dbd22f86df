#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cmclab/exact.hpp"
#include "cmclab/expansion.hpp"
#include "cmclab/operator.hpp"

using namespace cmclab;
using J = Jet<double>;
using L = LogSeries<double>;

namespace {

GridSpec spec2(int nodes, double delta = 0.1, double t_max = 0.6, double X = 0.3) {
  GridSpec s;
  s.n = 2;
  s.x_center = {0.0};
  s.x_extent = X;
  s.nodes_x = nodes;
  s.nodes_t = nodes;
  s.delta = delta;
  s.t_max = t_max;
  return s;
}

double sup(const GridField& g, bool interior = true) {
  double m = 0.0;
  for (int i = 0; i < g.size(); ++i)
    if (!interior || !g.on_boundary(i)) m = std::max(m, std::fabs(g[i]));
  return m;
}

L series_of(const std::string& u, int n, std::vector<double> base, int K, int O) {
  return L::from_taylor(eval_t_series(parse(u, n - 1), base, K, O), K, 1);
}

}  // namespace

TEST_CASE("linear solution annihilates t Q") {
  double c = 0.7;
  double H = c / std::sqrt(1 + c * c);
  char hs[40];
  std::snprintf(hs, sizeof hs, "%.17g", H);
  auto data = series_data(ProblemData::make(2, "0", hs), 4, 4);
  L u = series_of("0.7*t", 2, {0.0}, 3, 4);
  CHECK(tQ_series(u, data).max_abs() < 1e-15);
}

TEST_CASE("tilt covariance") {
  for (double a : {-1.0, 0.5})
    for (double p : {-0.4, 0.3})
      for (double c : {-0.5, 0.2}) {
        double H = c / std::sqrt(1 + p * p + 0.1 * 0.1 + c * c);
        char u[128], hs[40];
        std::snprintf(u, sizeof u, "%.17g + %.17g*x1 + 0.1*x2 + %.17g*t", a, p, c);
        std::snprintf(hs, sizeof hs, "%.17g", H);
        auto data = series_data(ProblemData::make(3, "0", hs), 4, 4);
        CHECK(tQ_series(series_of(u, 3, {0.2, -0.1}, 3, 4), data).max_abs() < 1e-14);
      }
}

TEST_CASE("c1 kills the t^0 coefficient") {
  auto pd = ProblemData::make(2, "0.3*sin(x1)", "0.4 + 0.2*x1");
  auto data = series_data(pd, 5, 3);
  auto c1 = detail::closed_form_c1(data);
  L u(1, 6, 1, 1);
  u.set(0, 0, data.phi.with_order(6));
  u.set(1, 0, c1.with_order(6));
  L r = tQ_series(u, data);
  CHECK(r.t_order() == 0);
  CHECK(r.coeff(0, 0).max_abs() < 1e-14);
}

TEST_CASE("translation equivariance") {
  auto d1 = series_data(ProblemData::make(2, "0.3*sin(x1)", "0.4"), 5, 4);
  auto d2 = series_data(ProblemData::make(2, "2 + 0.3*sin(x1)", "0.4"), 5, 4);
  L u1 = series_of("0.3*sin(x1) + 0.2*t + 0.1*t^2*x1", 2, {0.0}, 3, 5);
  L u2 = series_of("2 + 0.3*sin(x1) + 0.2*t + 0.1*t^2*x1", 2, {0.0}, 3, 5);
  CHECK((tQ_series(u1, d1) - tQ_series(u2, d2)).max_abs() < 1e-15);
}

TEST_CASE("budget errors") {
  auto data = series_data(ProblemData::make(2, "0", "0.2"), 3, 3);
  CHECK_THROWS_AS(tQ_series(L(1, 1, 2, 1), data), StructuralError);
  CHECK_THROWS_AS(tQ_series(L(1, 4, 0, 1), data), StructuralError);
  CHECK_THROWS_AS(tQ_series(L(2, 4, 2, 1), data), StructuralError);
}

TEST_CASE("grid residual on simple data") {
  auto pd = ProblemData::make(2, "0", "0.3");
  GridField z(spec2(9));
  GridField r = tQ_grid(z, pd);
  for (int i = 0; i < r.size(); ++i) CHECK(r[i] == doctest::Approx(0.6).epsilon(1e-15));

  auto plane = ExactSolution::plane(0.2, {0.5}, 0.4);
  auto pdp = ProblemData::make(2, plane.phi_expr(), plane.H_expr());
  CHECK(sup(tQ_grid(plane.sample(spec2(9)), pdp), false) < 1e-12);

  GridSpec tiny = spec2(9);
  tiny.nodes_x = 2;
  CHECK_THROWS_AS(GridField{tiny}, PreconditionError);
  CHECK_THROWS_AS(tQ_grid(z, ProblemData::make(2, "0", "1.2")), DomainError);
}

TEST_CASE("sphere residual converges at second order") {
  auto s = ExactSolution::sphere({0.0}, 0.0, 0.5, 1.0, -1);
  auto pd = ProblemData::make(2, s.phi_expr(), s.H_expr());
  std::vector<double> errs;
  for (int nodes : {17, 33, 65}) errs.push_back(sup(tQ_grid(s.sample(spec2(nodes)), pd), false));
  for (std::size_t i = 1; i < errs.size(); ++i) {
    double order = std::log2(errs[i - 1] / errs[i]);
    CHECK(order > 1.7);
    CHECK(order < 2.3);
  }
}

TEST_CASE("normal ODE defect") {
  auto plane = ExactSolution::plane(0.2, {0.5}, 0.4);
  auto pdp = ProblemData::make(2, plane.phi_expr(), plane.H_expr());
  GridField up = plane.sample(spec2(9));
  std::vector<double> c1(up.spec().columns(), 0.4);
  CHECK(sup(normal_ode_residual(up, pdp, c1), false) < 1e-10);

  auto s = ExactSolution::sphere({0.0}, 0.0, 0.5, 1.0, -1);
  auto pd = ProblemData::make(2, s.phi_expr(), s.H_expr());
  std::vector<double> errs;
  for (int nodes : {17, 33, 65}) {
    GridField u = s.sample(spec2(nodes));
    std::vector<double> c(u.spec().columns());
    for (int col = 0; col < u.spec().columns(); ++col) c[col] = s.gradient(u.column_point(col), 0.0)[1];
    GridField D = normal_ode_residual(u, pd, c);
    GridField R = tQ_grid(u, pd);
    double gap = 0.0;
    for (int i = 0; i < u.size(); ++i) {
      auto x = u.coordinates(i);
      double t = x.back();
      auto nd = node_derivatives(u, i);
      double Ann = curvature_coefficients(nd.grad)(1, 1);
      gap = std::max(gap, std::fabs(D[i] - R[i] / (t * Ann)));
    }
    CHECK(gap < 1e-10);
    errs.push_back(sup(D, false));
  }
  CHECK(std::log2(errs[0] / errs[1]) > 1.7);
  CHECK(std::log2(errs[1] / errs[2]) > 1.7);
}

TEST_CASE("series and grid agree") {
  std::string u = "0.3*sin(x1) + 0.5*t + 0.2*t^2*x1 - 0.1*t^3";
  auto pd = ProblemData::make(2, "0.3*sin(x1)", "0.3 + 0.1*t");
  const double t0 = 0.2;
  // Series value at (0, t0).
  auto data = series_data(pd, 3, 16);
  L us = series_of(u, 2, {0.0}, 16, 3);
  double ref = tQ_series(us, data).evaluate_at_base(t0);
  Expr ue = parse(u, 1);
  std::vector<double> errs;
  for (double h : {0.04, 0.02, 0.01}) {
    GridSpec g;
    g.n = 2;
    g.x_center = {0.0};
    g.x_extent = 2 * h;
    g.nodes_x = 5;
    g.delta = t0 - 2 * h;
    g.t_max = t0 + 2 * h;
    g.nodes_t = 5;
    GridField f(g);
    for (int i = 0; i < f.size(); ++i) {
      auto x = f.coordinates(i);
      f[i] = eval_real(ue, std::span<const double>(x.data(), 1), x[1]);
    }
    GridField r = tQ_grid(f, pd);
    errs.push_back(std::fabs(r[f.index({2, 2})] - ref));
  }
  CHECK(std::log2(errs[0] / errs[1]) == doctest::Approx(2.0).epsilon(0.15));
  CHECK(std::log2(errs[1] / errs[2]) == doctest::Approx(2.0).epsilon(0.15));
}
