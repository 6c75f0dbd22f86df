#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cmclab/decay.hpp"

using namespace cmclab;

namespace {

std::vector<Level> synthetic(double (*f)(double)) {
  std::vector<Level> v;
  for (int i = 0; i < 14; ++i) {
    double t = 0.01 * std::pow(1.3, i);
    v.push_back({t, f(t)});
  }
  return v;
}

GridSpec grid(int nodes_x, int nodes_t, double delta, double t_max, double X = 0.3) {
  GridSpec s;
  s.n = 2;
  s.x_center = {0.0};
  s.x_extent = X;
  s.nodes_x = nodes_x;
  s.nodes_t = nodes_t;
  s.delta = delta;
  s.t_max = t_max;
  return s;
}

}  // namespace

TEST_CASE("exponent fit on synthetic levels") {
  auto r = fit_exponent(synthetic([](double t) { return 3.0 * std::pow(t, 2.5); }));
  CHECK(r.fitted_exponent == doctest::Approx(2.5).epsilon(1e-12));
  CHECK_FALSE(r.log_flag);
  CHECK(r.used_levels == 10);
  CHECK(r.std_error < 1e-10);

  auto l = fit_exponent(synthetic([](double t) { return t * t * t * std::log(1.0 / t); }));
  CHECK(l.log_flag);
  CHECK(l.log_exponent == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(std::fabs(l.fitted_exponent - 3.0) < 0.6);

  auto c = fit_exponent(synthetic([](double) { return 0.7; }));
  CHECK(std::fabs(c.fitted_exponent) < 1e-12);
  CHECK_FALSE(c.log_flag);
}

TEST_CASE("exponent fit is scale equivariant and validates input") {
  auto lv = synthetic([](double t) { return std::pow(t, 1.7) * (1.0 + 0.3 * t); });
  auto a = fit_exponent(lv);
  for (auto& l : lv) l.norm *= 123.0;
  auto b = fit_exponent(lv);
  CHECK(a.fitted_exponent == doctest::Approx(b.fitted_exponent).epsilon(1e-12));

  auto w = fit_exponent(lv, std::make_pair(0.02, 0.1));
  CHECK(w.fit_window.first == 0.02);
  CHECK(w.used_levels >= 5);

  auto z = lv;
  z[5].norm = 0.0;
  auto rz = fit_exponent(z);
  CHECK(rz.notices.size() == 1);
  CHECK(rz.used_levels == 9);

  std::vector<Level> few(lv.begin(), lv.begin() + 8);
  CHECK_THROWS_AS(fit_exponent(few), PreconditionError);
}

TEST_CASE("remainder of an exact plane vanishes") {
  auto p = ExactSolution::plane(0.1, {0.3}, -0.4);
  auto pd = ProblemData::make(2, p.phi_expr(), p.H_expr());
  GridSpec g = grid(9, 33, 0.02, 0.4);
  auto field = expansion_field(pd, g, 6, 4);
  GridField u = p.sample(g);
  for (const auto& l : remainder(u, field, 4)) CHECK(l.norm < 1e-13);
  auto fit = fit_global_coefficient(u, field);
  for (double v : fit.values) CHECK(std::fabs(v) < 1e-8);

  GridSpec empty = g;
  empty.nodes_x = 4;
  GridField ue = p.sample(empty);
  auto fe = expansion_field(pd, empty, 6, 3);
  CHECK_NOTHROW(remainder(ue, fe, 3));
  CHECK_THROWS_AS(remainder(ue, fe, 3, false, XWindow{0.1}), PreconditionError);
}

TEST_CASE("global coefficient recovered from sphere samples") {
  auto s = ExactSolution::sphere({0.0}, 0.0, 0.5, 1.0, -1);
  auto pd = ProblemData::make(2, s.phi_expr(), s.H_expr());
  GridSpec g = grid(5, 81, 0.01, 0.41);
  auto field = expansion_field(pd, g, 7, 4);
  GridField u = s.sample(g);
  auto fit = fit_global_coefficient(u, field, std::make_pair(0.02, 0.2));
  for (int col = 1; col < g.columns() - 1; ++col) {
    auto x = u.column_point(col);
    auto tay = s.taylor_at_boundary(x, 5, 0);
    double oracle = tay.coeff(3, 0).constant_term();
    CHECK(std::fabs(fit.values[col] - oracle) < 1e-4);
  }

  std::vector<std::optional<Jet<double>>> cg;
  for (double v : fit.values) cg.push_back(Jet<double>::constant(1, 3, v));
  auto refit = expansion_field(pd, g, 7, 4, cg, "fit");
  auto before = fit_exponent(remainder(u, field, 3), std::make_pair(0.02, 0.2));
  auto after = fit_exponent(remainder(u, refit, 3), std::make_pair(0.02, 0.2));
  CHECK(before.fitted_exponent == doctest::Approx(3.0).epsilon(0.05));
  CHECK(after.fitted_exponent - before.fitted_exponent >= 0.8);

  auto lo = remainder(u, field, 1);
  auto hi = remainder(u, field, 2);
  for (std::size_t i = 0; i < lo.size(); ++i) CHECK(lo[i].norm >= hi[i].norm - 1e-14);
}

TEST_CASE("gradient levels and plot") {
  auto s = ExactSolution::sphere({0.0}, 0.0, 0.5, 1.0, -1);
  auto pd = ProblemData::make(2, s.phi_expr(), s.H_expr());
  GridSpec g = grid(21, 41, 0.02, 0.42);
  auto field = expansion_field(pd, g, 6, 3);
  GridField u = s.sample(g);
  std::vector<double> x0{0.0};
  auto r = fit_exponent(gradient_levels(u, field, pd, x0));
  CHECK(r.fitted_exponent == doctest::Approx(1.0).epsilon(0.1));
  auto svg = decay_svg(r, "gradient");
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("circle") != std::string::npos);
}
