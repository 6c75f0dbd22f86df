#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cmclab/log_series.hpp"

using namespace cmclab;
using J = Jet<double>;
using L = LogSeries<double>;

namespace {

J cj(double v, int dim = 1, int order = 2) { return J::constant(dim, order, v); }

L mono(double v, int i, int j, int K = 5, int cap = 2) { return L::monomial(cj(v), i, j, K, cap); }

L random_series(std::mt19937_64& rng, int K, int cap, double c0) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  L s(2, 3, K, cap);
  for (int i = 0; i <= K; ++i)
    for (int j = 0; j <= (i == 0 ? 0 : cap); ++j) {
      J c(2, 3);
      for (Eigen::Index q = 0; q < c.coeffs().size(); ++q) c.coeffs()[q] = U(rng);
      s.set(i, j, c);
    }
  s.set(0, 0, s.coeff(0, 0) + c0);
  return s;
}

double dist(const L& a, const L& b) { return (a - b).max_abs(); }

// Keeps only terms whose log power stays within cap under products.
L log_free(L s) {
  for (int i = 0; i <= s.t_order(); ++i)
    for (int j = 1; j <= s.log_cap(); ++j) s.set(i, j, J(s.dim(), s.jet_order()));
  return s;
}

}  // namespace

TEST_CASE("products") {
  L p = mono(1, 1, 0) * mono(1, 1, 1);
  CHECK(p.coeff(2, 1).constant_term() == 1.0);
  CHECK(p.coeff(2, 0).is_zero());

  L one = L::constant(cj(1), 2, 1);
  L a = one + L::monomial(cj(1), 1, 0, 2, 1);
  L sq = a * a;
  CHECK(sq.coeff(0, 0).constant_term() == 1.0);
  CHECK(sq.coeff(1, 0).constant_term() == 2.0);
  CHECK(sq.coeff(2, 0).constant_term() == 1.0);
  CHECK(dist(a * one, a) == 0.0);

  CHECK_THROWS_AS(mono(1, 1, 0) * L(1, 3, 5, 2), StructuralError);
  CHECK_THROWS_AS(mono(1, 1, 2) * mono(1, 1, 1), LogCapOverflow);
  CHECK_THROWS_AS(mono(1, 1, 3), LogCapOverflow);
  CHECK_THROWS_AS(mono(1, 0, 1), SingularityError);
}

TEST_CASE("recip") {
  L one = L::constant(cj(1), 3, 3);
  L r = recip(one + mono(1, 1, 0, 3, 3));
  for (int i = 0; i <= 3; ++i) CHECK(r.coeff(i, 0).constant_term() == doctest::Approx(i % 2 ? -1.0 : 1.0));

  L r2 = recip(one + mono(1, 1, 1, 3, 3));
  CHECK(r2.coeff(1, 1).constant_term() == doctest::Approx(-1.0));
  CHECK(r2.coeff(2, 2).constant_term() == doctest::Approx(1.0));
  CHECK(r2.coeff(3, 3).constant_term() == doctest::Approx(-1.0));
  CHECK_THROWS_AS(recip(mono(1, 1, 0)), SingularityError);

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    L a = log_free(random_series(rng, 4, 4, 2.0));
    a.set(1, 1, J::constant(2, 3, 0.3));
    L id = L::constant(J::constant(2, 3, 1.0), 4, 4);
    CHECK(dist(a * recip(a), id) < 1e-12);
  }
}

TEST_CASE("sqrt") {
  L one = L::constant(cj(1), 2, 0);
  L s = sqrt(one + L::monomial(cj(2), 1, 0, 2, 0));
  CHECK(s.coeff(0, 0).constant_term() == doctest::Approx(1.0));
  CHECK(s.coeff(1, 0).constant_term() == doctest::Approx(1.0));
  CHECK(s.coeff(2, 0).constant_term() == doctest::Approx(-0.5));
  CHECK(sqrt(L::constant(cj(4), 2, 0)).coeff(0, 0).constant_term() == 2.0);
  CHECK_THROWS_AS(sqrt(L::constant(cj(-1), 2, 0)), SingularityError);

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    L a = log_free(random_series(rng, 4, 4, 2.0));
    a.set(2, 1, J::constant(2, 3, -0.4));
    L r = sqrt(a);
    CHECK(dist(r * r, a) < 1e-12);
    CHECK(dist(sqrt(recip(a)), recip(sqrt(a))) < 1e-12);
  }
}

TEST_CASE("dt") {
  L d = dt(mono(1, 3, 1));
  CHECK(d.t_order() == 4);
  CHECK(d.coeff(2, 1).constant_term() == 3.0);
  CHECK(d.coeff(2, 0).constant_term() == 1.0);
  CHECK(dt(L::constant(cj(4), 3, 1)).is_zero());
  for (int n = 2; n <= 4; ++n) {
    L r = dt(mono(1, n + 1, 1, 6, 1));
    CHECK(r.coeff(n, 1).constant_term() == n + 1);
    CHECK(r.coeff(n, 0).constant_term() == 1.0);
  }
  CHECK_THROWS_AS(dt(mono(1, 1, 1)), SingularityError);

  std::mt19937_64 rng(4);
  L a = log_free(random_series(rng, 4, 2, 0.0)), b = log_free(random_series(rng, 4, 2, 0.0));
  a.set(3, 1, J::constant(2, 3, 0.7));
  b.set(2, 1, J::constant(2, 3, -0.2));
  L lhs = dt(a * b);
  L rhs = dt(a) * b.with_t_order(3) + a.with_t_order(3) * dt(b);
  CHECK(dist(lhs, rhs) < 1e-12);
}

TEST_CASE("div_t and mul_t") {
  L q = div_by_t(mono(1, 2, 1));
  CHECK(q.coeff(1, 1).constant_term() == 1.0);
  CHECK(div_by_t(mono(1, 1, 0)).coeff(0, 0).constant_term() == 1.0);
  CHECK_THROWS_AS(div_by_t(L::constant(cj(1), 3, 1) + mono(1, 1, 0, 3, 1)), SingularityError);

  std::mt19937_64 rng(6);
  L a = random_series(rng, 3, 2, 0.0);
  CHECK(dist(div_by_t(mul_t(a)), a) == 0.0);
}

TEST_CASE("coefficients") {
  CHECK(mono(1, 2, 1).coeff(2, 1).constant_term() == 1.0);
  CHECK(mono(1, 2, 0).coeff(5, 0).is_zero());
  CHECK(mono(1, 2, 0).coeff(9, 0).is_zero());
  std::mt19937_64 rng(8);
  L a = random_series(rng, 3, 2, 0.0), b = random_series(rng, 3, 2, 0.0);
  CHECK(((a + b).coeff(2, 1) - a.coeff(2, 1) - b.coeff(2, 1)).max_abs() < 1e-15);
}

TEST_CASE("ring laws") {
  std::mt19937_64 rng(9);
  L a = log_free(random_series(rng, 4, 4, 0.0)), b = log_free(random_series(rng, 4, 4, 0.0));
  L c = log_free(random_series(rng, 4, 4, 0.0));
  a.set(1, 1, J::constant(2, 3, 0.5));
  b.set(2, 1, J::constant(2, 3, 0.5));
  CHECK(dist(a * b, b * a) < 1e-12);
  CHECK(dist((a * b) * c, a * (b * c)) < 1e-12);
  CHECK(dist(a * (b + c), a * b + a * c) < 1e-12);
}

TEST_CASE("tangential derivative") {
  L s(1, 3, 2, 1);
  J x = J::variable(1, 3, 0, 0.0);
  s.set(1, 1, x * x);
  L d = diff(s, 0);
  CHECK(d.jet_order() == 2);
  CHECK(d.coeff(1, 1).coeff({1}) == 2.0);
}

TEST_CASE("evaluate at base") {
  L s = L::constant(cj(1), 2, 1) + mono(2, 2, 1, 2, 1);
  double t = 0.3;
  CHECK(s.evaluate_at_base(t) == doctest::Approx(1 + 2 * t * t * std::log(t)));
}
