#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cmclab/expansion.hpp"

using namespace cmclab;

namespace {

std::string poly_phi(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  std::string s = "0";
  char buf[64];
  for (int a = 0; a < dim; ++a)
    for (int p = 1; p <= 5; ++p) {
      std::snprintf(buf, sizeof buf, " + %.6f*x%d^%d", U(rng), a + 1, p);
      s += buf;
    }
  if (dim > 1) {
    std::snprintf(buf, sizeof buf, " + %.6f*x1*x2", U(rng));
    s += buf;
  }
  return s;
}

std::string poly_H(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> U(-0.2, 0.2);
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.6f + %.6f*t + %.6f*x1 + %.6f*t^2 + %.6f*t*x%d", U(rng) * 2, U(rng), U(rng), U(rng),
                U(rng), dim);
  return buf;
}

}  // namespace

TEST_CASE("c1 for flat boundary") {
  auto data = ProblemData::make(2, "0", "0.6");
  auto T = expand(data, 5, 3);
  CHECK(T.coeff(1, 0).constant_term() == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(T.coeff(2, 0).max_abs() < 1e-13);
  CHECK(T.coeff(3, 1).max_abs() < 1e-12);
}

TEST_CASE("tilted plane is reproduced") {
  for (int n = 2; n <= 4; ++n) {
    double c = 0.4;
    double p2 = 0.3 * 0.3 + (n > 2 ? 0.2 * 0.2 : 0.0);
    double H = c / std::sqrt(1 + p2 + c * c);
    std::string phi = n > 2 ? "0.1 + 0.3*x1 - 0.2*x2" : "0.1 + 0.3*x1";
    char hs[64];
    std::snprintf(hs, sizeof hs, "%.17g", H);
    auto T = expand(ProblemData::make(n, phi, hs), n + 4, n + 2);
    CHECK(T.coeff(1, 0).constant_term() == doctest::Approx(c).epsilon(1e-13));
    for (const auto& [ij, jet] : T.coeffs)
      if (ij.first >= 2) CHECK(jet.max_abs() < 1e-12);
    CHECK_FALSE(T.residual_order.has_value());
  }
}

TEST_CASE("pivots follow the indicial polynomial") {
  for (int n = 2; n <= 4; ++n) {
    double H0 = 0.35;
    char hs[32];
    std::snprintf(hs, sizeof hs, "%.17g", H0);
    auto T = expand(ProblemData::make(n, n > 2 ? "0.2*sin(x1) + 0.1*x2^2" : "0.2*sin(x1)", hs), n + 5, n + 3);
    for (const auto& pr : T.probes) {
      if (pr.i == n + 1 && pr.j == 0) {
        CHECK(std::fabs(pr.pivot) < 1e-12);
      } else if (pr.i == n + 1 && pr.j == 1) {
        CHECK(pr.pivot == doctest::Approx((1 - H0 * H0) * (n + 1)).epsilon(1e-10));
      } else if (pr.j == 0) {
        CHECK(pr.pivot == doctest::Approx(-(1 - H0 * H0) * pr.i * (n + 1 - pr.i)).epsilon(1e-8));
      }
      CHECK(pr.affine_defect < 1e-10);
    }
  }
}

TEST_CASE("closed form c2 agrees with the probe solve") {
  std::mt19937_64 rng(21);
  for (int n = 2; n <= 4; ++n) {
    for (int trial = 0; trial < 4; ++trial) {
      auto data = ProblemData::make(n, poly_phi(rng, n - 1), poly_H(rng, n - 1));
      auto T = expand(data, n + 3, n + 1);
      auto c1 = detail::closed_form_c1(T.data);
      CHECK((c1 - T.coeff(1, 0)).max_abs() <= 1e-10 * std::max(1.0, c1.max_abs()));
      auto c2 = closed_form_c2(T.data, c1);
      CHECK((c2 - T.coeff(2, 0)).max_abs() <= 1e-10 * std::max(1.0, c2.max_abs()));
      if (n != 2) {
        auto literal = closed_form_c2(T.data, c1, true);
        CHECK((literal - T.coeff(2, 0)).max_abs() > 1e-6);
      }
    }
  }
}

TEST_CASE("residual order of the local expansion") {
  std::mt19937_64 rng(22);
  for (int n = 2; n <= 4; ++n) {
    auto data = ProblemData::make(n, poly_phi(rng, n - 1), poly_H(rng, n - 1));
    auto T = expand(data, n + 3, n + 1);
    REQUIRE(T.residual_order.has_value());
    CHECK(*T.residual_order == n + 1);
    auto r = residual_series(T, n + 1);
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= r.log_cap(); ++j) CHECK(r.coeff(i, j).max_abs() < 1e-9 * T.scale());
  }
}

TEST_CASE("continuation populates log slots") {
  auto T = expand(ProblemData::make(2, "0.2*sin(x1)", "0.3 + 0.1*t"), 7, 5);
  CHECK(T.has(3, 1));
  CHECK(T.has(4, 1));
  CHECK(T.has(5, 1));
  CHECK(T.has(5, 2));
  CHECK_FALSE(T.has(4, 2));
  CHECK(T.global_source == "zero (default)");
  CHECK_FALSE(T.notices.empty());
  REQUIRE(T.residual_order.has_value());
  CHECK(*T.residual_order == 5);
}

TEST_CASE("c31 vanishes for constant H") {
  auto fl = verify_c31_float(20, std::nullopt, 5);
  CHECK(fl.max_ratio < 1e-9);
  auto ex = verify_c31_exact(3, 3, 5, 5);
  CHECK(ex.nonzero_exact == 0);
  CHECK_FALSE(ex.sqrt_fallback);
  CHECK(c31_for(ProblemData::make(2, "0.2*sin(x1)", "0.3 + 0.1*t")) > 1e-6);
}

TEST_CASE("minimal case parity") {
  auto T2 = expand(ProblemData::make(2, "0.3*sin(x1) + 0.2*x1^2", "0"), 6, 3);
  CHECK(T2.coeff(1, 0).max_abs() < 1e-12);
  CHECK(T2.coeff(3, 1).max_abs() < 1e-12);
  auto T3 = expand(ProblemData::make(3, "0.3*sin(x1)*cos(x2) + 0.2*x1*x2", "0"), 7, 4);
  CHECK(T3.coeff(1, 0).max_abs() < 1e-12);
  CHECK(T3.coeff(3, 0).max_abs() < 1e-12);
}

TEST_CASE("constant shift changes c0 only") {
  auto A = expand(ProblemData::make(2, "0.2*sin(x1)", "0.4"), 6, 3);
  auto B = expand(ProblemData::make(2, "1.5 + 0.2*sin(x1)", "0.4"), 6, 3);
  CHECK(B.coeff(0, 0).constant_term() - A.coeff(0, 0).constant_term() == doctest::Approx(1.5));
  for (const auto& [ij, jet] : A.coeffs)
    if (ij.first >= 1) CHECK((jet - B.coeff(ij.first, ij.second)).max_abs() < 1e-12);
}

TEST_CASE("base point coherence") {
  auto A = expand(ProblemData::make(2, "0.2*sin(x1)", "0.4 + 0.1*x1"), 9, 3);
  double h = 0.01;
  auto B = expand(ProblemData::make(2, "0.2*sin(x1)", "0.4 + 0.1*x1", {h}), 9, 3);
  std::vector<double> y{h};
  for (int i = 1; i <= 3; ++i) {
    double a = evaluate(A.coeff(i, 0), std::span<const double>(y));
    CHECK(std::fabs(a - B.coeff(i, 0).constant_term()) < 1e-8);
  }
}

TEST_CASE("build_uk") {
  auto T = expand(ProblemData::make(2, "0.2*sin(x1)", "0.3"), 6, 3);
  auto u = build_uk(T, 3);
  CHECK(u.coeff(3, 1).constant_term() == T.coeff(3, 1).constant_term());
  CHECK(eval_uk(T, 1, {}, 0.1) == doctest::Approx(T.coeff(0, 0).constant_term() + 0.1 * T.coeff(1, 0).constant_term()));
  CHECK_THROWS_AS(build_uk(T, 5), PreconditionError);
  CHECK_THROWS_AS(expand(ProblemData::make(2, "0", "1.5"), 6, 3), DomainError);
  CHECK_THROWS_AS(expand(ProblemData::make(2, "0", "0.3"), 4, 3), PreconditionError);
}
