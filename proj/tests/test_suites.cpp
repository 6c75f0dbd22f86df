#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cmclab/errors.hpp"
#include "cmclab/expr.hpp"
#include "cmclab/suites.hpp"

using namespace cmclab;

TEST_CASE("suites pass on small runs") {
  for (const char* name : {"coefficients", "residual", "c31", "oracle", "parity"}) {
    auto r = run_suite(name, 11, 6);
    INFO(r.to_json().dump());
    CHECK(r.pass);
  }
  auto j = suite_jacobian(4, 2, 17);
  CHECK(j.pass);
  CHECK_THROWS_AS(run_suite("nope", 1), ConfigError);
}

TEST_CASE("suite output is deterministic") {
  CHECK(run_suite("coefficients", 5, 6).to_json().dump() == run_suite("coefficients", 5, 6).to_json().dump());
  CHECK(run_suite("oracle", 5, 3).to_json().dump() != run_suite("oracle", 6, 3).to_json().dump());
}

TEST_CASE("random H respects its bound") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    Expr H = parse(random_poly_H(rng, 2, 0.8), 2);
    double m = 0.0;
    for (double a : {-1.0, -0.5, 0.0, 0.5, 1.0})
      for (double b : {-1.0, 0.0, 1.0})
        for (double t : {0.0, 0.5, 1.0}) {
          std::vector<double> x{a, b};
          m = std::max(m, std::fabs(eval_real(H, x, t)));
        }
    CHECK(m <= 0.8);
  }
}
