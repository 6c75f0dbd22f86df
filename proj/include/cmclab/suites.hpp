#pragma once

#include <cstdint>
#include <random>
#include <string>

#include <json.hpp>

namespace cmclab {

/// Polynomial boundary data of degree <= 5 in `dim` variables.
std::string random_poly_phi(std::mt19937_64& rng, int dim);
/// Polynomial H(x', t) with |H| <= bound on the unit box.
std::string random_poly_H(std::mt19937_64& rng, int dim, double bound = 0.8, bool t_dependent = true);

struct SuiteResult {
  std::string name;
  bool pass = false;
  nlohmann::json detail;

  nlohmann::json to_json() const { return {{"suite", name}, {"pass", pass}, {"detail", detail}}; }
};

/// Probe-solved c_1, c_2 against their closed forms, n in {2, 3, 4}, relative tol.
SuiteResult suite_coefficients(std::uint64_t seed, int trials = 50, double tol = 1e-10);
/// t Q(u_*) vanishes below t^{n+1} and survives at t^{n+1}, on the same inputs.
SuiteResult suite_residual(std::uint64_t seed, int trials = 50, double tol = 1e-9);
/// c_{3,1} = 0 for n = 2 and constant H, exactly and in floating point.
SuiteResult suite_c31(std::uint64_t seed, int exact_trials = 25, int float_trials = 100, std::int64_t H_num = 3,
                      std::int64_t H_den = 5, double tol = 1e-9);
/// Engine coefficients against sphere-cap Taylor coefficients through n + 3.
SuiteResult suite_oracle(std::uint64_t seed, int sets = 6, double tol = 1e-8);
/// Analytic Jacobian-vector products against central differences.
SuiteResult suite_jacobian(std::uint64_t seed, int iterates = 10, int nodes = 33, double tol = 1e-6);
/// H = 0: c_1 = c_{3,1} = 0 for n = 2, c_1 = c_3 = 0 for n = 3.
SuiteResult suite_parity(std::uint64_t seed, int trials = 10, double tol = 1e-12);

/// By name: coefficients, residual, c31, oracle, jacobian, parity.
SuiteResult run_suite(const std::string& name, std::uint64_t seed, int trials = -1);

}  // namespace cmclab
