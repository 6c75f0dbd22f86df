#include "cmclab/expansion.hpp"

#include <cmath>
#include <random>

namespace cmclab {

double eval_uk(const ExpansionTable<double>& T, int k, std::span<const double> y, double t, bool drop_global) {
  if (k > T.k) throw PreconditionError("order outside the solved range");
  if (!y.empty() && static_cast<int>(y.size()) != T.dim()) throw StructuralError("displacement has wrong dimension");
  const double lt = std::log(t);
  double sum = 0.0;
  for (const auto& [ij, c] : T.coeffs) {
    auto [i, j] = ij;
    if (i > k) continue;
    if (drop_global && i == T.n + 1 && j == 0) continue;
    double v = y.empty() ? c.constant_term() : evaluate(c, y);
    if (v == 0.0) continue;
    sum += v * std::pow(t, i) * std::pow(lt, j);
  }
  return sum;
}

ExpansionTable<double> expand(const ProblemData& data, int jet_order, int k, std::optional<Jet<double>> c_global,
                              std::string global_source, const ExpansionOptions& opt) {
  const int n = data.n;
  ExpansionOptions o = opt;
  if (o.log_cap < 0) o.log_cap = default_log_cap(std::max(k, n + 1), n);
  SeriesData<double> sd = series_data(data, jet_order, std::max(k, n + 1) + 1);
  ExpansionTable<double> T = solve_local(sd, o);
  if (k > n + 1 || c_global) T = solve_global(std::move(T), std::move(c_global), std::max(k, n + 1), global_source);
  return T;
}

namespace {

template <class S>
SeriesData<S> constant_H_data(const Jet<S>& phi, const S& H) {
  SeriesData<S> sd;
  sd.n = 2;
  sd.phi = phi;
  sd.base_point = {0.0};
  sd.H.assign(5, Jet<S>(1, phi.order()));
  sd.H[0] = Jet<S>::constant(1, phi.order(), H);
  return sd;
}

}  // namespace

C31Report verify_c31_float(int trials, std::optional<double> H_fixed, std::uint64_t seed, int jet_order) {
  if (H_fixed && !(std::fabs(*H_fixed) < 1.0)) throw PreconditionError("verify_c31 needs |H| < 1");
  if (jet_order < 5) throw PreconditionError("verify_c31 needs jet order >= 5");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0), UH(-0.9, 0.9);
  C31Report rep;
  rep.trials = trials;
  rep.H = H_fixed ? *H_fixed : std::nan("");
  for (int trial = 0; trial < trials; ++trial) {
    double H = H_fixed ? *H_fixed : UH(rng);
    Jet<double> phi(1, jet_order);
    for (Eigen::Index q = 0; q < phi.coeffs().size(); ++q) phi.coeffs()[q] = U(rng);
    auto T = solve_local(constant_H_data(phi, H));
    double v = T.coeff(3, 1).max_abs();
    double mag = std::max(phi.max_abs(), std::fabs(H));
    rep.values.push_back(v);
    rep.max_ratio = std::max(rep.max_ratio, v / (1.0 + mag));
  }
  return rep;
}

C31Report verify_c31_exact(int trials, std::int64_t H_num, std::int64_t H_den, std::uint64_t seed, int jet_order) {
  if (H_den <= 0) throw PreconditionError("H denominator must be positive");
  Rational H(H_num, H_den);
  if (!(H * H < 1)) throw PreconditionError("verify_c31 needs |H| < 1");
  {
    reset_rational_sqrt_inexact();
    ScalarOps<Rational>::sqrt(Rational(1) - H * H);
    if (rational_sqrt_inexact()) {
      reset_rational_sqrt_inexact();
      throw PreconditionError("exact mode needs 1 - H^2 to be a rational square");
    }
  }
  if (jet_order < 5) throw PreconditionError("verify_c31 needs jet order >= 5");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> den(1, 12), pq(1, 9);
  C31Report rep;
  rep.trials = trials;
  rep.H = H.convert_to<double>();
  rep.exact = true;
  reset_rational_sqrt_inexact();
  for (int trial = 0; trial < trials; ++trial) {
    Jet<Rational> phi(1, jet_order);
    for (Eigen::Index q = 0; q < phi.coeffs().size(); ++q) {
      int d = den(rng);
      std::uniform_int_distribution<int> num(-d, d);
      phi.coeffs()[q] = Rational(num(rng), d);
    }
    // 1 + phi'^2 must be a rational square: phi' = (p^2 - q^2) / (2 p q).
    int p = pq(rng), q = pq(rng);
    phi.coeffs()[1] = Rational(p * p - q * q, 2 * p * q);
    auto T = solve_local(constant_H_data(phi, H));
    Jet<Rational> c31 = T.coeff(3, 1);
    if (!c31.is_zero()) ++rep.nonzero_exact;
    double v = c31.max_abs();
    double mag = std::max(phi.max_abs(), std::fabs(rep.H));
    rep.values.push_back(v);
    rep.max_ratio = std::max(rep.max_ratio, v / (1.0 + mag));
  }
  rep.sqrt_fallback = rational_sqrt_inexact();
  return rep;
}

double c31_for(const ProblemData& data, int jet_order) {
  if (data.n != 2) throw PreconditionError("c_{3,1} is defined here for n = 2");
  return expand(data, jet_order, 3).coeff(3, 1).max_abs();
}

}  // namespace cmclab
