#pragma once

#include <cmath>
#include <cstdint>
#include <iostream>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

#include "cmclab/errors.hpp"

namespace cmclab {

/// Exact rational coefficients, used for the c_{3,1} identity check.
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;

template <class Scalar>
struct ScalarOps;

template <>
struct ScalarOps<double> {
  static constexpr bool exact = false;
  static double from_int(std::int64_t v) { return static_cast<double>(v); }
  static double from_ratio(std::int64_t num, std::int64_t den) {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  static double to_double(double v) { return v; }
  static bool is_zero(double v) { return v == 0.0; }
  static double abs(double v) { return std::fabs(v); }
  static double sqrt(double v) {
    if (!(v > 0.0)) throw SingularityError("sqrt of nonpositive leading term");
    return std::sqrt(v);
  }
};

namespace detail {
inline thread_local bool rational_sqrt_inexact = false;
}

/// True if an exact-mode square root had to fall back to a float approximation
/// since the last reset.
inline bool rational_sqrt_inexact() { return detail::rational_sqrt_inexact; }
inline void reset_rational_sqrt_inexact() { detail::rational_sqrt_inexact = false; }

template <>
struct ScalarOps<Rational> {
  static constexpr bool exact = true;
  static Rational from_int(std::int64_t v) { return Rational(v); }
  static Rational from_ratio(std::int64_t num, std::int64_t den) { return Rational(num, den); }
  static double to_double(const Rational& v) { return v.convert_to<double>(); }
  static bool is_zero(const Rational& v) { return v == 0; }
  static Rational abs(const Rational& v) { return v < 0 ? Rational(-v) : v; }

  // Exact for perfect squares; otherwise a float approximation with a warning.
  static Rational sqrt(const Rational& v) {
    using boost::multiprecision::cpp_int;
    if (!(v > 0)) throw SingularityError("sqrt of nonpositive leading term");
    cpp_int num = numerator(v);
    cpp_int den = denominator(v);
    cpp_int rn = boost::multiprecision::sqrt(num);
    cpp_int rd = boost::multiprecision::sqrt(den);
    if (rn * rn == num && rd * rd == den) return Rational(rn, rd);
    if (!detail::rational_sqrt_inexact) {
      std::cerr << "warning: exact mode sqrt of a non-square rational; falling back to float\n";
    }
    detail::rational_sqrt_inexact = true;
    return Rational(std::sqrt(v.convert_to<double>()));
  }
};

}  // namespace cmclab
