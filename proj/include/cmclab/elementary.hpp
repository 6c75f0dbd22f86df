#pragma once

// Elementary functions on truncated series rings. A ring splits as
// head + tail where the tail is nilpotent (tail^(depth+1) == 0); every
// function is its head value composed with a finite Taylor sum in the tail.
// Jets split over scalars, log-series over jets, so the same code serves both.

#include <cmath>
#include <concepts>
#include <vector>

#include "cmclab/errors.hpp"
#include "cmclab/scalar.hpp"

namespace cmclab {

template <class Ring>
struct SplitRing;

template <class Ring>
concept SplitRingType = requires { typename SplitRing<Ring>::Head; typename SplitRing<Ring>::Scalar; };

// Head operations for plain scalars.
inline double head_recip(const double& h) {
  if (h == 0.0) throw SingularityError("reciprocal of zero leading term");
  return 1.0 / h;
}
inline double head_sqrt(const double& h) { return ScalarOps<double>::sqrt(h); }
inline double head_exp(const double& h) { return std::exp(h); }
inline double head_sin(const double& h) { return std::sin(h); }
inline double head_cos(const double& h) { return std::cos(h); }
inline double head_atan(const double& h) { return std::atan(h); }

inline Rational head_recip(const Rational& h) {
  if (h == 0) throw SingularityError("reciprocal of zero leading term");
  return Rational(1) / h;
}
inline Rational head_sqrt(const Rational& h) { return ScalarOps<Rational>::sqrt(h); }

namespace detail {

/// sum_k coef[k] * e^k by Horner; coef.size() - 1 <= depth of e is enough.
template <SplitRingType Ring>
Ring horner(const Ring& e, const std::vector<typename SplitRing<Ring>::Scalar>& coef) {
  using T = SplitRing<Ring>;
  Ring r = T::lift_scalar(coef.back(), e);
  for (int k = static_cast<int>(coef.size()) - 2; k >= 0; --k) r = T::add_scalar(e * r, coef[k]);
  return r;
}

}  // namespace detail

template <SplitRingType Ring>
Ring recip(const Ring& a) {
  using T = SplitRing<Ring>;
  using S = typename T::Scalar;
  auto hinv = head_recip(T::head(a));
  Ring e = T::tail(a) * T::lift(hinv, a);
  std::vector<S> coef(T::depth(a) + 1);
  for (std::size_t k = 0; k < coef.size(); ++k) coef[k] = (k % 2 == 0) ? S(1) : S(-1);
  return detail::horner(e, coef) * T::lift(hinv, a);
}

template <SplitRingType Ring>
Ring sqrt(const Ring& a) {
  using T = SplitRing<Ring>;
  using S = typename T::Scalar;
  auto h = T::head(a);
  auto root = head_sqrt(h);
  Ring e = T::tail(a) * T::lift(head_recip(h), a);
  std::vector<S> coef(T::depth(a) + 1);
  coef[0] = S(1);
  for (std::size_t k = 1; k < coef.size(); ++k) {
    // binom(1/2, k) = binom(1/2, k-1) * (1/2 - (k-1)) / k
    coef[k] = coef[k - 1] * ScalarOps<S>::from_ratio(3 - 2 * static_cast<std::int64_t>(k),
                                                      2 * static_cast<std::int64_t>(k));
  }
  return detail::horner(e, coef) * T::lift(root, a);
}

template <SplitRingType Ring>
Ring exp(const Ring& a) {
  using T = SplitRing<Ring>;
  using S = typename T::Scalar;
  std::vector<S> coef(T::depth(a) + 1);
  coef[0] = S(1);
  for (std::size_t k = 1; k < coef.size(); ++k) coef[k] = coef[k - 1] / S(static_cast<double>(k));
  return detail::horner(T::tail(a), coef) * T::lift(head_exp(T::head(a)), a);
}

namespace detail {

// cos and sin of a nilpotent element.
template <SplitRingType Ring>
std::pair<Ring, Ring> cos_sin_nilpotent(const Ring& e, int depth) {
  using T = SplitRing<Ring>;
  using S = typename T::Scalar;
  Ring e2 = e * e;
  int half = depth / 2 + 1;
  std::vector<S> cc(half), sc(half);
  S fact(1);
  for (int k = 0; k < half; ++k) {
    if (k > 0) fact *= S(static_cast<double>((2 * k - 1) * (2 * k)));
    cc[k] = ((k % 2 == 0) ? S(1) : S(-1)) / fact;
    sc[k] = cc[k] / S(static_cast<double>(2 * k + 1));
  }
  return {horner(e2, cc), e * horner(e2, sc)};
}

}  // namespace detail

template <SplitRingType Ring>
Ring sin(const Ring& a) {
  using T = SplitRing<Ring>;
  auto h = T::head(a);
  auto [c, s] = detail::cos_sin_nilpotent(T::tail(a), T::depth(a));
  return c * T::lift(head_sin(h), a) + s * T::lift(head_cos(h), a);
}

template <SplitRingType Ring>
Ring cos(const Ring& a) {
  using T = SplitRing<Ring>;
  auto h = T::head(a);
  auto [c, s] = detail::cos_sin_nilpotent(T::tail(a), T::depth(a));
  return c * T::lift(head_cos(h), a) - s * T::lift(head_sin(h), a);
}

/// atan(h + e) = atan(h) + atan(e / (1 + h (h + e))).
template <SplitRingType Ring>
Ring atan(const Ring& a) {
  using T = SplitRing<Ring>;
  using S = typename T::Scalar;
  auto h = T::head(a);
  Ring denom = T::add_scalar(T::lift(h, a) * a, S(1));
  Ring w = T::tail(a) * recip(denom);
  int half = T::depth(a) / 2 + 1;
  std::vector<S> coef(half);
  for (int k = 0; k < half; ++k) coef[k] = ((k % 2 == 0) ? S(1) : S(-1)) / S(static_cast<double>(2 * k + 1));
  return w * detail::horner(w * w, coef) + T::lift(head_atan(h), a);
}

template <SplitRingType Ring>
Ring ipow(const Ring& a, unsigned p) {
  using T = SplitRing<Ring>;
  Ring result = T::lift_scalar(typename T::Scalar(1), a);
  Ring base = a;
  while (p > 0) {
    if (p & 1u) result = result * base;
    p >>= 1u;
    if (p > 0) base = base * base;
  }
  return result;
}

// Jet-headed rings call back into the generic functions.
template <SplitRingType Head>
Head head_recip(const Head& h) {
  return recip(h);
}
template <SplitRingType Head>
Head head_sqrt(const Head& h) {
  return sqrt(h);
}
template <SplitRingType Head>
Head head_exp(const Head& h) {
  return exp(h);
}
template <SplitRingType Head>
Head head_sin(const Head& h) {
  return sin(h);
}
template <SplitRingType Head>
Head head_cos(const Head& h) {
  return cos(h);
}
template <SplitRingType Head>
Head head_atan(const Head& h) {
  return atan(h);
}

}  // namespace cmclab
