#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cmclab/elementary.hpp"
#include "cmclab/jet.hpp"

namespace cmclab {

/// Finite expansion sum_{i,j} a_{i,j} t^i (log t)^j with jet coefficients.
/// Terms with i > t_order are unknown (truncated); j never exceeds log_cap;
/// pure log terms (i = 0, j > 0) are not representable. A t_order of -1
/// denotes a regular function about which nothing beyond regularity is known.
template <class Scalar>
class LogSeries {
 public:
  using JetT = Jet<Scalar>;

  LogSeries() = default;
  LogSeries(int dim, int jet_order, int t_order, int log_cap)
      : dim_(dim), jet_order_(jet_order), t_order_(t_order), log_cap_(log_cap) {
    if (t_order < -1) throw StructuralError("t_order must be >= -1");
    if (log_cap < 0) throw StructuralError("log_cap must be >= 0");
    terms_.assign(static_cast<std::size_t>(t_order + 1) * (log_cap + 1), JetT(dim, jet_order));
  }

  static LogSeries constant(const JetT& c, int t_order, int log_cap) {
    LogSeries s(c.dim(), c.order(), t_order, log_cap);
    if (t_order >= 0) s.set(0, 0, c);
    return s;
  }
  static LogSeries monomial(const JetT& c, int i, int j, int t_order, int log_cap) {
    LogSeries s(c.dim(), c.order(), t_order, log_cap);
    s.set(i, j, c);
    return s;
  }
  /// Series with jet coefficients H_0, H_1, ... of t^0, t^1, ...
  static LogSeries from_taylor(const std::vector<JetT>& coeffs, int t_order, int log_cap) {
    if (coeffs.empty()) throw StructuralError("empty Taylor coefficient list");
    if (static_cast<int>(coeffs.size()) < t_order + 1)
      throw StructuralError("not enough Taylor coefficients for requested t_order");
    LogSeries s(coeffs[0].dim(), coeffs[0].order(), t_order, log_cap);
    for (int i = 0; i <= t_order; ++i) s.set(i, 0, coeffs[i]);
    return s;
  }

  int dim() const { return dim_; }
  int jet_order() const { return jet_order_; }
  int t_order() const { return t_order_; }
  int log_cap() const { return log_cap_; }

  /// Stored coefficient, or the zero jet outside the stored range.
  JetT coeff(int i, int j) const {
    if (i < 0 || j < 0 || i > t_order_ || j > log_cap_) return JetT(dim_, jet_order_);
    return terms_[slot(i, j)];
  }
  const JetT& term(int i, int j) const { return terms_[slot(i, j)]; }

  void set(int i, int j, const JetT& c) {
    if (c.dim() != dim_ || c.order() != jet_order_) throw StructuralError("coefficient jet budget mismatch");
    if (i < 0 || i > t_order_) throw StructuralError("t-power outside series range");
    if (j < 0 || j > log_cap_) throw LogCapOverflow("log power " + std::to_string(j) + " exceeds cap " +
                                                    std::to_string(log_cap_));
    if (i == 0 && j > 0 && !c.is_zero()) throw SingularityError("pure log term at t^0 is not representable");
    terms_[slot(i, j)] = c;
  }
  void add(int i, int j, const JetT& c) { set(i, j, coeff(i, j) + c); }

  bool is_zero() const {
    for (const auto& t : terms_)
      if (!t.is_zero()) return false;
    return true;
  }
  double max_abs() const {
    double m = 0.0;
    for (const auto& t : terms_) m = std::max(m, t.max_abs());
    return m;
  }

  LogSeries with_t_order(int k) const {
    LogSeries r(dim_, jet_order_, k, log_cap_);
    for (int i = 0; i <= std::min(k, t_order_); ++i)
      for (int j = 0; j <= log_cap_; ++j) r.terms_[r.slot(i, j)] = terms_[slot(i, j)];
    return r;
  }
  LogSeries with_jet_order(int m) const {
    LogSeries r(dim_, m, t_order_, log_cap_);
    for (std::size_t s = 0; s < terms_.size(); ++s) r.terms_[s] = terms_[s].with_order(m);
    return r;
  }

  /// Sum of a_{i,j}(x0') t^i (log t)^j at the base point.
  double evaluate_at_base(double t) const {
    double lt = std::log(t);
    double sum = 0.0;
    for (int i = t_order_; i >= 0; --i) {
      double ti = std::pow(t, i);
      for (int j = 0; j <= log_cap_; ++j) {
        const auto& c = terms_[slot(i, j)].constant_term();
        if (ScalarOps<Scalar>::is_zero(c)) continue;
        sum += ScalarOps<Scalar>::to_double(c) * ti * std::pow(lt, j);
      }
    }
    return sum;
  }

  void check_compatible(const LogSeries& o) const {
    if (dim_ != o.dim_ || jet_order_ != o.jet_order_ || log_cap_ != o.log_cap_)
      throw StructuralError("log-series budget mismatch");
  }

 private:
  std::size_t slot(int i, int j) const { return static_cast<std::size_t>(i) * (log_cap_ + 1) + j; }

  int dim_ = 0;
  int jet_order_ = 0;
  int t_order_ = -1;
  int log_cap_ = 0;
  std::vector<JetT> terms_;
};

template <class S>
LogSeries<S> operator+(const LogSeries<S>& a, const LogSeries<S>& b) {
  a.check_compatible(b);
  int k = std::min(a.t_order(), b.t_order());
  LogSeries<S> r(a.dim(), a.jet_order(), k, a.log_cap());
  for (int i = 0; i <= k; ++i)
    for (int j = 0; j <= a.log_cap(); ++j) r.set(i, j, a.term(i, j) + b.term(i, j));
  return r;
}

template <class S>
LogSeries<S> operator-(const LogSeries<S>& a) {
  LogSeries<S> r(a.dim(), a.jet_order(), a.t_order(), a.log_cap());
  for (int i = 0; i <= a.t_order(); ++i)
    for (int j = 0; j <= a.log_cap(); ++j) r.set(i, j, -a.term(i, j));
  return r;
}

template <class S>
LogSeries<S> operator-(const LogSeries<S>& a, const LogSeries<S>& b) {
  return a + (-b);
}

template <class S>
LogSeries<S> operator*(const S& s, const LogSeries<S>& a) {
  LogSeries<S> r = a;
  for (int i = 0; i <= a.t_order(); ++i)
    for (int j = 0; j <= a.log_cap(); ++j) r.set(i, j, s * a.term(i, j));
  return r;
}
template <class S>
LogSeries<S> operator*(const LogSeries<S>& a, const S& s) {
  return s * a;
}

/// Product with exponents adding; terms beyond t_order are dropped. A nonzero
/// term beyond log_cap raises LogCapOverflow instead of being dropped.
template <class S>
LogSeries<S> operator*(const LogSeries<S>& a, const LogSeries<S>& b) {
  a.check_compatible(b);
  int k = std::min(a.t_order(), b.t_order());
  int cap = a.log_cap();
  LogSeries<S> r(a.dim(), a.jet_order(), k, cap);
  std::vector<Jet<S>> acc(static_cast<std::size_t>(k + 1) * (cap + 1), Jet<S>(a.dim(), a.jet_order()));
  for (int i1 = 0; i1 <= k; ++i1) {
    for (int j1 = 0; j1 <= cap; ++j1) {
      const auto& x = a.term(i1, j1);
      if (x.is_zero()) continue;
      for (int i2 = 0; i1 + i2 <= k; ++i2) {
        for (int j2 = 0; j2 <= cap; ++j2) {
          const auto& y = b.term(i2, j2);
          if (y.is_zero()) continue;
          Jet<S> p = x * y;
          if (j1 + j2 > cap) {
            if (!p.is_zero())
              throw LogCapOverflow("product produced t^" + std::to_string(i1 + i2) + " (log t)^" +
                                   std::to_string(j1 + j2) + " above log cap " + std::to_string(cap));
            continue;
          }
          acc[static_cast<std::size_t>(i1 + i2) * (cap + 1) + j1 + j2] += p;
        }
      }
    }
  }
  for (int i = 0; i <= k; ++i)
    for (int j = 0; j <= cap; ++j) r.set(i, j, acc[static_cast<std::size_t>(i) * (cap + 1) + j]);
  return r;
}

/// d/dt, term-wise: d[t^i L^j] = i t^(i-1) L^j + j t^(i-1) L^(j-1). t_order drops by one.
/// A log term at t^1 would differentiate into a pure log; that raises SingularityError.
template <class S>
LogSeries<S> dt(const LogSeries<S>& a) {
  LogSeries<S> r(a.dim(), a.jet_order(), a.t_order() - 1, a.log_cap());
  for (int i = 1; i <= a.t_order(); ++i) {
    for (int j = 0; j <= a.log_cap(); ++j) {
      const auto& c = a.term(i, j);
      if (c.is_zero()) continue;
      r.add(i - 1, j, S(i) * c);
      if (j > 0) r.add(i - 1, j - 1, S(j) * c);
    }
  }
  return r;
}

/// Division by t. Requires every t^0 term to vanish.
template <class S>
LogSeries<S> div_by_t(const LogSeries<S>& a) {
  for (int j = 0; j <= a.log_cap() && a.t_order() >= 0; ++j)
    if (!a.term(0, j).is_zero()) throw SingularityError("series not divisible by t");
  LogSeries<S> r(a.dim(), a.jet_order(), a.t_order() - 1, a.log_cap());
  for (int i = 1; i <= a.t_order(); ++i)
    for (int j = 0; j <= a.log_cap(); ++j) r.set(i - 1, j, a.term(i, j));
  return r;
}

/// Multiplication by t (t_order rises by one; the new t^0 slot is zero).
template <class S>
LogSeries<S> mul_t(const LogSeries<S>& a) {
  LogSeries<S> r(a.dim(), a.jet_order(), a.t_order() + 1, a.log_cap());
  for (int i = 0; i <= a.t_order(); ++i)
    for (int j = 0; j <= a.log_cap(); ++j) r.set(i + 1, j, a.term(i, j));
  return r;
}

/// Term-wise tangential derivative; jet order drops by one.
template <class S>
LogSeries<S> diff(const LogSeries<S>& a, int axis) {
  LogSeries<S> r(a.dim(), a.jet_order() - 1, a.t_order(), a.log_cap());
  for (int i = 0; i <= a.t_order(); ++i)
    for (int j = 0; j <= a.log_cap(); ++j) r.set(i, j, diff(a.term(i, j), axis));
  return r;
}

template <class S>
struct SplitRing<LogSeries<S>> {
  using Head = Jet<S>;
  using Scalar = S;
  static Jet<S> head(const LogSeries<S>& a) { return a.coeff(0, 0); }
  static LogSeries<S> tail(LogSeries<S> a) {
    if (a.t_order() >= 0) a.set(0, 0, Jet<S>(a.dim(), a.jet_order()));
    return a;
  }
  static LogSeries<S> lift(const Jet<S>& h, const LogSeries<S>& like) {
    return LogSeries<S>::constant(h, like.t_order(), like.log_cap());
  }
  static LogSeries<S> lift_scalar(const S& s, const LogSeries<S>& like) {
    return lift(Jet<S>::constant(like.dim(), like.jet_order(), s), like);
  }
  static LogSeries<S> add_scalar(LogSeries<S> a, const S& s) {
    if (a.t_order() >= 0) a.set(0, 0, a.coeff(0, 0) + s);
    return a;
  }
  static int depth(const LogSeries<S>& a) { return std::max(a.t_order(), 0); }
};

template <class S>
LogSeries<S> operator/(const LogSeries<S>& a, const LogSeries<S>& b) {
  return a * recip(b);
}

}  // namespace cmclab
