#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cmclab/elementary.hpp"
#include "cmclab/errors.hpp"
#include "cmclab/scalar.hpp"

namespace cmclab {

/// Monomials x^beta in `dim` variables with |beta| <= order, graded
/// lexicographic layout. Lower-order bases are prefixes of higher-order ones,
/// so truncation is a prefix copy. Instances are shared and immutable.
class MonomialBasis {
 public:
  struct Product {
    int lhs, rhs, out;
  };
  struct DiffEntry {
    int src, dst, factor;
  };

  static std::shared_ptr<const MonomialBasis> get(int dim, int order);

  int dim() const { return dim_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(degree_.size()); }
  int degree(int idx) const { return degree_[idx]; }
  std::span<const int> exponents(int idx) const {
    return {exps_.data() + static_cast<std::size_t>(idx) * dim_, static_cast<std::size_t>(dim_)};
  }
  /// Position of beta, or -1 when |beta| > order or the length is wrong.
  int index(std::span<const int> beta) const;
  /// Number of monomials of total degree <= deg.
  int prefix_size(int deg) const;
  const std::vector<Product>& products() const { return products_; }
  /// Entries mapping x^beta to beta_axis * x^(beta - e_axis).
  const std::vector<DiffEntry>& diff_table(int axis) const { return diff_[axis]; }

  MonomialBasis(int dim, int order);

 private:
  std::uint64_t key(std::span<const int> beta) const;

  int dim_;
  int order_;
  std::vector<int> exps_;
  std::vector<int> degree_;
  std::vector<std::uint64_t> keys_;
  std::vector<Product> products_;
  std::vector<std::vector<DiffEntry>> diff_;
};

/// Truncated Taylor expansion f(x0' + y) = sum_beta c_beta y^beta in `dim`
/// tangential variables, |beta| <= order. Coefficients are monomial
/// coefficients (derivative / beta!).
template <class Scalar>
class Jet {
 public:
  using Coeffs = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Jet() = default;
  Jet(int dim, int order) : basis_(MonomialBasis::get(dim, order)), c_(Coeffs::Zero(basis_->size())) {}

  static Jet constant(int dim, int order, const Scalar& value) {
    Jet j(dim, order);
    j.c_[0] = value;
    return j;
  }
  /// base + y_axis.
  static Jet variable(int dim, int order, int axis, const Scalar& base) {
    Jet j = constant(dim, order, base);
    if (order >= 1) j.c_[1 + axis] = Scalar(1);
    return j;
  }

  bool valid() const { return basis_ != nullptr; }
  int dim() const { return basis_->dim(); }
  int order() const { return basis_->order(); }
  const MonomialBasis& basis() const { return *basis_; }
  const Coeffs& coeffs() const { return c_; }
  Coeffs& coeffs() { return c_; }

  const Scalar& constant_term() const { return c_[0]; }
  Scalar coeff(std::span<const int> beta) const {
    int idx = basis_->index(beta);
    return idx < 0 ? Scalar(0) : c_[idx];
  }
  Scalar coeff(std::initializer_list<int> beta) const {
    return coeff(std::span<const int>(beta.begin(), beta.size()));
  }
  void set_coeff(std::span<const int> beta, const Scalar& value) {
    int idx = basis_->index(beta);
    if (idx < 0) throw StructuralError("multi-index outside jet order");
    c_[idx] = value;
  }
  void set_coeff(std::initializer_list<int> beta, const Scalar& value) {
    set_coeff(std::span<const int>(beta.begin(), beta.size()), value);
  }

  bool is_zero() const {
    for (Eigen::Index i = 0; i < c_.size(); ++i)
      if (!ScalarOps<Scalar>::is_zero(c_[i])) return false;
    return true;
  }
  double max_abs() const {
    double m = 0.0;
    for (Eigen::Index i = 0; i < c_.size(); ++i)
      m = std::max(m, std::fabs(ScalarOps<Scalar>::to_double(c_[i])));
    return m;
  }

  Jet truncated(int order) const {
    if (order > this->order()) throw StructuralError("truncation cannot raise jet order");
    Jet r(dim(), order);
    r.c_ = c_.head(r.c_.size());
    return r;
  }
  /// Raises the order, filling the new top degrees with zeros. Only for call
  /// sites that can show the padded degrees never reach a result they read.
  Jet padded(int order) const {
    if (order <= this->order()) return truncated(order);
    Jet r(dim(), order);
    r.c_.head(c_.size()) = c_;
    return r;
  }
  Jet with_order(int order) const { return order <= this->order() ? truncated(order) : padded(order); }

  Jet& operator+=(const Jet& o) {
    check_compatible(o);
    c_ += o.c_;
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    check_compatible(o);
    c_ -= o.c_;
    return *this;
  }
  Jet& operator*=(const Scalar& s) {
    c_ *= s;
    return *this;
  }
  Jet& operator+=(const Scalar& s) {
    c_[0] += s;
    return *this;
  }

  void check_compatible(const Jet& o) const {
    if (!valid() || !o.valid()) throw StructuralError("uninitialized jet");
    if (dim() != o.dim() || order() != o.order())
      throw StructuralError("jet dim/order mismatch");
  }

  friend bool operator==(const Jet& a, const Jet& b) {
    return a.dim() == b.dim() && a.order() == b.order() && a.c_ == b.c_;
  }

 private:
  std::shared_ptr<const MonomialBasis> basis_;
  Coeffs c_;
};

template <class S>
Jet<S> operator+(Jet<S> a, const Jet<S>& b) {
  return a += b;
}
template <class S>
Jet<S> operator-(Jet<S> a, const Jet<S>& b) {
  return a -= b;
}
template <class S>
Jet<S> operator-(Jet<S> a) {
  a.coeffs() = -a.coeffs();
  return a;
}
template <class S>
Jet<S> operator*(const S& s, Jet<S> a) {
  return a *= s;
}
template <class S>
Jet<S> operator*(Jet<S> a, const S& s) {
  return a *= s;
}
template <class S>
Jet<S> operator+(Jet<S> a, const S& s) {
  return a += s;
}
template <class S>
Jet<S> operator-(Jet<S> a, const S& s) {
  a.coeffs()[0] -= s;
  return a;
}

/// Truncated Cauchy product.
template <class S>
Jet<S> operator*(const Jet<S>& a, const Jet<S>& b) {
  a.check_compatible(b);
  Jet<S> r(a.dim(), a.order());
  const auto& ac = a.coeffs();
  const auto& bc = b.coeffs();
  auto& rc = r.coeffs();
  for (const auto& p : a.basis().products()) {
    if (ScalarOps<S>::is_zero(ac[p.lhs]) || ScalarOps<S>::is_zero(bc[p.rhs])) continue;
    rc[p.out] += ac[p.lhs] * bc[p.rhs];
  }
  return r;
}

/// Formal partial derivative along `axis`; the result has order - 1.
template <class S>
Jet<S> diff(const Jet<S>& a, int axis) {
  if (axis < 0 || axis >= a.dim()) throw StructuralError("derivative axis out of range");
  if (a.order() < 1) throw StructuralError("cannot differentiate an order-0 jet");
  Jet<S> r(a.dim(), a.order() - 1);
  for (const auto& e : a.basis().diff_table(axis)) r.coeffs()[e.dst] = S(e.factor) * a.coeffs()[e.src];
  return r;
}

/// Evaluates the Taylor polynomial at displacement y from the base point.
template <class S>
S evaluate(const Jet<S>& a, std::span<const S> y) {
  S sum(0);
  const auto& B = a.basis();
  for (int idx = 0; idx < B.size(); ++idx) {
    S term = a.coeffs()[idx];
    if (ScalarOps<S>::is_zero(term)) continue;
    auto beta = B.exponents(idx);
    for (int d = 0; d < a.dim(); ++d)
      for (int e = 0; e < beta[d]; ++e) term *= y[d];
    sum += term;
  }
  return sum;
}

/// Partial derivative d^beta f(x0') (applies the beta! factor).
template <class S>
S derivative_at_base(const Jet<S>& a, std::span<const int> beta) {
  S f(1);
  for (int b : beta)
    for (int k = 2; k <= b; ++k) f *= S(k);
  return a.coeff(beta) * f;
}

template <class S>
struct SplitRing<Jet<S>> {
  using Head = S;
  using Scalar = S;
  static const S& head(const Jet<S>& a) { return a.constant_term(); }
  static Jet<S> tail(Jet<S> a) {
    a.coeffs()[0] = S(0);
    return a;
  }
  static Jet<S> lift(const S& h, const Jet<S>& like) { return Jet<S>::constant(like.dim(), like.order(), h); }
  static Jet<S> lift_scalar(const S& s, const Jet<S>& like) { return lift(s, like); }
  static Jet<S> add_scalar(Jet<S> a, const S& s) { return a += s; }
  static int depth(const Jet<S>& a) { return a.order(); }
};

template <class S>
Jet<S> operator/(const Jet<S>& a, const Jet<S>& b) {
  return a * recip(b);
}

}  // namespace cmclab
