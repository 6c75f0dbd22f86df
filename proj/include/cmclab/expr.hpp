#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "cmclab/errors.hpp"
#include "cmclab/jet.hpp"
#include "cmclab/log_series.hpp"

namespace cmclab {

/// Closed-form expression in the tangential variables x1..x9 and t.
///
/// Grammar (whitespace ignored, no implicit multiplication):
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := ('-'|'+') factor | atom ('^' uint)?
///   atom   := number | ident | '(' expr ')' | func '(' expr ')'
///   func   := sin | cos | exp | sqrt | atan
class Expr {
 public:
  enum class Kind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Func };
  enum class Func { Sin, Cos, Exp, Sqrt, Atan };
  /// Variable index used for t; tangential variables are 0..dim-1.
  static constexpr int kTime = -1;

  struct Node {
    Kind kind;
    double number = 0.0;
    int var = 0;
    unsigned exponent = 0;
    Func func = Func::Sin;
    std::shared_ptr<const Node> lhs, rhs;
  };

  Expr() = default;
  explicit Expr(std::shared_ptr<const Node> root, int dim) : root_(std::move(root)), dim_(dim) {}

  const Node& root() const { return *root_; }
  bool empty() const { return root_ == nullptr; }
  int dim() const { return dim_; }
  bool uses_t() const;

 private:
  std::shared_ptr<const Node> root_;
  int dim_ = 0;
};

/// Parses `src`; variables x{dim+1}.. are rejected. Throws ParseError.
Expr parse(std::string_view src, int dim);
/// Canonical text form; parse(print(e)) is structurally equal to e.
std::string print(const Expr& e);
bool structurally_equal(const Expr& a, const Expr& b);

namespace detail {

template <class Ring>
Ring apply_func(Expr::Func f, const Ring& v) {
  if constexpr (std::is_same_v<Ring, double>) {
    switch (f) {
      case Expr::Func::Sin: return std::sin(v);
      case Expr::Func::Cos: return std::cos(v);
      case Expr::Func::Exp: return std::exp(v);
      case Expr::Func::Sqrt:
        if (!(v > 0.0)) throw DomainError("sqrt of nonpositive argument");
        return std::sqrt(v);
      case Expr::Func::Atan: return std::atan(v);
    }
  } else {
    switch (f) {
      case Expr::Func::Sin: return sin(v);
      case Expr::Func::Cos: return cos(v);
      case Expr::Func::Exp: return exp(v);
      case Expr::Func::Sqrt: return sqrt(v);
      case Expr::Func::Atan: return atan(v);
    }
  }
  throw Error("unknown function");
}

template <class Ring>
Ring power(const Ring& v, unsigned p) {
  if constexpr (std::is_same_v<Ring, double>) {
    double r = 1.0;
    for (unsigned i = 0; i < p; ++i) r *= v;
    return r;
  } else {
    return ipow(v, p);
  }
}

template <class Ring, class Leaf>
Ring eval_node(const Expr::Node& n, const Leaf& leaf) {
  switch (n.kind) {
    case Expr::Kind::Number: return leaf.constant(n.number);
    case Expr::Kind::Var: return leaf.variable(n.var);
    case Expr::Kind::Neg: return -eval_node<Ring>(*n.lhs, leaf);
    case Expr::Kind::Add: return eval_node<Ring>(*n.lhs, leaf) + eval_node<Ring>(*n.rhs, leaf);
    case Expr::Kind::Sub: return eval_node<Ring>(*n.lhs, leaf) - eval_node<Ring>(*n.rhs, leaf);
    case Expr::Kind::Mul: return eval_node<Ring>(*n.lhs, leaf) * eval_node<Ring>(*n.rhs, leaf);
    case Expr::Kind::Div: {
      Ring den = eval_node<Ring>(*n.rhs, leaf);
      if constexpr (std::is_same_v<Ring, double>) {
        if (den == 0.0) throw DomainError("division by zero");
      }
      return eval_node<Ring>(*n.lhs, leaf) / den;
    }
    case Expr::Kind::Pow: return power(eval_node<Ring>(*n.lhs, leaf), n.exponent);
    case Expr::Kind::Func: return apply_func(n.func, eval_node<Ring>(*n.lhs, leaf));
  }
  throw Error("corrupt expression node");
}

}  // namespace detail

/// Evaluates over any ring. `leaf` supplies `constant(double)` and
/// `variable(int)` (Expr::kTime for t). Singular leading terms surface as
/// DomainError.
template <class Ring, class Leaf>
Ring evaluate(const Expr& e, const Leaf& leaf) {
  try {
    return detail::eval_node<Ring>(e.root(), leaf);
  } catch (const SingularityError& err) {
    throw DomainError(std::string("expression not smooth at evaluation point: ") + err.what());
  }
}

double eval_real(const Expr& e, std::span<const double> x, double t);

/// Jet of x' -> e(x', t0) at `base`.
Jet<double> eval_jet(const Expr& e, std::span<const double> base, double t0, int order);

/// t-Taylor coefficients of e at t = 0, each a jet in x' at `base`.
std::vector<Jet<double>> eval_t_series(const Expr& e, std::span<const double> base, int t_order, int jet_order);

}  // namespace cmclab
