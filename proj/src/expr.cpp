#include "cmclab/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <functional>

namespace cmclab {

namespace {

using Node = Expr::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

class Parser {
 public:
  Parser(std::string_view src, int dim) : src_(src), dim_(dim) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError("unexpected character '" + std::string(1, src_[pos_]) + "'", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make({Expr::Kind::Add, 0.0, 0, 0, Expr::Func::Sin, lhs, term()});
      } else if (accept('-')) {
        lhs = make({Expr::Kind::Sub, 0.0, 0, 0, Expr::Func::Sin, lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (accept('*')) {
        lhs = make({Expr::Kind::Mul, 0.0, 0, 0, Expr::Func::Sin, lhs, factor()});
      } else if (accept('/')) {
        lhs = make({Expr::Kind::Div, 0.0, 0, 0, Expr::Func::Sin, lhs, factor()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    if (accept('-')) return make({Expr::Kind::Neg, 0.0, 0, 0, Expr::Func::Sin, factor(), nullptr});
    if (accept('+')) return factor();
    NodePtr base = atom();
    if (accept('^')) {
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (start == pos_) throw ParseError("exponent must be a nonnegative integer literal", start);
      if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E'))
        throw ParseError("exponent must be a nonnegative integer literal", start);
      unsigned p = 0;
      auto res = std::from_chars(src_.data() + start, src_.data() + pos_, p);
      if (res.ec != std::errc() || p > 64) throw ParseError("exponent out of range", start);
      Node n{Expr::Kind::Pow, 0.0, 0, p, Expr::Func::Sin, base, nullptr};
      return make(n);
    }
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  NodePtr number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    double v = 0.0;
    auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_) throw ParseError("malformed number", start);
    return make({Expr::Kind::Number, v, 0, 0, Expr::Func::Sin, nullptr, nullptr});
  }

  NodePtr identifier() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    std::string_view name = src_.substr(start, pos_ - start);
    static const std::pair<std::string_view, Expr::Func> funcs[] = {{"sin", Expr::Func::Sin},
                                                                    {"cos", Expr::Func::Cos},
                                                                    {"exp", Expr::Func::Exp},
                                                                    {"sqrt", Expr::Func::Sqrt},
                                                                    {"atan", Expr::Func::Atan}};
    for (const auto& [fname, f] : funcs) {
      if (name == fname) {
        expect('(');
        NodePtr arg = expr();
        expect(')');
        return make({Expr::Kind::Func, 0.0, 0, 0, f, arg, nullptr});
      }
    }
    if (name == "t") return make({Expr::Kind::Var, 0.0, Expr::kTime, 0, Expr::Func::Sin, nullptr, nullptr});
    if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '9') {
      int idx = name[1] - '1';
      if (idx < dim_) return make({Expr::Kind::Var, 0.0, idx, 0, Expr::Func::Sin, nullptr, nullptr});
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view src_;
  int dim_;
  std::size_t pos_ = 0;
};

const char* func_name(Expr::Func f) {
  switch (f) {
    case Expr::Func::Sin: return "sin";
    case Expr::Func::Cos: return "cos";
    case Expr::Func::Exp: return "exp";
    case Expr::Func::Sqrt: return "sqrt";
    case Expr::Func::Atan: return "atan";
  }
  return "?";
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case Expr::Kind::Number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.number);
      out += buf;
      return;
    }
    case Expr::Kind::Var:
      out += n.var == Expr::kTime ? std::string("t") : "x" + std::to_string(n.var + 1);
      return;
    case Expr::Kind::Neg:
      out += "(-";
      print_node(*n.lhs, out);
      out += ")";
      return;
    case Expr::Kind::Pow:
      out += "(";
      print_node(*n.lhs, out);
      out += ")^" + std::to_string(n.exponent);
      return;
    case Expr::Kind::Func:
      out += func_name(n.func);
      out += "(";
      print_node(*n.lhs, out);
      out += ")";
      return;
    default: break;
  }
  const char* op = n.kind == Expr::Kind::Add ? " + " : n.kind == Expr::Kind::Sub ? " - " : n.kind == Expr::Kind::Mul ? " * " : " / ";
  out += "(";
  print_node(*n.lhs, out);
  out += op;
  print_node(*n.rhs, out);
  out += ")";
}

bool nodes_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Number: return a.number == b.number;
    case Expr::Kind::Var: return a.var == b.var;
    case Expr::Kind::Neg: return nodes_equal(*a.lhs, *b.lhs);
    case Expr::Kind::Pow: return a.exponent == b.exponent && nodes_equal(*a.lhs, *b.lhs);
    case Expr::Kind::Func: return a.func == b.func && nodes_equal(*a.lhs, *b.lhs);
    default: return nodes_equal(*a.lhs, *b.lhs) && nodes_equal(*a.rhs, *b.rhs);
  }
}

bool node_uses_t(const Node& n) {
  if (n.kind == Expr::Kind::Var) return n.var == Expr::kTime;
  return (n.lhs && node_uses_t(*n.lhs)) || (n.rhs && node_uses_t(*n.rhs));
}

struct RealLeaf {
  std::span<const double> x;
  double t;
  double constant(double v) const { return v; }
  double variable(int idx) const { return idx == Expr::kTime ? t : x[idx]; }
};

struct JetLeaf {
  std::span<const double> base;
  double t0;
  int order;
  Jet<double> constant(double v) const { return Jet<double>::constant(static_cast<int>(base.size()), order, v); }
  Jet<double> variable(int idx) const {
    if (idx == Expr::kTime) return constant(t0);
    return Jet<double>::variable(static_cast<int>(base.size()), order, idx, base[idx]);
  }
};

struct SeriesLeaf {
  std::span<const double> base;
  int t_order;
  int jet_order;
  int dim() const { return static_cast<int>(base.size()); }
  LogSeries<double> constant(double v) const {
    return LogSeries<double>::constant(Jet<double>::constant(dim(), jet_order, v), t_order, 0);
  }
  LogSeries<double> variable(int idx) const {
    if (idx == Expr::kTime) {
      LogSeries<double> s(dim(), jet_order, t_order, 0);
      if (t_order >= 1) s.set(1, 0, Jet<double>::constant(dim(), jet_order, 1.0));
      return s;
    }
    return LogSeries<double>::constant(Jet<double>::variable(dim(), jet_order, idx, base[idx]), t_order, 0);
  }
};

}  // namespace

bool Expr::uses_t() const { return root_ && node_uses_t(*root_); }

Expr parse(std::string_view src, int dim) {
  if (dim < 1 || dim > 9) throw ParseError("dimension out of range", 0);
  return Expr(Parser(src, dim).run(), dim);
}

std::string print(const Expr& e) {
  std::string out;
  print_node(e.root(), out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) { return nodes_equal(a.root(), b.root()); }

double eval_real(const Expr& e, std::span<const double> x, double t) {
  return evaluate<double>(e, RealLeaf{x, t});
}

Jet<double> eval_jet(const Expr& e, std::span<const double> base, double t0, int order) {
  if (static_cast<int>(base.size()) != e.dim()) throw StructuralError("base point dimension mismatch");
  return evaluate<Jet<double>>(e, JetLeaf{base, t0, order});
}

std::vector<Jet<double>> eval_t_series(const Expr& e, std::span<const double> base, int t_order, int jet_order) {
  if (static_cast<int>(base.size()) != e.dim()) throw StructuralError("base point dimension mismatch");
  auto s = evaluate<LogSeries<double>>(e, SeriesLeaf{base, t_order, jet_order});
  std::vector<Jet<double>> out;
  out.reserve(t_order + 1);
  for (int i = 0; i <= t_order; ++i) out.push_back(s.coeff(i, 0));
  return out;
}

}  // namespace cmclab
