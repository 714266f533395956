#pragma once

// Arithmetic expression trees over the coordinates x, y, z.
//
// Grammar (whitespace ignored, implicit multiplication allowed: "3z^2", "2(z-1)"):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary | <implicit> power)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?          right associative, binds tighter than unary minus
//   primary := number | name | func '(' expr ')' | '(' expr ')'
//
// Evaluation is templated on the scalar so the same tree yields values (double) and
// forward-mode derivatives (Dual<N>).

#include <cctype>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>

#include "leafgeo/dual.hpp"
#include "leafgeo/polynomial.hpp"

namespace leafgeo {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t pos)
      : std::runtime_error(what + " at position " + std::to_string(pos)), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

enum class Func { Exp, Log, Sqrt, Sin, Cos, Sinh, Cosh, Tanh };

struct ExprNode {
  enum class Kind { Const, Var, Neg, Add, Sub, Mul, Div, Pow, IntPow, Call };
  Kind kind = Kind::Const;
  double value = 0.0;  // Const
  int var = 0;         // Var: 0 = x, 1 = y, 2 = z
  int exponent = 0;    // IntPow
  Func func = Func::Exp;
  std::shared_ptr<const ExprNode> lhs, rhs;
};

class Expr {
 public:
  using NodePtr = std::shared_ptr<const ExprNode>;

  /// Parse `text`; only names listed in `variables` (subset of "xyz") are accepted.
  static Expr parse(std::string_view text, std::string_view variables = "xyz") {
    Parser p{text, variables, 0};
    NodePtr root = p.expr();
    p.skip_ws();
    if (p.pos != text.size()) throw ParseError("unexpected character '" + std::string(1, text[p.pos]) + "'", p.pos);
    return Expr(std::string(text), std::move(root));
  }

  static Expr constant(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Const;
    n->value = v;
    return Expr(std::to_string(v), std::move(n));
  }

  const std::string& text() const { return text_; }

  template <class T>
  T operator()(const T& x, const T& y, const T& z) const {
    return eval<T>(*root_, x, y, z);
  }

  /// Value and gradient with respect to (x, y, z).
  Dual<3> with_gradient(double x, double y, double z) const {
    return eval<Dual<3>>(*root_, Dual<3>::variable(x, 0), Dual<3>::variable(y, 1), Dual<3>::variable(z, 2));
  }

  /// Exact polynomial in variable `var` when the tree is built from + - * ^n and constant division.
  std::optional<Polynomial> as_polynomial(int var = 2) const { return to_poly(*root_, var); }

  /// True when the tree mentions variable `var`.
  bool depends_on(int var) const { return mentions(*root_, var); }

 private:
  Expr(std::string text, NodePtr root) : text_(std::move(text)), root_(std::move(root)) {}

  template <class T>
  static T eval(const ExprNode& n, const T& x, const T& y, const T& z) {
    using K = ExprNode::Kind;
    switch (n.kind) {
      case K::Const: return T(n.value);
      case K::Var: return n.var == 0 ? x : (n.var == 1 ? y : z);
      case K::Neg: return -eval<T>(*n.lhs, x, y, z);
      case K::Add: return eval<T>(*n.lhs, x, y, z) + eval<T>(*n.rhs, x, y, z);
      case K::Sub: return eval<T>(*n.lhs, x, y, z) - eval<T>(*n.rhs, x, y, z);
      case K::Mul: return eval<T>(*n.lhs, x, y, z) * eval<T>(*n.rhs, x, y, z);
      case K::Div: return eval<T>(*n.lhs, x, y, z) / eval<T>(*n.rhs, x, y, z);
      case K::IntPow: return ipow_any(eval<T>(*n.lhs, x, y, z), n.exponent);
      case K::Pow: {
        using std::exp;
        using std::log;
        return exp(eval<T>(*n.rhs, x, y, z) * log(eval<T>(*n.lhs, x, y, z)));
      }
      case K::Call: return call<T>(n.func, eval<T>(*n.lhs, x, y, z));
    }
    return T(0.0);
  }

  template <class T>
  static T ipow_any(const T& a, int n) {
    if constexpr (std::is_same_v<T, double>) {
      return std::pow(a, n);
    } else {
      return ipow(a, n);
    }
  }

  template <class T>
  static T call(Func f, const T& a) {
    using std::cos, std::cosh, std::exp, std::log, std::sin, std::sinh, std::sqrt, std::tanh;
    switch (f) {
      case Func::Exp: return exp(a);
      case Func::Log: return log(a);
      case Func::Sqrt: return sqrt(a);
      case Func::Sin: return sin(a);
      case Func::Cos: return cos(a);
      case Func::Sinh: return sinh(a);
      case Func::Cosh: return cosh(a);
      case Func::Tanh: return tanh(a);
    }
    return a;
  }

  static std::optional<Polynomial> to_poly(const ExprNode& n, int var) {
    using K = ExprNode::Kind;
    switch (n.kind) {
      case K::Const: return Polynomial::constant(n.value);
      case K::Var:
        if (n.var != var) return std::nullopt;
        return Polynomial::identity();
      case K::Neg: {
        auto a = to_poly(*n.lhs, var);
        if (!a) return std::nullopt;
        return -*a;
      }
      case K::Add:
      case K::Sub:
      case K::Mul: {
        auto a = to_poly(*n.lhs, var);
        auto b = to_poly(*n.rhs, var);
        if (!a || !b) return std::nullopt;
        if (n.kind == K::Add) return *a + *b;
        if (n.kind == K::Sub) return *a - *b;
        return *a * *b;
      }
      case K::Div: {
        auto a = to_poly(*n.lhs, var);
        auto b = to_poly(*n.rhs, var);
        if (!a || !b || b->degree() != 0) return std::nullopt;
        return (1.0 / b->coeff(0)) * *a;
      }
      case K::IntPow: {
        if (n.exponent < 0) return std::nullopt;
        auto a = to_poly(*n.lhs, var);
        if (!a) return std::nullopt;
        return a->pow(static_cast<unsigned>(n.exponent));
      }
      case K::Pow:
      case K::Call: return std::nullopt;
    }
    return std::nullopt;
  }

  static bool mentions(const ExprNode& n, int var) {
    if (n.kind == ExprNode::Kind::Var) return n.var == var;
    return (n.lhs && mentions(*n.lhs, var)) || (n.rhs && mentions(*n.rhs, var));
  }

  struct Parser {
    std::string_view s;
    std::string_view vars;
    std::size_t pos;

    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool peek(char c) {
      skip_ws();
      return pos < s.size() && s[pos] == c;
    }
    bool eat(char c) {
      if (!peek(c)) return false;
      ++pos;
      return true;
    }
    static NodePtr binary(ExprNode::Kind k, NodePtr a, NodePtr b) {
      auto n = std::make_shared<ExprNode>();
      n->kind = k;
      n->lhs = std::move(a);
      n->rhs = std::move(b);
      return n;
    }

    NodePtr expr() {
      NodePtr lhs = term();
      for (;;) {
        if (eat('+')) lhs = binary(ExprNode::Kind::Add, lhs, term());
        else if (eat('-')) lhs = binary(ExprNode::Kind::Sub, lhs, term());
        else return lhs;
      }
    }

    bool starts_factor() {
      skip_ws();
      if (pos >= s.size()) return false;
      const char c = s[pos];
      return c == '(' || std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }

    NodePtr term() {
      NodePtr lhs = unary();
      for (;;) {
        if (eat('*')) lhs = binary(ExprNode::Kind::Mul, lhs, unary());
        else if (eat('/')) lhs = binary(ExprNode::Kind::Div, lhs, unary());
        else if (starts_factor()) lhs = binary(ExprNode::Kind::Mul, lhs, power());
        else return lhs;
      }
    }

    NodePtr unary() {
      if (eat('-')) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::Neg;
        n->lhs = unary();
        return n;
      }
      if (eat('+')) return unary();
      return power();
    }

    NodePtr power() {
      NodePtr base = primary();
      if (eat('^')) {
        NodePtr ex = unary();
        if (ex->kind == ExprNode::Kind::Const && std::floor(ex->value) == ex->value && std::abs(ex->value) < 1024) {
          auto n = std::make_shared<ExprNode>();
          n->kind = ExprNode::Kind::IntPow;
          n->exponent = static_cast<int>(ex->value);
          n->lhs = std::move(base);
          return n;
        }
        return binary(ExprNode::Kind::Pow, std::move(base), std::move(ex));
      }
      return base;
    }

    NodePtr primary() {
      skip_ws();
      if (pos >= s.size()) throw ParseError("unexpected end of expression", pos);
      const char c = s[pos];
      if (c == '(') {
        ++pos;
        NodePtr inner = expr();
        if (!eat(')')) throw ParseError("expected ')'", pos);
        return inner;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
      throw ParseError("unexpected character '" + std::string(1, c) + "'", pos);
    }

    NodePtr number() {
      const std::size_t start = pos;
      while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) ++pos;
      if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
        std::size_t p = pos + 1;
        if (p < s.size() && (s[p] == '+' || s[p] == '-')) ++p;
        if (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) {
          pos = p;
          while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        }
      }
      const std::string tok(s.substr(start, pos - start));
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        throw ParseError("malformed number '" + tok + "'", start);
      }
      if (used != tok.size()) throw ParseError("malformed number '" + tok + "'", start);
      auto n = std::make_shared<ExprNode>();
      n->kind = ExprNode::Kind::Const;
      n->value = v;
      return n;
    }

    NodePtr name() {
      const std::size_t start = pos;
      while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
      const std::string_view id = s.substr(start, pos - start);
      static constexpr std::pair<std::string_view, Func> kFuncs[] = {
          {"exp", Func::Exp},   {"log", Func::Log},   {"sqrt", Func::Sqrt}, {"sin", Func::Sin},
          {"cos", Func::Cos},   {"sinh", Func::Sinh}, {"cosh", Func::Cosh}, {"tanh", Func::Tanh}};
      for (const auto& [fname, f] : kFuncs) {
        if (id == fname) {
          if (!eat('(')) throw ParseError("expected '(' after " + std::string(id), pos);
          auto n = std::make_shared<ExprNode>();
          n->kind = ExprNode::Kind::Call;
          n->func = f;
          n->lhs = expr();
          if (!eat(')')) throw ParseError("expected ')'", pos);
          return n;
        }
      }
      if (id == "pi") {
        auto n = std::make_shared<ExprNode>();
        n->value = std::numbers::pi;
        return n;
      }
      if (id.size() == 1 && vars.find(id[0]) != std::string_view::npos) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::Var;
        n->var = id[0] - 'x';
        return n;
      }
      throw ParseError("unknown name '" + std::string(id) + "'", start);
    }
  };

  std::string text_;
  NodePtr root_;
};

}  // namespace leafgeo
