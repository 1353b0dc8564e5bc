#pragma once

// Textual surface definitions.
//
// Grammar (whitespace insensitive):
//
//   surface  := '(' expr ',' expr ',' expr ')'
//   expr     := term (('+' | '-') term)*
//   term     := unary (('*' | '/') unary)*
//   unary    := '-' unary | power
//   power    := primary ('^' unary)?          right associative
//   primary  := number | 'u' | 'v' | 'pi' | func '(' expr ')' | '(' expr ')'
//   func     := sqrt | sin | cos | exp | log
//
// Exponents must be constant integers; they are folded at parse time so a
// power node stores its exponent as an int. There is no implicit
// multiplication.

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "caustic/error.hpp"
#include "caustic/jet.hpp"

namespace caustic {

enum class NodeKind { Constant, VarU, VarV, Add, Sub, Mul, Div, Neg, Pow, Call };
enum class Function { Sqrt, Sin, Cos, Exp, Log };

struct Node;
using ExprPtr = std::shared_ptr<const Node>;

/// Immutable expression tree node.
struct Node {
  NodeKind kind = NodeKind::Constant;
  double value = 0.0;     // Constant
  int exponent = 0;       // Pow
  Function fn = Function::Sqrt;  // Call
  ExprPtr lhs;            // operand of Neg/Pow/Call, left of binary ops
  ExprPtr rhs;            // right of binary ops
};

inline std::string_view function_name(Function f) {
  switch (f) {
    case Function::Sqrt: return "sqrt";
    case Function::Sin: return "sin";
    case Function::Cos: return "cos";
    case Function::Exp: return "exp";
    case Function::Log: return "log";
  }
  return "?";
}

namespace expr {

inline ExprPtr constant(double value) {
  if (!std::isfinite(value)) throw Error(ErrorKind::Domain, "non-finite constant");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Constant;
  n->value = value;
  return n;
}
inline ExprPtr var_u() {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::VarU;
  return n;
}
inline ExprPtr var_v() {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::VarV;
  return n;
}
inline ExprPtr binary(NodeKind kind, ExprPtr a, ExprPtr b) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}
inline ExprPtr negate(ExprPtr a) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Neg;
  n->lhs = std::move(a);
  return n;
}
inline ExprPtr power(ExprPtr base, int exponent) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Pow;
  n->lhs = std::move(base);
  n->exponent = exponent;
  return n;
}
inline ExprPtr call(Function fn, ExprPtr arg) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Call;
  n->fn = fn;
  n->lhs = std::move(arg);
  return n;
}

}  // namespace expr

/// A parametrization (u, v) -> R^3 as three expression trees.
struct SurfaceExpr {
  std::array<ExprPtr, 3> components;
};

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_constant(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline bool is_atom(const Node& n) {
  return n.kind == NodeKind::Constant || n.kind == NodeKind::VarU || n.kind == NodeKind::VarV ||
         n.kind == NodeKind::Call;
}

inline void print(const Node& n, std::string& out);

inline void print_wrapped(const Node& n, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(n, out);
  if (wrap) out += ')';
}

inline void print(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::Constant: out += format_constant(n.value); break;
    case NodeKind::VarU: out += 'u'; break;
    case NodeKind::VarV: out += 'v'; break;
    case NodeKind::Call:
      out += function_name(n.fn);
      out += '(';
      print(*n.lhs, out);
      out += ')';
      break;
    case NodeKind::Pow:
      // Constants are wrapped too: "1e-05" or "-" inside a literal must not
      // leak into the exponent syntax.
      print_wrapped(*n.lhs, !(n.lhs->kind == NodeKind::VarU || n.lhs->kind == NodeKind::VarV ||
                              n.lhs->kind == NodeKind::Call),
                    out);
      out += '^';
      if (n.exponent < 0) {
        out += "(" + std::to_string(n.exponent) + ")";
      } else {
        out += std::to_string(n.exponent);
      }
      break;
    case NodeKind::Neg:
      out += '-';
      print_wrapped(*n.lhs, !(is_atom(*n.lhs) || n.lhs->kind == NodeKind::Pow ||
                              n.lhs->kind == NodeKind::Neg),
                    out);
      break;
    case NodeKind::Add:
    case NodeKind::Sub: {
      print(*n.lhs, out);
      out += n.kind == NodeKind::Add ? " + " : " - ";
      const bool wrap = n.rhs->kind == NodeKind::Add || n.rhs->kind == NodeKind::Sub;
      print_wrapped(*n.rhs, wrap, out);
      break;
    }
    case NodeKind::Mul:
    case NodeKind::Div: {
      const bool wrap_l = n.lhs->kind == NodeKind::Add || n.lhs->kind == NodeKind::Sub;
      print_wrapped(*n.lhs, wrap_l, out);
      out += n.kind == NodeKind::Mul ? "*" : "/";
      const bool wrap_r = n.rhs->kind == NodeKind::Add || n.rhs->kind == NodeKind::Sub ||
                          n.rhs->kind == NodeKind::Mul || n.rhs->kind == NodeKind::Div;
      print_wrapped(*n.rhs, wrap_r, out);
      break;
    }
  }
}

}  // namespace detail

inline std::string to_string(const ExprPtr& e) {
  std::string out;
  detail::print(*e, out);
  return out;
}

inline std::string to_string(const SurfaceExpr& s) {
  return "(" + to_string(s.components[0]) + ", " + to_string(s.components[1]) + ", " +
         to_string(s.components[2]) + ")";
}

/// Structural identity of two trees (constants compared exactly).
inline bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case NodeKind::Constant: return a->value == b->value;
    case NodeKind::VarU:
    case NodeKind::VarV: return true;
    case NodeKind::Neg: return structurally_equal(a->lhs, b->lhs);
    case NodeKind::Pow: return a->exponent == b->exponent && structurally_equal(a->lhs, b->lhs);
    case NodeKind::Call: return a->fn == b->fn && structurally_equal(a->lhs, b->lhs);
    default: return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
  }
}

inline bool structurally_equal(const SurfaceExpr& a, const SurfaceExpr& b) {
  for (std::size_t k = 0; k < 3; ++k) {
    if (!structurally_equal(a.components[k], b.components[k])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  SurfaceExpr parse_surface() {
    skip_ws();
    expect('(', "surface must start with '('");
    std::vector<ExprPtr> parts;
    parts.push_back(parse_expr());
    skip_ws();
    while (peek() == ',') {
      ++pos_;
      parts.push_back(parse_expr());
      skip_ws();
    }
    expect(')', "expected ',' or ')'");
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    if (parts.size() != 3) {
      throw Error(ErrorKind::Arity,
                  "surface needs exactly 3 components, got " + std::to_string(parts.size()));
    }
    return SurfaceExpr{{parts[0], parts[1], parts[2]}};
  }

  ExprPtr parse_single() {
    ExprPtr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    for (;;) {
      skip_ws();
      const char c = peek();
      if (c != '+' && c != '-') return lhs;
      ++pos_;
      ExprPtr rhs = parse_term();
      lhs = expr::binary(c == '+' ? NodeKind::Add : NodeKind::Sub, lhs, rhs);
    }
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_unary();
    for (;;) {
      skip_ws();
      const char c = peek();
      if (c != '*' && c != '/') return lhs;
      ++pos_;
      ExprPtr rhs = parse_unary();
      lhs = expr::binary(c == '*' ? NodeKind::Mul : NodeKind::Div, lhs, rhs);
    }
  }

  ExprPtr parse_unary() {
    skip_ws();
    if (peek() == '-') {
      ++pos_;
      return expr::negate(parse_unary());
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    skip_ws();
    if (peek() != '^') return base;
    const std::size_t at = pos_++;
    ExprPtr exponent = parse_unary();
    return expr::power(base, fold_integer(exponent, at));
  }

  int fold_integer(const ExprPtr& e, std::size_t at) {
    double value = 0.0;
    if (!constant_value(*e, value)) fail("exponent must be a constant integer", at);
    if (!std::isfinite(value) || value != std::floor(value) || std::abs(value) > 1e6) {
      fail("exponent must be an integer", at);
    }
    return static_cast<int>(value);
  }

  static bool constant_value(const Node& n, double& out) {
    switch (n.kind) {
      case NodeKind::Constant: out = n.value; return true;
      case NodeKind::Neg:
        if (!constant_value(*n.lhs, out)) return false;
        out = -out;
        return true;
      case NodeKind::Pow: {
        double b = 0.0;
        if (!constant_value(*n.lhs, b)) return false;
        out = std::pow(b, n.exponent);
        return true;
      }
      default: return false;
    }
  }

  ExprPtr parse_primary() {
    skip_ws();
    const char c = peek();
    if (c == '(') {
      ++pos_;
      ExprPtr inner = parse_expr();
      skip_ws();
      expect(')', "expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    fail(std::string("unexpected character '") + c + "'");
  }

  ExprPtr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string literal(text_.substr(start, pos_ - start));
    char* end = nullptr;
    const double value = std::strtod(literal.c_str(), &end);
    if (end != literal.c_str() + literal.size()) fail("malformed number '" + literal + "'", start);
    if (!std::isfinite(value)) fail("number out of range", start);
    return expr::constant(value);
  }

  ExprPtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    skip_ws();
    if (peek() == '(') {
      static constexpr std::array<Function, 5> fns{Function::Sqrt, Function::Sin, Function::Cos,
                                                   Function::Exp, Function::Log};
      for (Function f : fns) {
        if (function_name(f) == name) {
          ++pos_;
          ExprPtr arg = parse_expr();
          skip_ws();
          expect(')', "expected ')' after function argument");
          return expr::call(f, arg);
        }
      }
      throw Error(ErrorKind::UnknownFunction, "unknown function '" + std::string(name) + "'", start);
    }
    if (name == "u") return expr::var_u();
    if (name == "v") return expr::var_v();
    if (name == "pi") return expr::constant(std::numbers::pi);
    throw Error(ErrorKind::UnknownIdentifier, "unknown identifier '" + std::string(name) + "'",
                start);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void expect(char c, const std::string& message) {
    if (peek() != c) fail(message);
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& message) { fail(message, pos_); }
  [[noreturn]] void fail(const std::string& message, std::size_t at) {
    throw Error(ErrorKind::Syntax, message + " at position " + std::to_string(at), at);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline SurfaceExpr parse_surface(std::string_view text) {
  return detail::Parser(text).parse_surface();
}

inline ExprPtr parse_expression(std::string_view text) {
  return detail::Parser(text).parse_single();
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace detail {

inline double constant_term(double x) { return x; }
template <class T>
T constant_term(const Jet<T>& x) {
  return x.value();
}

inline double raise(double x, int n) { return std::pow(x, n); }
template <class T>
Jet<T> raise(const Jet<T>& x, int n) {
  return pow_int(x, n);
}

template <class V>
V make_constant(double c, const V& like) {
  if constexpr (std::is_same_v<V, double>) {
    (void)like;
    return c;
  } else {
    return V::constant(typename V::scalar_type(c), like.base(), like.order());
  }
}

[[noreturn]] inline void domain_error(const Node& n, const std::string& why) {
  std::string subtree;
  print(n, subtree);
  throw Error(ErrorKind::Domain, why + " in '" + subtree + "'");
}

template <class V>
V evaluate(const Node& n, const V& u, const V& v) {
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sqrt;
  switch (n.kind) {
    case NodeKind::Constant: return make_constant(n.value, u);
    case NodeKind::VarU: return u;
    case NodeKind::VarV: return v;
    case NodeKind::Neg: return -evaluate(*n.lhs, u, v);
    case NodeKind::Add: return evaluate(*n.lhs, u, v) + evaluate(*n.rhs, u, v);
    case NodeKind::Sub: return evaluate(*n.lhs, u, v) - evaluate(*n.rhs, u, v);
    case NodeKind::Mul: return evaluate(*n.lhs, u, v) * evaluate(*n.rhs, u, v);
    case NodeKind::Div: {
      V den = evaluate(*n.rhs, u, v);
      if (constant_term(den) == 0.0) domain_error(n, "division by zero");
      return evaluate(*n.lhs, u, v) / den;
    }
    case NodeKind::Pow: {
      V base = evaluate(*n.lhs, u, v);
      if (n.exponent < 0 && constant_term(base) == 0.0) domain_error(n, "zero to a negative power");
      return raise(base, n.exponent);
    }
    case NodeKind::Call: {
      V arg = evaluate(*n.lhs, u, v);
      const double a0 = double(constant_term(arg));
      switch (n.fn) {
        case Function::Sqrt:
          if constexpr (std::is_same_v<V, double>) {
            if (a0 < 0.0) domain_error(n, "sqrt of a negative value");
          } else {
            // Derivatives of sqrt blow up at zero, so jets need a strictly
            // positive argument.
            if (!(a0 > 0.0)) domain_error(n, "sqrt of a non-positive value");
          }
          return sqrt(arg);
        case Function::Log:
          if (!(a0 > 0.0)) domain_error(n, "log of a non-positive value");
          return log(arg);
        case Function::Sin: return sin(arg);
        case Function::Cos: return cos(arg);
        case Function::Exp: return exp(arg);
      }
    }
  }
  domain_error(n, "unhandled node");
}

}  // namespace detail

/// Plain double evaluation; domain violations name the offending subtree.
inline double eval_scalar(const ExprPtr& e, ParamPoint p) {
  return detail::evaluate<double>(*e, p.u, p.v);
}

/// Evaluates a tree over jets of the coordinate functions.
template <class T>
Jet<T> eval_jet(const ExprPtr& e, const Jet<T>& u, const Jet<T>& v) {
  return detail::evaluate<Jet<T>>(*e, u, v);
}

/// Lifts a parsed surface to the order-K jets of its three components at p.
template <class T = double>
JetVec3<T> lift_surface(const SurfaceExpr& s, ParamPoint p, int order) {
  const Jet<T> u = Jet<T>::variable_u(p, order);
  const Jet<T> v = Jet<T>::variable_v(p, order);
  JetVec3<T> out{{eval_jet(s.components[0], u, v), eval_jet(s.components[1], u, v),
                  eval_jet(s.components[2], u, v)}};
  for (const auto& c : out.c) {
    if (!c.all_finite()) throw Error(ErrorKind::Domain, "non-finite jet coefficient");
  }
  return out;
}

inline Vec3 eval_surface(const SurfaceExpr& s, ParamPoint p) {
  return {eval_scalar(s.components[0], p), eval_scalar(s.components[1], p),
          eval_scalar(s.components[2], p)};
}

}  // namespace caustic
