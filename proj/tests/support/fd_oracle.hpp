#pragma once

// Independent derivative oracle: the expression tree is evaluated in long
// double by a separate walker, and partials come from tensor-product central
// differences with three levels of Richardson extrapolation.

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>

#include "caustic/expr.hpp"

namespace fdoracle {

using caustic::Node;
using caustic::NodeKind;

inline long double eval(const Node& n, long double u, long double v) {
  switch (n.kind) {
    case NodeKind::Constant: return n.value;
    case NodeKind::VarU: return u;
    case NodeKind::VarV: return v;
    case NodeKind::Neg: return -eval(*n.lhs, u, v);
    case NodeKind::Add: return eval(*n.lhs, u, v) + eval(*n.rhs, u, v);
    case NodeKind::Sub: return eval(*n.lhs, u, v) - eval(*n.rhs, u, v);
    case NodeKind::Mul: return eval(*n.lhs, u, v) * eval(*n.rhs, u, v);
    case NodeKind::Div: return eval(*n.lhs, u, v) / eval(*n.rhs, u, v);
    case NodeKind::Pow: return std::pow(eval(*n.lhs, u, v), static_cast<long double>(n.exponent));
    case NodeKind::Call: {
      const long double a = eval(*n.lhs, u, v);
      switch (n.fn) {
        case caustic::Function::Sqrt: return std::sqrt(a);
        case caustic::Function::Sin: return std::sin(a);
        case caustic::Function::Cos: return std::cos(a);
        case caustic::Function::Exp: return std::exp(a);
        case caustic::Function::Log: return std::log(a);
      }
    }
  }
  throw std::logic_error("unhandled node");
}

namespace detail {

// Central difference weights at offsets -2..2 for derivative orders 0..4.
inline constexpr long double kStencil[5][5] = {
    {0, 0, 1, 0, 0},
    {0, -0.5L, 0, 0.5L, 0},
    {0, 1, -2, 1, 0},
    {-0.5L, 1, 0, -1, 0.5L},
    {1, -4, 6, -4, 1},
};

inline long double difference(const Node& n, long double u, long double v, int i, int j,
                              long double h) {
  long double sum = 0;
  for (int a = -2; a <= 2; ++a) {
    const long double wa = kStencil[i][a + 2];
    if (wa == 0) continue;
    for (int b = -2; b <= 2; ++b) {
      const long double wb = kStencil[j][b + 2];
      if (wb == 0) continue;
      sum += wa * wb * eval(n, u + a * h, v + b * h);
    }
  }
  return sum / std::pow(h, static_cast<long double>(i + j));
}

}  // namespace detail

/// d^{i+j} e / du^i dv^j at (u, v), i + j <= 4 and i, j <= 4.
inline long double partial(const Node& n, long double u, long double v, int i, int j,
                           long double h0 = 0.08L) {
  if (i + j == 0) return eval(n, u, v);
  long double d[4];
  for (int k = 0; k < 4; ++k) d[k] = detail::difference(n, u, v, i, j, h0 / (1 << k));
  // Errors are even in h: eliminate h^2, h^4, h^6.
  long double factor = 4;
  for (int level = 1; level < 4; ++level, factor *= 4) {
    for (int k = 0; k + level < 4; ++k) d[k] = (factor * d[k + 1] - d[k]) / (factor - 1);
  }
  return d[0];
}

/// Random composite expression in u and v. Every function application is
/// guarded so the expression is smooth on the whole plane.
class ExpressionGenerator {
 public:
  explicit ExpressionGenerator(unsigned seed) : rng_(seed) {}

  std::string generate(int depth = 3) { return node(depth); }

 private:
  std::string constant() {
    std::uniform_real_distribution<double> d(0.2, 1.8);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", d(rng_));
    return buf;
  }

  std::string leaf() {
    switch (pick(4)) {
      case 0: return "u";
      case 1: return "v";
      case 2: return constant() + "*u*v";
      default: return "(" + constant() + "*u - v)";
    }
  }

  std::string node(int depth) {
    if (depth == 0) return leaf();
    const std::string a = node(depth - 1);
    switch (pick(10)) {
      case 0: return "(" + a + " + " + node(depth - 1) + ")";
      case 1: return "(" + a + " - " + node(depth - 1) + ")";
      case 2: return a + "*" + node(depth - 1);
      case 3: return a + "/(2 + " + node(depth - 1) + "^2)";
      case 4: return "sin(" + a + ")";
      case 5: return "cos(" + a + ")";
      case 6: return "exp(0.5*sin(" + a + "))";
      case 7: return "log(1.5 + " + a + "^2)";
      case 8: return "sqrt(1 + " + a + "^2)";
      default: return "(" + a + ")^" + std::to_string(2 + pick(2));
    }
  }

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  std::mt19937 rng_;
};

}  // namespace fdoracle
