#pragma once

// Truncated bivariate Taylor expansions ("jets").
//
// A Jet of order K at base point (u0, v0) stores c(i, j) for i + j <= K with
//
//     c(i, j) = d^{i+j} h / du^i dv^j (u0, v0) / (i! j!),
//
// i.e. the coefficient of (u - u0)^i (v - v0)^j in the Taylor polynomial of h.
// Arithmetic on jets produces the Taylor coefficients of the exact composite
// function truncated at K, so every partial derivative the geometry code needs
// comes out of ordinary arithmetic on lifted coordinates.
//
// Storage is dense and graded by total degree: degree d occupies indices
// d(d+1)/2 ... d(d+1)/2 + d, ordered by the v-exponent j.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "caustic/error.hpp"
#include "caustic/vec.hpp"

namespace caustic {

template <class T = double>
class Jet {
 public:
  using scalar_type = T;

  Jet() : Jet(ParamPoint{}, 0) {}

  /// Identically zero jet.
  Jet(ParamPoint base, int order) : base_(base), order_(order) {
    if (order < 0) throw Error(ErrorKind::InvalidArgument, "jet order must be non-negative");
    coeffs_.assign(size_for(order), T{});
  }

  static Jet constant(T value, ParamPoint base, int order) {
    Jet j(base, order);
    j.coeffs_[0] = value;
    return j;
  }

  /// The coordinate function u lifted at `base`.
  static Jet variable_u(ParamPoint base, int order) {
    Jet j = constant(T(base.u), base, order);
    if (order >= 1) j.set(1, 0, T(1));
    return j;
  }

  /// The coordinate function v lifted at `base`.
  static Jet variable_v(ParamPoint base, int order) {
    Jet j = constant(T(base.v), base, order);
    if (order >= 1) j.set(0, 1, T(1));
    return j;
  }

  static constexpr std::size_t size_for(int order) {
    return static_cast<std::size_t>((order + 1) * (order + 2) / 2);
  }

  static constexpr std::size_t index(int i, int j) {
    const int d = i + j;
    return static_cast<std::size_t>(d * (d + 1) / 2 + j);
  }

  int order() const noexcept { return order_; }
  ParamPoint base() const noexcept { return base_; }
  std::span<const T> coefficients() const noexcept { return coeffs_; }

  /// Taylor coefficient of (u-u0)^i (v-v0)^j.
  T coeff(int i, int j) const {
    if (i < 0 || j < 0 || i + j > order_) {
      throw Error(ErrorKind::InsufficientOrder,
                  "coefficient (" + std::to_string(i) + "," + std::to_string(j) +
                      ") beyond jet order " + std::to_string(order_));
    }
    return coeffs_[index(i, j)];
  }

  void set(int i, int j, T value) {
    if (i < 0 || j < 0 || i + j > order_) {
      throw Error(ErrorKind::InsufficientOrder, "coefficient index beyond jet order");
    }
    coeffs_[index(i, j)] = value;
  }

  T value() const noexcept { return coeffs_[0]; }

  /// The partial derivative d^{i+j} h / du^i dv^j at the base point.
  T partial(int i, int j) const { return coeff(i, j) * factorial(i) * factorial(j); }

  /// Largest absolute coefficient.
  T max_abs() const {
    using std::abs;
    T m{};
    for (const T& c : coeffs_) m = std::max<T>(m, abs(c));
    return m;
  }

  /// Largest absolute coefficient of total degree at most `degree`.
  T max_abs_through(int degree) const {
    using std::abs;
    T m{};
    const int top = std::min(degree, order_);
    for (std::size_t k = 0; k < size_for(top); ++k) m = std::max<T>(m, abs(coeffs_[k]));
    return m;
  }

  bool all_finite() const {
    using std::isfinite;
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const T& c) { return isfinite(c); });
  }

  /// d/du; the result has order K-1.
  Jet du() const {
    require_order(1, "du");
    Jet out(base_, order_ - 1);
    for (int d = 0; d <= order_ - 1; ++d) {
      for (int j = 0; j <= d; ++j) {
        const int i = d - j;
        out.coeffs_[index(i, j)] = T(i + 1) * coeffs_[index(i + 1, j)];
      }
    }
    return out;
  }

  /// d/dv; the result has order K-1.
  Jet dv() const {
    require_order(1, "dv");
    Jet out(base_, order_ - 1);
    for (int d = 0; d <= order_ - 1; ++d) {
      for (int j = 0; j <= d; ++j) {
        const int i = d - j;
        out.coeffs_[index(i, j)] = T(j + 1) * coeffs_[index(i, j + 1)];
      }
    }
    return out;
  }

  Jet truncated(int order) const {
    if (order > order_) {
      throw Error(ErrorKind::InsufficientOrder, "cannot raise jet order from " +
                                                    std::to_string(order_) + " to " +
                                                    std::to_string(order));
    }
    Jet out(base_, order);
    std::copy_n(coeffs_.begin(), size_for(order), out.coeffs_.begin());
    return out;
  }

  /// The jet of (u, v) -> h(v, u) at the swapped base point.
  Jet transposed() const {
    Jet out(ParamPoint{base_.v, base_.u}, order_);
    for (int d = 0; d <= order_; ++d) {
      for (int j = 0; j <= d; ++j) out.coeffs_[index(j, d - j)] = coeffs_[index(d - j, j)];
    }
    return out;
  }

  /// Evaluates the Taylor polynomial at a nearby point.
  T evaluate_at(ParamPoint p) const {
    const T du = T(p.u - base_.u);
    const T dv = T(p.v - base_.v);
    T sum{};
    for (int d = 0; d <= order_; ++d) {
      for (int j = 0; j <= d; ++j) {
        const int i = d - j;
        sum += coeffs_[index(i, j)] * ipow(du, i) * ipow(dv, j);
      }
    }
    return sum;
  }

  Jet operator-() const {
    Jet out = *this;
    for (T& c : out.coeffs_) c = -c;
    return out;
  }

  Jet& operator+=(const Jet& o) {
    check_compatible(o);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    check_compatible(o);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  Jet& operator+=(T s) {
    coeffs_[0] += s;
    return *this;
  }
  Jet& operator-=(T s) {
    coeffs_[0] -= s;
    return *this;
  }
  Jet& operator*=(T s) {
    for (T& c : coeffs_) c *= s;
    return *this;
  }
  Jet& operator/=(T s) {
    if (s == T{}) throw Error(ErrorKind::JetDivisionByZero, "jet divided by scalar zero");
    for (T& c : coeffs_) c /= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, T s) { return a += s; }
  friend Jet operator+(T s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, T s) { return a -= s; }
  friend Jet operator-(T s, const Jet& a) { return (-a) += s; }
  friend Jet operator*(Jet a, T s) { return a *= s; }
  friend Jet operator*(T s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, T s) { return a /= s; }
  friend Jet operator/(T s, const Jet& a) { return constant(s, a.base_, a.order_) / a; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    a.check_compatible(b);
    const int K = a.order_;
    Jet out(a.base_, K);
    for (int d1 = 0; d1 <= K; ++d1) {
      for (int j1 = 0; j1 <= d1; ++j1) {
        const T x = a.coeffs_[index(d1 - j1, j1)];
        if (x == T{}) continue;
        for (int d2 = 0; d2 <= K - d1; ++d2) {
          const std::size_t row = static_cast<std::size_t>((d1 + d2) * (d1 + d2 + 1) / 2) + j1;
          const std::size_t src = static_cast<std::size_t>(d2 * (d2 + 1) / 2);
          for (int j2 = 0; j2 <= d2; ++j2) out.coeffs_[row + j2] += x * b.coeffs_[src + j2];
        }
      }
    }
    return out;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    a.check_compatible(b);
    const T b0 = b.coeffs_[0];
    if (b0 == T{}) {
      throw Error(ErrorKind::JetDivisionByZero, "division by a jet with zero constant term");
    }
    const int K = a.order_;
    Jet out(a.base_, K);
    // out * b = a, solved degree by degree.
    for (int d = 0; d <= K; ++d) {
      for (int j = 0; j <= d; ++j) {
        const int i = d - j;
        T s = a.coeffs_[index(i, j)];
        for (int d2 = 1; d2 <= d; ++d2) {
          for (int j2 = std::max(0, j - (d - d2)); j2 <= std::min(j, d2); ++j2) {
            s -= b.coeffs_[index(d2 - j2, j2)] * out.coeffs_[index(i - (d2 - j2), j - j2)];
          }
        }
        out.coeffs_[index(i, j)] = s / b0;
      }
    }
    return out;
  }

  friend Jet sqrt(const Jet& a) {
    using std::sqrt;
    const T a0 = a.coeffs_[0];
    if (!(a0 > T{})) {
      throw Error(ErrorKind::JetSqrtNonPositive, "sqrt of a jet with non-positive constant term");
    }
    const int K = a.order_;
    Jet out(a.base_, K);
    const T s0 = sqrt(a0);
    out.coeffs_[0] = s0;
    // out * out = a; the two (0,0)x(i,j) terms are isolated on the left.
    for (int d = 1; d <= K; ++d) {
      for (int j = 0; j <= d; ++j) {
        const int i = d - j;
        T s = a.coeffs_[index(i, j)];
        for (int d2 = 1; d2 <= d - 1; ++d2) {
          for (int j2 = std::max(0, j - (d - d2)); j2 <= std::min(j, d2); ++j2) {
            s -= out.coeffs_[index(d2 - j2, j2)] * out.coeffs_[index(i - (d2 - j2), j - j2)];
          }
        }
        out.coeffs_[index(i, j)] = s / (T(2) * s0);
      }
    }
    return out;
  }

  /// f(a) for a univariate f given by its scaled derivatives at a's constant
  /// term: taylor[n] = f^(n)(a0) / n!, n = 0..K.
  static Jet compose(const Jet& a, const std::vector<T>& taylor) {
    Jet delta = a;
    delta.coeffs_[0] = T{};
    Jet out = constant(taylor[static_cast<std::size_t>(a.order_)], a.base_, a.order_);
    for (int n = a.order_ - 1; n >= 0; --n) {
      out = out * delta;
      out.coeffs_[0] += taylor[static_cast<std::size_t>(n)];
    }
    return out;
  }

  friend Jet exp(const Jet& a) {
    using std::exp;
    std::vector<T> t(static_cast<std::size_t>(a.order_) + 1);
    T e = exp(a.coeffs_[0]);
    T fact = T(1);
    for (int n = 0; n <= a.order_; ++n) {
      if (n > 0) fact *= T(n);
      t[static_cast<std::size_t>(n)] = e / fact;
    }
    return compose(a, t);
  }

  friend Jet sin(const Jet& a) { return trig(a, 0); }
  friend Jet cos(const Jet& a) { return trig(a, 1); }

  friend Jet log(const Jet& a) {
    using std::log;
    const T a0 = a.coeffs_[0];
    if (!(a0 > T{})) {
      throw Error(ErrorKind::Domain, "log of a jet with non-positive constant term");
    }
    std::vector<T> t(static_cast<std::size_t>(a.order_) + 1);
    t[0] = log(a0);
    T p = T(1);
    for (int n = 1; n <= a.order_; ++n) {
      p *= a0;
      t[static_cast<std::size_t>(n)] = ((n % 2 == 1) ? T(1) : T(-1)) / (T(n) * p);
    }
    return compose(a, t);
  }

  friend Jet pow_int(const Jet& a, int n) {
    if (n < 0) return T(1) / pow_int(a, -n);
    Jet result = constant(T(1), a.base_, a.order_);
    Jet base = a;
    while (n > 0) {
      if (n & 1) result = result * base;
      n >>= 1;
      if (n > 0) base = base * base;
    }
    return result;
  }

  friend bool operator==(const Jet& a, const Jet& b) {
    return a.base_ == b.base_ && a.order_ == b.order_ && a.coeffs_ == b.coeffs_;
  }

 private:
  static T factorial(int n) {
    T f = T(1);
    for (int k = 2; k <= n; ++k) f *= T(k);
    return f;
  }

  static T ipow(T x, int n) {
    T r = T(1);
    for (int k = 0; k < n; ++k) r *= x;
    return r;
  }

  // sin(a0 + delta): the n-th derivative of sin is sin(x + n*pi/2); phase 1 gives cos.
  static Jet trig(const Jet& a, int phase) {
    using std::cos;
    using std::sin;
    const T s = sin(a.coeffs_[0]);
    const T c = cos(a.coeffs_[0]);
    const std::array<T, 4> cycle{s, c, -s, -c};
    std::vector<T> t(static_cast<std::size_t>(a.order_) + 1);
    T fact = T(1);
    for (int n = 0; n <= a.order_; ++n) {
      if (n > 0) fact *= T(n);
      t[static_cast<std::size_t>(n)] = cycle[static_cast<std::size_t>((n + phase) % 4)] / fact;
    }
    return compose(a, t);
  }

  void require_order(int needed, const char* what) const {
    if (order_ < needed) {
      throw Error(ErrorKind::InsufficientOrder,
                  std::string(what) + " needs jet order >= " + std::to_string(needed));
    }
  }

  void check_compatible(const Jet& o) const {
    if (!(base_ == o.base_)) {
      throw Error(ErrorKind::BasePointMismatch, "jets lifted at different base points");
    }
    if (order_ != o.order_) {
      throw Error(ErrorKind::OrderMismatch, "jet orders differ: " + std::to_string(order_) +
                                                " vs " + std::to_string(o.order_));
    }
  }

  ParamPoint base_;
  int order_ = 0;
  std::vector<T> coeffs_;
};

/// w_u * h_u + w_v * h_v, truncated to the lowest order involved. Iterate to
/// get higher directional derivatives.
template <class T>
Jet<T> directional_derivative(const Jet<T>& h, const Jet<T>& w_u, const Jet<T>& w_v) {
  if (h.order() < 1) {
    throw Error(ErrorKind::InsufficientOrder, "directional derivative of an order-0 jet");
  }
  const int k = std::min({h.order() - 1, w_u.order(), w_v.order()});
  return w_u.truncated(k) * h.du().truncated(k) + w_v.truncated(k) * h.dv().truncated(k);
}

/// Three jets sharing base point and order: a lifted map into R^3.
template <class T = double>
struct JetVec3 {
  std::array<Jet<T>, 3> c;

  int order() const { return c[0].order(); }
  ParamPoint base() const { return c[0].base(); }

  const Jet<T>& operator[](std::size_t k) const { return c[k]; }
  Jet<T>& operator[](std::size_t k) { return c[k]; }

  std::array<T, 3> value() const { return {c[0].value(), c[1].value(), c[2].value()}; }

  JetVec3 du() const { return {{c[0].du(), c[1].du(), c[2].du()}}; }
  JetVec3 dv() const { return {{c[0].dv(), c[1].dv(), c[2].dv()}}; }
  JetVec3 truncated(int k) const { return {{c[0].truncated(k), c[1].truncated(k), c[2].truncated(k)}}; }
  JetVec3 transposed() const { return {{c[0].transposed(), c[1].transposed(), c[2].transposed()}}; }

  JetVec3 operator-() const { return {{-c[0], -c[1], -c[2]}}; }
  friend JetVec3 operator+(const JetVec3& a, const JetVec3& b) {
    return {{a.c[0] + b.c[0], a.c[1] + b.c[1], a.c[2] + b.c[2]}};
  }
  friend JetVec3 operator-(const JetVec3& a, const JetVec3& b) {
    return {{a.c[0] - b.c[0], a.c[1] - b.c[1], a.c[2] - b.c[2]}};
  }
  friend JetVec3 operator*(const Jet<T>& s, const JetVec3& a) {
    return {{s * a.c[0], s * a.c[1], s * a.c[2]}};
  }
  friend JetVec3 operator*(T s, const JetVec3& a) { return {{s * a.c[0], s * a.c[1], s * a.c[2]}}; }
  friend JetVec3 operator/(const JetVec3& a, const Jet<T>& s) {
    const Jet<T> inv = T(1) / s;
    return inv * a;
  }
};

template <class T>
Jet<T> dot(const JetVec3<T>& a, const JetVec3<T>& b) {
  return a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2];
}

template <class T>
JetVec3<T> cross(const JetVec3<T>& a, const JetVec3<T>& b) {
  return {{a.c[1] * b.c[2] - a.c[2] * b.c[1], a.c[2] * b.c[0] - a.c[0] * b.c[2],
           a.c[0] * b.c[1] - a.c[1] * b.c[0]}};
}

template <class T>
Jet<T> norm(const JetVec3<T>& a) {
  return sqrt(dot(a, a));
}

template <class T>
Jet<T> det(const JetVec3<T>& a, const JetVec3<T>& b, const JetVec3<T>& c) {
  return dot(a, cross(b, c));
}

template <class T>
JetVec3<T> directional_derivative(const JetVec3<T>& h, const Jet<T>& w_u, const Jet<T>& w_v) {
  return {{directional_derivative(h.c[0], w_u, w_v), directional_derivative(h.c[1], w_u, w_v),
           directional_derivative(h.c[2], w_u, w_v)}};
}

/// Parameter-space vector field given by two jets.
template <class T = double>
struct JetField2 {
  Jet<T> u;
  Jet<T> v;

  Vec2 value() const { return {double(u.value()), double(v.value())}; }
  int order() const { return std::min(u.order(), v.order()); }
  JetField2 operator-() const { return {-u, -v}; }
};

template <class T>
Jet<T> directional_derivative(const Jet<T>& h, const JetField2<T>& w) {
  return directional_derivative(h, w.u, w.v);
}

template <class T>
JetVec3<T> directional_derivative(const JetVec3<T>& h, const JetField2<T>& w) {
  return directional_derivative(h, w.u, w.v);
}

}  // namespace caustic
