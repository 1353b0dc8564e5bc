#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "caustic/config.hpp"
#include "caustic/jet.hpp"

namespace caustic {

/// Order of a function germ read off a jet: either an exact value or
/// "at least K+1" when every coefficient the jet carries vanishes.
class GermOrder {
 public:
  static GermOrder finite(int n) { return GermOrder(n, true); }
  static GermOrder at_least(int n) { return GermOrder(n, false); }

  bool is_finite() const noexcept { return finite_; }
  /// The exact order, or the lower bound when not finite.
  int value() const noexcept { return n_; }

  friend bool operator==(const GermOrder&, const GermOrder&) = default;

  std::string to_string() const {
    return finite_ ? std::to_string(n_) : ">=" + std::to_string(n_);
  }

 private:
  GermOrder(int n, bool finite) : n_(n), finite_(finite) {}
  int n_;
  bool finite_;
};

inline std::ostream& operator<<(std::ostream& os, const GermOrder& g) { return os << g.to_string(); }

/// Smallest total degree carrying a nonzero coefficient. A coefficient of
/// degree d counts as zero when it is below tau * max(1, largest coefficient
/// of degree <= d).
template <class T>
GermOrder order(const Jet<T>& h, const Tolerances& tol = {}) {
  using std::abs;
  for (int d = 0; d <= h.order(); ++d) {
    const double bound = tol.tau * std::max(1.0, double(h.max_abs_through(d)));
    for (int j = 0; j <= d; ++j) {
      if (double(abs(h.coeff(d - j, j))) > bound) return GermOrder::finite(d);
    }
  }
  return GermOrder::at_least(h.order() + 1);
}

struct RationalOrder {
  /// ord h1 - ord h2; when h1 vanishes to jet order this is a lower bound.
  int value = 0;
  bool lower_bound = false;

  bool rationally_bounded() const { return value == 0 && !lower_bound; }
  bool rationally_continuous() const { return value == 1 && !lower_bound; }
};

/// Rational order of the quotient h1 / h2.
template <class T>
RationalOrder rational_order(const Jet<T>& h1, const Jet<T>& h2, const Tolerances& tol = {}) {
  const GermOrder o2 = order(h2, tol);
  if (!o2.is_finite()) {
    throw Error(ErrorKind::Undecidable,
                "denominator vanishes to jet order " + std::to_string(h2.order()));
  }
  const GermOrder o1 = order(h1, tol);
  return RationalOrder{o1.value() - o2.value(), !o1.is_finite()};
}

}  // namespace caustic
