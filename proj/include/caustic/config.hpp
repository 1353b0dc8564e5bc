#pragma once

#include <algorithm>
#include <cmath>

namespace caustic {

/// Numerical knobs shared by every module. Each field is a single documented
/// threshold; nothing else in the library hard-codes a tolerance.
struct Tolerances {
  /// Truncation order K of every lifted jet.
  int jet_order = 6;

  /// Relative zero test: |x| <= tau * (1 + scale). Used wherever a
  /// condition reads "= 0" or "!= 0".
  double tau = 1e-9;

  /// Singular-point detection for parallel surfaces:
  /// |1 - t*kappa| < tau_sing * (1 + |t|*|kappa|).
  double tau_sing = 1e-7;

  /// Focal surfaces are not evaluated where |kappa_branch| < tau_parab.
  double tau_parab = 1e-6;

  /// Absolute residual of a traced zero-curve sample after correction.
  double tau_trace = 1e-10;

  /// Default continuation step in parameter space.
  double trace_step = 1e-3;

  int max_corrector_iterations = 8;

  /// Relative agreement required between a closed form and the generic
  /// (definition-level) value of the same invariant.
  double cross_check_rel = 1e-5;

  /// Distance from a degenerate singular point at which curves through it
  /// are seeded.
  double degenerate_seed_offset = 1e-4;

  bool is_zero(double value, double scale) const {
    return std::abs(value) <= tau * (1.0 + std::abs(scale));
  }

  bool singular_factor_vanishes(double t, double kappa) const {
    return std::abs(1.0 - t * kappa) < tau_sing * (1.0 + std::abs(t) * std::abs(kappa));
  }
};

/// Relative difference with an absolute floor of one, so that values near
/// zero are compared absolutely.
inline double relative_difference(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

/// Plain relative error against a reference; falls back to absolute error
/// when the reference vanishes.
inline double relative_error(double value, double reference) {
  const double denom = std::abs(reference);
  return denom > 0 ? std::abs(value - reference) / denom : std::abs(value);
}

}  // namespace caustic
