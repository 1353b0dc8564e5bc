#pragma once

// Limiting normal curvature and singular curvature of a cuspidal edge,
// computed from their definitions for any front given as jets.
//
// Along the zero set of an identifier l, the Hamiltonian field
// xi = (-l_v, l_u) is tangent to the singular curve, so its flow is a
// parametrization gamma of that curve. Derivatives of the image curve are
// then directional derivatives of the front X:
//
//   gamma_hat'  = xi X,      gamma_hat'' = xi (xi X),
//
// both read off jets at a single point; no finite differences of samples.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "caustic/config.hpp"
#include "caustic/error.hpp"
#include "caustic/jet.hpp"

namespace caustic {

/// Jets of a front at one point.
struct FrontJets {
  JetVec3<double> map;
  JetVec3<double> normal;  // unit normal of the front
  Jet<double> identifier;  // vanishes exactly on the singular set
  JetField2<double> eta;   // null vector field on the singular set
};

/// Lifts a front at a point. `eta_hint` lets the provider keep the sign of
/// eta continuous along a curve; providers may ignore it.
using FrontData = std::function<FrontJets(ParamPoint, std::optional<Vec2>)>;

/// Scalar field sampled as a jet of order >= 1.
using JetField = std::function<Jet<double>(ParamPoint)>;

struct ZeroCurve {
  std::vector<ParamPoint> samples;
  std::vector<Vec2> tangents;  // unit, in parameter space
  double step = 0.0;
  std::size_t seed_index = 0;
};

struct TraceOptions {
  int steps_forward = 20;
  int steps_backward = 0;
  /// Falls back to Tolerances::trace_step when not positive.
  double step = 0.0;
  /// Orients the forward direction; defaults to the rotated gradient.
  std::optional<Vec2> direction;
};

namespace detail {

struct FieldSample {
  double value;
  Vec2 grad;
};

inline FieldSample sample(const JetField& field, ParamPoint p) {
  const Jet<double> j = field(p);
  if (j.order() < 1) throw Error(ErrorKind::InsufficientOrder, "traced field needs order >= 1");
  return {j.value(), {j.coeff(1, 0), j.coeff(0, 1)}};
}

/// Newton iterations along the gradient. Returns the corrected point or
/// nullopt if the residual did not reach tau_trace.
inline std::optional<ParamPoint> correct(const JetField& field, ParamPoint q,
                                         const Tolerances& tol) {
  for (int it = 0; it <= tol.max_corrector_iterations; ++it) {
    const FieldSample s = sample(field, q);
    if (std::abs(s.value) < tol.tau_trace) return q;
    if (it == tol.max_corrector_iterations) break;
    const double g2 = dot(s.grad, s.grad);
    if (!(g2 > 0.0) || !std::isfinite(g2)) return std::nullopt;
    q = q + (-s.value / g2) * s.grad;
  }
  return std::nullopt;
}

inline Vec2 unit_tangent(const FieldSample& s) {
  const Vec2 t = perp(s.grad);
  return (1.0 / norm(t)) * t;
}

}  // namespace detail

/// Gradient-based degeneracy test shared by tracing and the report.
inline bool is_degenerate_zero(const Jet<double>& j, const Tolerances& tol) {
  const double g = std::hypot(j.coeff(1, 0), j.coeff(0, 1));
  return tol.is_zero(g, j.max_abs_through(2));
}

/// Predictor-corrector continuation of field = 0 from `seed`.
///
/// The seed is first corrected onto the curve. Each step predicts along the
/// rotated gradient, then runs Newton along the gradient; a failing step is
/// retried with half the step length up to four times.
inline ZeroCurve trace_zero_curve(const JetField& field, ParamPoint seed,
                                  const TraceOptions& options = {}, const Tolerances& tol = {}) {
  const double h = options.step > 0.0 ? options.step : tol.trace_step;
  const Jet<double> at_seed = field(seed);
  if (is_degenerate_zero(at_seed, tol)) {
    throw Error(ErrorKind::DegenerateSeed, "gradient of the traced field vanishes at the seed");
  }
  const auto start = detail::correct(field, seed, tol);
  if (!start) throw Error(ErrorKind::StepFailure, "seed could not be corrected onto the zero set");

  Vec2 t0 = detail::unit_tangent(detail::sample(field, *start));
  if (options.direction && dot(t0, *options.direction) < 0.0) t0 = -t0;

  auto march = [&](Vec2 direction, int steps) {
    std::vector<ParamPoint> pts;
    std::vector<Vec2> tans;
    ParamPoint x = *start;
    Vec2 t = direction;
    for (int k = 0; k < steps; ++k) {
      std::optional<ParamPoint> next;
      double len = h;
      for (int attempt = 0; attempt < 5 && !next; ++attempt, len *= 0.5) {
        next = detail::correct(field, x + len * t, tol);
      }
      if (!next) {
        throw Error(ErrorKind::StepFailure,
                    "corrector did not converge after step " + std::to_string(k));
      }
      const detail::FieldSample s = detail::sample(field, *next);
      if (tol.is_zero(norm(s.grad), 1.0)) {
        throw Error(ErrorKind::StepFailure, "traced curve reached a critical point of the field");
      }
      Vec2 nt = detail::unit_tangent(s);
      if (dot(nt, t) < 0.0) nt = -nt;
      x = *next;
      t = nt;
      pts.push_back(x);
      tans.push_back(t);
    }
    return std::make_pair(pts, tans);
  };

  const auto back = march(-t0, options.steps_backward);
  const auto fwd = march(t0, options.steps_forward);

  ZeroCurve c;
  c.step = h;
  for (std::size_t k = back.first.size(); k-- > 0;) {
    c.samples.push_back(back.first[k]);
    c.tangents.push_back(-back.second[k]);
  }
  c.seed_index = c.samples.size();
  c.samples.push_back(*start);
  c.tangents.push_back(t0);
  for (std::size_t k = 0; k < fwd.first.size(); ++k) {
    c.samples.push_back(fwd.first[k]);
    c.tangents.push_back(fwd.second[k]);
  }
  return c;
}

/// Sign bookkeeping of the singular curvature.
struct SignData {
  double eta_lambda = 0.0;      // eta applied to det(X_u, X_v, n)
  double det_gamma_eta = 0.0;   // det(gamma', eta) in parameter space
  double eta_identifier = 0.0;  // eta applied to the identifier
  Vec2 xi;                      // gamma' = xi at the point
  Vec2 eta;
  double det_numerator = 0.0;   // det(gamma_hat', gamma_hat'', n)
  double speed = 0.0;           // |gamma_hat'|
  bool flipped_eta = false;
  bool flipped_orientation = false;
  bool flipped_normal = false;
};

enum class InvariantMethod { Generic, ClosedForm, Both };

inline std::string_view to_string(InvariantMethod m) {
  switch (m) {
    case InvariantMethod::Generic: return "generic";
    case InvariantMethod::ClosedForm: return "closed-form";
    case InvariantMethod::Both: return "both";
  }
  return "?";
}

struct EdgeInvariantReport {
  ParamPoint at;
  double kappa_nu = 0.0;
  double kappa_s = 0.0;
  SignData sign_data;
  InvariantMethod method = InvariantMethod::Generic;
  std::optional<std::size_t> sample_index;
};

/// Orientation choices. All three are pure conventions: kappa_s must not
/// depend on any of them and kappa_nu flips only with the normal.
struct InvariantOptions {
  bool flip_eta = false;
  bool flip_orientation = false;
  bool flip_normal = false;
};

/// Invariants at q from the front's jets at q. q must lie on the singular
/// curve (identifier ~ 0) and be a cuspidal edge (eta identifier != 0).
inline EdgeInvariantReport generic_invariants_at(const FrontData& front, ParamPoint q,
                                                 const InvariantOptions& opts = {},
                                                 const Tolerances& tol = {},
                                                 std::optional<Vec2> eta_hint = std::nullopt) {
  const FrontJets fj = front(q, eta_hint);
  const Jet<double>& l = fj.identifier;
  if (l.order() < 3) {
    throw Error(ErrorKind::InsufficientOrder, "identifier needs jet order >= 3 for curvature");
  }
  JetField2<double> eta = opts.flip_eta ? -fj.eta : fj.eta;
  const JetVec3<double> n = opts.flip_normal ? -fj.normal : fj.normal;

  // Hamiltonian field of the identifier; reversing it reverses the curve.
  JetField2<double> xi{-1.0 * l.dv(), l.du()};
  if (opts.flip_orientation) xi = -xi;

  if (!tol.is_zero(l.value(), l.max_abs_through(2))) {
    throw Error(ErrorKind::NotSingular, "identifier does not vanish at the point");
  }
  const Jet<double> eta_l = directional_derivative(l, eta);
  if (tol.is_zero(eta_l.value(), l.max_abs_through(2))) {
    throw Error(ErrorKind::NotCuspidalEdge, "eta of the identifier vanishes");
  }

  const JetVec3<double> g1 = directional_derivative(fj.map, xi);
  const JetVec3<double> g2 = directional_derivative(g1, xi);
  const Vec3 d1 = g1.value();
  const Vec3 d2 = g2.value();
  const Vec3 nv = n.value();

  const JetVec3<double> Xu = fj.map.du(), Xv = fj.map.dv();
  const int ko = std::min(Xu.order(), n.order());
  const Jet<double> lambda = det(Xu.truncated(ko), Xv.truncated(ko), n.truncated(ko));
  const double eta_lambda = directional_derivative(lambda, eta).value();

  EdgeInvariantReport r;
  r.at = q;
  SignData& s = r.sign_data;
  s.xi = xi.value();
  s.eta = eta.value();
  s.eta_identifier = eta_l.value();
  s.eta_lambda = eta_lambda;
  s.det_gamma_eta = det(s.xi, s.eta);
  s.speed = norm(d1);
  s.det_numerator = det(d1, d2, nv);
  s.flipped_eta = opts.flip_eta;
  s.flipped_orientation = opts.flip_orientation;
  s.flipped_normal = opts.flip_normal;
  if (!(s.speed > 0.0)) throw Error(ErrorKind::NotCuspidalEdge, "singular curve image is stationary");

  const double sgn = (s.eta_lambda * s.det_gamma_eta) >= 0.0 ? 1.0 : -1.0;
  r.kappa_nu = dot(d2, nv) / (s.speed * s.speed);
  r.kappa_s = sgn * s.det_numerator / (s.speed * s.speed * s.speed);
  return r;
}

inline EdgeInvariantReport generic_invariants(const FrontData& front, const ZeroCurve& curve,
                                              std::size_t index, const InvariantOptions& opts = {},
                                              const Tolerances& tol = {}) {
  if (index >= curve.samples.size()) {
    throw Error(ErrorKind::InvalidArgument, "sample index out of range");
  }
  EdgeInvariantReport r = generic_invariants_at(front, curve.samples[index], opts, tol);
  r.sample_index = index;
  return r;
}

struct CurveInvariantEntry {
  std::size_t index = 0;
  std::optional<EdgeInvariantReport> report;
  std::string skipped;  // reason when report is empty
};

/// generic_invariants at every sample; non-edge samples are kept with a
/// reason instead of aborting the sweep.
inline std::vector<CurveInvariantEntry> invariants_along_curve(const FrontData& front,
                                                               const ZeroCurve& curve,
                                                               const InvariantOptions& opts = {},
                                                               const Tolerances& tol = {}) {
  std::vector<CurveInvariantEntry> out(curve.samples.size());
  for (std::size_t i = 0; i < curve.samples.size(); ++i) {
    out[i].index = i;
    try {
      out[i].report = generic_invariants(front, curve, i, opts, tol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotCuspidalEdge) throw;
      out[i].skipped = e.what();
    }
  }
  return out;
}

/// The identifier of a front as a traceable field.
inline JetField identifier_field(const FrontData& front) {
  return [front](ParamPoint p) { return front(p, std::nullopt).identifier; };
}

}  // namespace caustic
