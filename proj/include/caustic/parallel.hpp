#pragma once

// Parallel surfaces f^t = f + t nu and their singularities.
//
// A point is singular for f^t when 1 - t kappa vanishes for one principal
// branch (the active branch). The identifier is kappa_active - 1/t, and the
// null direction is the active principal direction.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "caustic/config.hpp"
#include "caustic/edge_invariants.hpp"
#include "caustic/error.hpp"
#include "caustic/geometry.hpp"
#include "caustic/germ_order.hpp"

namespace caustic {

enum class SingularityTag {
  Regular,
  CuspidalEdge,
  Swallowtail,
  CuspidalButterfly,
  CuspidalLips,
  CuspidalBeaks,
  DegenerateOther,
  RankZero,
};

inline std::string_view to_string(SingularityTag t) {
  switch (t) {
    case SingularityTag::Regular: return "Regular";
    case SingularityTag::CuspidalEdge: return "CuspidalEdge";
    case SingularityTag::Swallowtail: return "Swallowtail";
    case SingularityTag::CuspidalButterfly: return "CuspidalButterfly";
    case SingularityTag::CuspidalLips: return "CuspidalLips";
    case SingularityTag::CuspidalBeaks: return "CuspidalBeaks";
    case SingularityTag::DegenerateOther: return "DegenerateOther";
    case SingularityTag::RankZero: return "RankZero";
  }
  return "?";
}

/// Criterion values behind a classification, all at the base point.
struct CriterionWitness {
  double identifier = 0.0;
  double d_u = 0.0, d_v = 0.0;  // gradient of the identifier
  double eta1 = 0.0;            // eta l
  double eta2 = 0.0;            // eta eta l
  double eta3 = 0.0;            // eta eta eta l
  double hess_det = 0.0;
  Vec2 eta;
  /// Scale s of the zero tests |x| <= tau (1 + s).
  double scale = 0.0;
  bool identically_zero = false;
};

struct SingularityClass {
  SingularityTag tag = SingularityTag::Regular;
  CriterionWitness witness;
};

/// The front criteria decision tree on an identifier l and null field eta.
/// The constant term of l is ignored: callers have already decided that the
/// point is singular.
inline SingularityClass classify_by_criteria(Jet<double> l, const JetField2<double>& eta,
                                             const Tolerances& tol) {
  l.set(0, 0, 0.0);
  SingularityClass c;
  CriterionWitness& w = c.witness;
  w.eta = eta.value();
  w.scale = l.max_abs_through(3);
  w.d_u = l.partial(1, 0);
  w.d_v = l.partial(0, 1);
  const Jet<double> e1 = directional_derivative(l, eta);
  const Jet<double> e2 = directional_derivative(e1, eta);
  const Jet<double> e3 = directional_derivative(e2, eta);
  w.eta1 = e1.value();
  w.eta2 = e2.value();
  w.eta3 = e3.value();
  w.hess_det = l.partial(2, 0) * l.partial(0, 2) - l.partial(1, 1) * l.partial(1, 1);
  w.identically_zero = !order(l, tol).is_finite();

  auto nz = [&](double x) { return !tol.is_zero(x, w.scale); };
  if (w.identically_zero) {
    c.tag = SingularityTag::DegenerateOther;
  } else if (nz(std::hypot(w.d_u, w.d_v))) {
    if (nz(w.eta1)) {
      c.tag = SingularityTag::CuspidalEdge;
    } else if (nz(w.eta2)) {
      c.tag = SingularityTag::Swallowtail;
    } else if (nz(w.eta3)) {
      c.tag = SingularityTag::CuspidalButterfly;
    } else {
      c.tag = SingularityTag::DegenerateOther;
    }
  } else if (nz(w.hess_det) && w.hess_det > 0.0) {
    c.tag = SingularityTag::CuspidalLips;
  } else if (nz(w.hess_det) && w.hess_det < 0.0 && nz(w.eta2)) {
    c.tag = SingularityTag::CuspidalBeaks;
  } else {
    c.tag = SingularityTag::DegenerateOther;
  }
  return c;
}

class ParallelSurface {
 public:
  ParallelSurface(Surface base, double t) : base_(std::move(base)), t_(t) {}

  const Surface& base() const noexcept { return base_; }
  double t() const noexcept { return t_; }

  /// Jets of f + t nu; one order is consumed by nu.
  JetVec3<double> lift(ParamPoint p, int order, const Tolerances& tol = {}) const {
    const FundamentalData d = fundamental_forms(base_.lift(p, std::max(order + 1, 2)), tol);
    return d.f.truncated(order) + t_ * d.nu.truncated(order);
  }

  Surface as_surface(const Tolerances& tol = {}) const {
    const ParallelSurface self = *this;
    return Surface([self, tol](ParamPoint p, int order) { return self.lift(p, order, tol); },
                   "parallel(t=" + std::to_string(t_) + ") of " + base_.label());
  }

 private:
  Surface base_;
  double t_;
};

inline ParallelSurface make_parallel(const Surface& s, double t) {
  if (!std::isfinite(t) || t == 0.0) {
    throw Error(ErrorKind::InvalidArgument, "parallel distance must be finite and nonzero");
  }
  return ParallelSurface(s, t);
}

/// Geometry of f at p together with the branch that makes f^t singular.
struct ParallelPoint {
  LocalGeometry geometry;
  int active = 0;  // 1 or 2
  Jet<double> lambda;
  JetField2<double> eta;

  int passive() const { return active == 1 ? 2 : 1; }
  const Jet<double>& kappa_active() const { return geometry.principal.kappa(active); }
  const Jet<double>& kappa_passive() const { return geometry.principal.kappa(passive()); }
};

/// Branch minimizing |1 - t kappa| at p, without a singularity test.
inline int nearest_branch(const PrincipalData& pd, double t) {
  return std::abs(1.0 - t * pd.kappa1.value()) <= std::abs(1.0 - t * pd.kappa2.value()) ? 1 : 2;
}

inline ParallelPoint parallel_point(const ParallelSurface& ps, ParamPoint p,
                                    const Tolerances& tol = {}) {
  ParallelPoint pp;
  pp.geometry = local_geometry(ps.base(), p, tol);
  PrincipalData& pd = pp.geometry.principal;
  const bool m1 = tol.singular_factor_vanishes(ps.t(), pd.kappa1.value());
  const bool m2 = tol.singular_factor_vanishes(ps.t(), pd.kappa2.value());
  if (m1 && m2) throw Error(ErrorKind::RankZero, "both principal factors vanish");
  if (!m1 && !m2) {
    throw Error(ErrorKind::NotSingular, "no principal curvature equals 1/t at the point");
  }
  pp.active = m1 ? 1 : 2;
  pd.labeling.active = pp.active;
  pd.labeling.reason = "parallel distance t = " + std::to_string(ps.t()) + " matches kappa" +
                       std::to_string(pp.active);
  pp.lambda = pp.kappa_active() - 1.0 / ps.t();
  pp.eta = pd.dir(pp.active);
  return pp;
}

/// Jet of kappa_active - 1/t at a singular point of f^t.
inline Jet<double> identifier_lambda(const ParallelSurface& ps, ParamPoint p,
                                     const Tolerances& tol = {}) {
  return parallel_point(ps, p, tol).lambda;
}

inline SingularityClass classify_parallel(const ParallelSurface& ps, ParamPoint p,
                                          const Tolerances& tol = {}) {
  const ParallelPoint pp = parallel_point(ps, p, tol);
  return classify_by_criteria(pp.lambda, pp.eta, tol);
}

/// Order of the identifier (constant term dropped, as the point is singular),
/// checked against the classification family.
inline GermOrder germ_order_of_identifier(const ParallelSurface& ps, ParamPoint p,
                                          const Tolerances& tol = {}) {
  const ParallelPoint pp = parallel_point(ps, p, tol);
  const SingularityClass c = classify_by_criteria(pp.lambda, pp.eta, tol);
  Jet<double> l = pp.lambda;
  l.set(0, 0, 0.0);
  const GermOrder o = order(l, tol);
  int expected = 0;
  switch (c.tag) {
    case SingularityTag::CuspidalEdge:
    case SingularityTag::Swallowtail:
    case SingularityTag::CuspidalButterfly: expected = 1; break;
    case SingularityTag::CuspidalLips:
    case SingularityTag::CuspidalBeaks: expected = 2; break;
    default: break;
  }
  if (expected != 0 && !(o == GermOrder::finite(expected))) {
    throw Error(ErrorKind::HypothesisFailure, "identifier order " + o.to_string() +
                                                  " contradicts class " +
                                                  std::string(to_string(c.tag)));
  }
  return o;
}

struct ParallelCurvatures {
  double gaussian_formula = 0.0;  // K / (1 - 2tH + t^2 K)
  double mean_formula = 0.0;      // (H - tK) / (1 - 2tH + t^2 K)
  double gaussian_direct = 0.0;   // from the fundamental forms of f^t
  double mean_direct = 0.0;
  Jet<double> gaussian, mean;     // formula values as jets
};

/// Curvatures of f^t at a regular point, by formula and directly. The direct
/// computation uses nu (the normal of f) for f^t, matching the formula's
/// orientation.
inline ParallelCurvatures parallel_curvatures(const ParallelSurface& ps, ParamPoint p,
                                              const Tolerances& tol = {}) {
  const LocalGeometry g = local_geometry(ps.base(), p, tol);
  const double t = ps.t();
  const Jet<double>& K = g.principal.gaussian;
  const Jet<double>& H = g.principal.mean;
  const Jet<double> den = 1.0 - 2.0 * t * H + t * t * K;
  if (tol.is_zero(den.value(), 1.0 + std::abs(t * t * K.value()))) {
    throw Error(ErrorKind::InvalidArgument, "point is singular for the parallel surface");
  }
  ParallelCurvatures out;
  out.gaussian = K / den;
  out.mean = (H - t * K) / den;
  out.gaussian_formula = out.gaussian.value();
  out.mean_formula = out.mean.value();

  const JetVec3<double> ft = g.forms.f.truncated(g.forms.nu.order()) + t * g.forms.nu;
  const JetVec3<double> a = ft.du(), b = ft.dv();
  const JetVec3<double> aa = a.du(), ab = a.dv(), bb = b.dv();
  const Vec3 n = g.forms.nu.value();
  const double E = dot(a.value(), a.value()), F = dot(a.value(), b.value()),
               G = dot(b.value(), b.value());
  const double L = dot(aa.value(), n), M = dot(ab.value(), n), N = dot(bb.value(), n);
  const double W = E * G - F * F;
  out.gaussian_direct = (L * N - M * M) / W;
  out.mean_direct = (E * N - 2.0 * F * M + G * L) / (2.0 * W);
  return out;
}

/// Front data of f^t near a singular curve: the active branch is re-chosen
/// at every point as the one closest to 1/t.
inline FrontData parallel_front(const ParallelSurface& ps, const Tolerances& tol = {}) {
  return [ps, tol](ParamPoint q, std::optional<Vec2> hint) {
    const LocalGeometry g = local_geometry(ps.base(), q, tol);
    const int b = nearest_branch(g.principal, ps.t());
    FrontJets fj;
    fj.map = g.forms.f.truncated(g.forms.nu.order()) + ps.t() * g.forms.nu;
    fj.normal = g.forms.nu;
    fj.identifier = g.principal.kappa(b) - 1.0 / ps.t();
    fj.eta = g.principal.dir(b);
    if (hint && dot(fj.eta.value(), *hint) < 0.0) fj.eta = -fj.eta;
    return fj;
  };
}

struct BoundednessReport {
  SingularityTag tag = SingularityTag::Regular;
  double kappa2_at_point = 0.0;  // passive branch
  GermOrder ord_kappa2 = GermOrder::at_least(0);
  bool rationally_bounded = false;
  bool bounded_near = false;
  std::size_t samples_checked = 0;
  double max_abs_kappa2_on_singular_set = 0.0;
};

namespace detail {

/// Passive principal curvature at a point of the singular set of f^t.
inline double passive_kappa_at(const ParallelSurface& ps, ParamPoint q, const Tolerances& tol) {
  const LocalGeometry g = local_geometry(ps.base(), q, tol);
  const int b = nearest_branch(g.principal, ps.t());
  return g.principal.kappa(b == 1 ? 2 : 1).value();
}

/// Unit vectors w with w^T Hess w = 0 for an indefinite 2x2 Hessian.
inline std::vector<Vec2> hessian_null_cone(double huu, double huv, double hvv) {
  std::vector<Vec2> out;
  if (huu == 0.0 && hvv == 0.0) return {Vec2{1.0, 0.0}, Vec2{0.0, 1.0}};
  if (std::abs(huu) >= std::abs(hvv)) {
    // huu x^2 + 2 huv x + hvv = 0 with w = (x, 1).
    const double disc = huv * huv - huu * hvv;
    const double r = std::sqrt(std::max(0.0, disc));
    for (double s : {-1.0, 1.0}) {
      const Vec2 w{(-huv + s * r) / huu, 1.0};
      out.push_back((1.0 / norm(w)) * w);
    }
  } else {
    const double disc = huv * huv - huu * hvv;
    const double r = std::sqrt(std::max(0.0, disc));
    for (double s : {-1.0, 1.0}) {
      const Vec2 w{1.0, (-huv + s * r) / hvv};
      out.push_back((1.0 / norm(w)) * w);
    }
  }
  return out;
}

}  // namespace detail

/// Boundedness of the Gaussian curvature of f^t near a singular point.
///
/// Non-degenerate classes: rationally bounded iff kappa2(p) = 0, bounded iff
/// kappa2 = 0 along the traced singular curve. Lips and beaks: rationally
/// bounded iff ord kappa2 = 2, bounded iff the singular set lies in
/// {kappa2 = 0}. kappa2 is always the passive branch.
inline BoundednessReport boundedness_report(const ParallelSurface& ps, ParamPoint p,
                                            int trace_steps = 20, const Tolerances& tol = {}) {
  const ParallelPoint pp = parallel_point(ps, p, tol);
  const SingularityClass c = classify_by_criteria(pp.lambda, pp.eta, tol);
  BoundednessReport r;
  r.tag = c.tag;
  const Jet<double>& k2 = pp.kappa_passive();
  r.kappa2_at_point = k2.value();
  r.ord_kappa2 = order(k2, tol);
  const double kscale = std::abs(pp.kappa_active().value());
  auto vanishes = [&](double k) { return tol.is_zero(k, kscale); };

  std::vector<ParamPoint> on_set{p};
  const FrontData front = parallel_front(ps, tol);
  const JetField field = identifier_field(front);
  TraceOptions opt;
  opt.steps_forward = trace_steps;
  opt.steps_backward = trace_steps;

  switch (c.tag) {
    case SingularityTag::CuspidalEdge:
    case SingularityTag::Swallowtail:
    case SingularityTag::CuspidalButterfly: {
      r.rationally_bounded = vanishes(r.kappa2_at_point);
      const ZeroCurve curve = trace_zero_curve(field, p, opt, tol);
      on_set = curve.samples;
      break;
    }
    case SingularityTag::CuspidalLips:
      // The singular set is the isolated point p and the identifier is a
      // definite quadratic, so K^t stays bounded on a punctured
      // neighbourhood exactly when kappa2 vanishes to second order.
      r.rationally_bounded = r.ord_kappa2 == GermOrder::finite(2);
      r.bounded_near = r.ord_kappa2.value() >= 2;
      r.samples_checked = 1;
      r.max_abs_kappa2_on_singular_set = std::abs(r.kappa2_at_point);
      return r;
    case SingularityTag::CuspidalBeaks: {
      r.rationally_bounded = r.ord_kappa2 == GermOrder::finite(2);
      const Jet<double>& l = pp.lambda;
      const auto cone = detail::hessian_null_cone(l.partial(2, 0), l.partial(1, 1), l.partial(0, 2));
      opt.steps_backward = 0;
      for (Vec2 w : cone) {
        for (double s : {-1.0, 1.0}) {
          opt.direction = s * w;
          const ZeroCurve curve =
              trace_zero_curve(field, p + (s * tol.degenerate_seed_offset) * w, opt, tol);
          on_set.insert(on_set.end(), curve.samples.begin(), curve.samples.end());
        }
      }
      break;
    }
    default:
      throw Error(ErrorKind::HypothesisFailure,
                  "boundedness is not defined for class " + std::string(to_string(c.tag)));
  }

  double worst = 0.0;
  for (const ParamPoint& q : on_set) worst = std::max(worst, std::abs(detail::passive_kappa_at(ps, q, tol)));
  r.samples_checked = on_set.size();
  r.max_abs_kappa2_on_singular_set = worst;
  r.bounded_near = vanishes(worst);
  return r;
}

struct ParallelNormalCurvature {
  double closed_form = 0.0;  // k1 k2 / (k1 - k2), k1 active
  std::optional<double> generic;
  std::optional<double> relative_difference;
  bool agrees = true;
};

/// Limiting normal curvature of f^t at a singular point. When the point is a
/// cuspidal edge the definition-level value is computed as well.
inline ParallelNormalCurvature limiting_normal_curvature_parallel(const ParallelSurface& ps,
                                                                  ParamPoint p,
                                                                  const Tolerances& tol = {}) {
  const ParallelPoint pp = parallel_point(ps, p, tol);
  const double k1 = pp.kappa_active().value();
  const double k2 = pp.kappa_passive().value();
  ParallelNormalCurvature out;
  out.closed_form = k1 * k2 / (k1 - k2);
  const SingularityClass c = classify_by_criteria(pp.lambda, pp.eta, tol);
  if (c.tag == SingularityTag::CuspidalEdge) {
    const EdgeInvariantReport g = generic_invariants_at(parallel_front(ps, tol), p, {}, tol);
    out.generic = g.kappa_nu;
    out.relative_difference = caustic::relative_difference(g.kappa_nu, out.closed_form);
    out.agrees = *out.relative_difference <= tol.cross_check_rel;
  }
  return out;
}

}  // namespace caustic
