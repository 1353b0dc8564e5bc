#pragma once

// Focal surfaces C_b = f + nu / kappa_b.
//
// With v_b the principal direction of branch b, dnu(v_b) = -kappa_b df(v_b)
// gives dC(v_b) = -(v_b kappa_b / kappa_b^2) nu. So v_b is a null field,
// v_b kappa_b is an identifier, and e_b = df(v_b) / |df(v_b)| is a unit
// normal of C_b.
//
// The closed forms below hold in curvature-line coordinates where the branch
// is kappa_1 = L/E. If the branch is N/G instead, the chart is transposed
// first; that flips nu and therefore the signs of both curvatures.

#include <cmath>
#include <optional>
#include <string>

#include "caustic/config.hpp"
#include "caustic/edge_invariants.hpp"
#include "caustic/error.hpp"
#include "caustic/geometry.hpp"
#include "caustic/parallel.hpp"

namespace caustic {

class FocalSurface {
 public:
  FocalSurface(Surface base, int branch) : base_(std::move(base)), branch_(branch) {}

  const Surface& base() const noexcept { return base_; }
  int branch() const noexcept { return branch_; }

 private:
  Surface base_;
  int branch_;
};

inline FocalSurface make_focal(const Surface& s, int branch) {
  if (branch != 1 && branch != 2) {
    throw Error(ErrorKind::InvalidArgument, "focal branch must be 1 or 2");
  }
  return FocalSurface(s, branch);
}

/// Jets of a focal surface and its frontal data at one point.
struct FocalPoint {
  LocalGeometry geometry;
  Jet<double> kappa;       // kappa_b, order K-2
  JetField2<double> dir;   // v_b, order K-2
  JetVec3<double> map;     // C_b, order K-2
  JetVec3<double> normal;  // e_b, order K-2
  Jet<double> identifier;  // v_b kappa_b, order K-3
};

inline FocalPoint focal_point(const FocalSurface& fs, ParamPoint p, const Tolerances& tol = {},
                              std::optional<Vec2> eta_hint = std::nullopt) {
  FocalPoint fp;
  fp.geometry = local_geometry(fs.base(), p, tol);
  const FundamentalData& d = fp.geometry.forms;
  const PrincipalData& pd = fp.geometry.principal;
  fp.kappa = pd.kappa(fs.branch());
  if (std::abs(fp.kappa.value()) < tol.tau_parab) {
    throw Error(ErrorKind::ParabolicPoint,
                "kappa" + std::to_string(fs.branch()) + " vanishes at the point");
  }
  fp.dir = pd.dir(fs.branch());
  if (eta_hint && dot(fp.dir.value(), *eta_hint) < 0.0) fp.dir = -fp.dir;
  const int k = fp.kappa.order();
  fp.map = d.f.truncated(k) + d.nu.truncated(k) / fp.kappa;
  const JetVec3<double> dfv = fp.dir.u * d.fu.truncated(k) + fp.dir.v * d.fv.truncated(k);
  fp.normal = dfv / norm(dfv);
  fp.identifier = directional_derivative(fp.kappa, fp.dir);
  return fp;
}

/// Jets of C_b lifted at p, order K-2.
inline JetVec3<double> evaluate_focal(const FocalSurface& fs, ParamPoint p,
                                      const Tolerances& tol = {}) {
  return focal_point(fs, p, tol).map;
}

struct FocalIdentifier {
  Jet<double> value;
  /// True when the signed area density det(C_u, C_v, e) was used; otherwise
  /// v_b kappa_b.
  bool area_density = false;
};

/// Identifier of the singular set of C_b: the signed area density in
/// curvature-line coordinates, v_b kappa_b in general coordinates.
inline FocalIdentifier focal_identifier(const FocalSurface& fs, ParamPoint p,
                                        const Tolerances& tol = {}) {
  const FocalPoint fp = focal_point(fs, p, tol);
  if (is_curvature_line(fp.geometry.forms, tol)) {
    const int k = fp.map.order() - 1;
    const Jet<double> lam = det(fp.map.du(), fp.map.dv(), fp.normal.truncated(k));
    return {lam, true};
  }
  return {fp.identifier, false};
}

inline FrontData focal_front(const FocalSurface& fs, const Tolerances& tol = {}) {
  return [fs, tol](ParamPoint q, std::optional<Vec2> hint) {
    const FocalPoint fp = focal_point(fs, q, tol, hint);
    return FrontJets{fp.map, fp.normal, fp.identifier, fp.dir};
  };
}

/// Regular, CuspidalEdge or DegenerateOther. Higher classes of focal
/// singularities are not assigned; their criterion values are still in the
/// witness.
inline SingularityClass classify_focal(const FocalSurface& fs, ParamPoint p,
                                       const Tolerances& tol = {}) {
  const FocalPoint fp = focal_point(fs, p, tol);
  const Jet<double>& l = fp.identifier;
  SingularityClass c;
  CriterionWitness& w = c.witness;
  w.identifier = l.value();
  w.scale = l.max_abs_through(2);
  w.d_u = l.partial(1, 0);
  w.d_v = l.partial(0, 1);
  w.eta = fp.dir.value();
  const Jet<double> e1 = directional_derivative(l, fp.dir);
  const Jet<double> e2 = directional_derivative(e1, fp.dir);
  w.eta1 = e1.value();
  w.eta2 = e2.value();
  w.hess_det = l.partial(2, 0) * l.partial(0, 2) - l.partial(1, 1) * l.partial(1, 1);
  if (!tol.is_zero(w.identifier, w.scale)) {
    c.tag = SingularityTag::Regular;
  } else if (!tol.is_zero(w.eta1, w.scale)) {
    c.tag = SingularityTag::CuspidalEdge;
  } else {
    c.tag = SingularityTag::DegenerateOther;
  }
  return c;
}

/// Curvature-line data with the focal branch as kappa1 = L/E.
struct CurvatureLineFrame {
  FundamentalData forms;
  Jet<double> kappa1, kappa2;  // L/E and N/G, order K-2
  bool transposed = false;
  ParamPoint at;               // base point in the frame's chart

  /// The frame's unit normal of C_1, e1 = f_u / |f_u|.
  Vec3 e1() const {
    const Vec3 fu = forms.fu.value();
    return (1.0 / norm(fu)) * fu;
  }
};

inline CurvatureLineFrame curvature_line_frame(const FocalSurface& fs, ParamPoint p,
                                               const Tolerances& tol = {}) {
  const LocalGeometry g = local_geometry(fs.base(), p, tol);
  require_curvature_line(g.forms, tol);
  const int k = g.forms.L.order();
  const double kb = g.principal.kappa(fs.branch()).value();
  const double kL = (g.forms.L / g.forms.E.truncated(k)).value();
  const double kN = (g.forms.N / g.forms.G.truncated(k)).value();

  CurvatureLineFrame fr;
  fr.transposed = std::abs(kN - kb) < std::abs(kL - kb);
  fr.at = fr.transposed ? ParamPoint{p.v, p.u} : p;
  fr.forms = fr.transposed
                 ? fundamental_forms(fs.base().transposed().lift(fr.at, tol.jet_order), tol)
                 : g.forms;
  fr.kappa1 = fr.forms.L / fr.forms.E.truncated(k);
  fr.kappa2 = fr.forms.N / fr.forms.G.truncated(k);
  return fr;
}

struct FocalGaussianCurvature {
  double closed_form = 0.0;  // -k1^4 (k2)_u / ((k1)_u (k1 - k2)^2)
  double direct = 0.0;       // det II / det I of the C jets
  std::optional<double> constant_curvature_form;  // c k1^4 / (c - k1^2)^2
  std::optional<double> base_gaussian;            // c when constant
  double relative_difference = 0.0;
};

/// Gaussian curvature of C_b at a regular focal point in curvature-line
/// coordinates.
inline FocalGaussianCurvature focal_gaussian_curvature(const FocalSurface& fs, ParamPoint p,
                                                       const Tolerances& tol = {}) {
  const CurvatureLineFrame fr = curvature_line_frame(fs, p, tol);
  const double k1 = fr.kappa1.value(), k2 = fr.kappa2.value();
  const double k1u = fr.kappa1.partial(1, 0), k2u = fr.kappa2.partial(1, 0);
  if (tol.is_zero(k1u, fr.kappa1.max_abs_through(1))) {
    throw Error(ErrorKind::HypothesisFailure, "focal surface is singular at the point");
  }
  if (std::abs(k1) < tol.tau_parab) throw Error(ErrorKind::ParabolicPoint, "kappa1 vanishes");
  FocalGaussianCurvature out;
  out.closed_form = -std::pow(k1, 4) * k2u / (k1u * (k1 - k2) * (k1 - k2));

  const FocalPoint fp = focal_point(fs, p, tol);
  const JetVec3<double> a = fp.map.du(), b = fp.map.dv();
  const Vec3 au = a.value(), bv = b.value();
  const Vec3 n = fp.normal.value();
  const double E = dot(au, au), F = dot(au, bv), G = dot(bv, bv);
  const double L = dot(a.du().value(), n), M = dot(a.dv().value(), n), N = dot(b.dv().value(), n);
  out.direct = (L * N - M * M) / (E * G - F * F);
  out.relative_difference = caustic::relative_error(out.direct, out.closed_form);

  const LocalGeometry g = local_geometry(fs.base(), p, tol);
  if (const auto c = constant_gaussian_curvature(g.principal, tol)) {
    out.base_gaussian = *c;
    out.constant_curvature_form = *c * std::pow(k1, 4) / ((*c - k1 * k1) * (*c - k1 * k1));
  }
  return out;
}

namespace detail {

/// Shared hypotheses of the focal edge closed forms.
inline void require_focal_edge_hypotheses(const CurvatureLineFrame& fr, const Tolerances& tol) {
  const double k1 = fr.kappa1.value();
  if (!tol.is_zero(fr.kappa2.value(), k1)) {
    throw Error(ErrorKind::Kappa2Nonzero,
                "kappa2 = " + std::to_string(fr.kappa2.value()) + " at the point");
  }
  const double scale = fr.kappa1.max_abs_through(2);
  if (!tol.is_zero(fr.kappa1.partial(1, 0), scale)) {
    throw Error(ErrorKind::NotCuspidalEdge, "(kappa1)_u != 0: the focal surface is regular");
  }
  if (tol.is_zero(fr.kappa1.partial(2, 0), scale)) {
    throw Error(ErrorKind::NotCuspidalEdge, "(kappa1)_uu = 0: not a cuspidal edge");
  }
}

}  // namespace detail

struct FocalEdgeValue {
  double value = 0.0;
  /// Unit normal of C_1 the value refers to (f_u / |f_u| in the frame).
  Vec3 normal;
  bool transposed = false;
};

/// Limiting normal curvature of C_1 at a cuspidal edge with kappa2 = 0.
inline FocalEdgeValue kn_focal_closed_form(const FocalSurface& fs, ParamPoint p,
                                           const Tolerances& tol = {}) {
  const CurvatureLineFrame fr = curvature_line_frame(fs, p, tol);
  detail::require_focal_edge_hypotheses(fr, tol);
  const double k1 = fr.kappa1.value();
  const double k2u = fr.kappa2.partial(1, 0);
  const double k1v = fr.kappa1.partial(0, 1);
  const double E = fr.forms.E.value(), G = fr.forms.G.value();
  const double value = -std::pow(k1, 3) * k2u * G / (std::sqrt(E) * (std::pow(k1, 4) * G + k1v * k1v));
  return {value, fr.e1(), fr.transposed};
}

/// Singular curvature of C_1 at a cuspidal edge with kappa2 = 0.
inline FocalEdgeValue ks_focal_closed_form(const FocalSurface& fs, ParamPoint p,
                                           const Tolerances& tol = {}) {
  const CurvatureLineFrame fr = curvature_line_frame(fs, p, tol);
  detail::require_focal_edge_hypotheses(fr, tol);
  const Jet<double>& k = fr.kappa1;
  const double k1 = k.value();
  const double kv = k.partial(0, 1);
  const double kuu = k.partial(2, 0), kuv = k.partial(1, 1), kvv = k.partial(0, 2);
  const double k2v = fr.kappa2.partial(0, 1);
  const double G = fr.forms.G.value();
  const double Gv = fr.forms.G.partial(0, 1);
  const double gamma222 = Gv / (2.0 * G);
  const double hess = kuu * kvv - kuv * kuv;
  const double delta = std::sqrt(std::pow(k1, 4) * G + kv * kv);
  const double sgn = kuu > 0.0 ? 1.0 : -1.0;
  const double value = sgn * std::pow(k1, 3) * std::sqrt(G) / (kuu * std::pow(delta, 3)) *
                       (k1 * hess - kv * kuu * (gamma222 * k1 + 2.0 * kv - k2v));
  return {value, fr.e1(), fr.transposed};
}

/// Reduced form at lips/beaks points, sgn(k_uu) det Hess / (k_uu k1^2 G).
inline double ks_focal_reduced(const FocalSurface& fs, ParamPoint p, const Tolerances& tol = {}) {
  const CurvatureLineFrame fr = curvature_line_frame(fs, p, tol);
  detail::require_focal_edge_hypotheses(fr, tol);
  const Jet<double>& k = fr.kappa1;
  if (!tol.is_zero(k.partial(0, 1), k.max_abs_through(2))) {
    throw Error(ErrorKind::HypothesisFailure, "(kappa1)_v != 0: not a lips/beaks point");
  }
  const double kuu = k.partial(2, 0);
  const double hess = kuu * k.partial(0, 2) - k.partial(1, 1) * k.partial(1, 1);
  const double sgn = kuu > 0.0 ? 1.0 : -1.0;
  return sgn * hess / (kuu * k.value() * k.value() * fr.forms.G.value());
}

}  // namespace caustic
