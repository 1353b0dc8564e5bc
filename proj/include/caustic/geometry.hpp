#pragma once

// First and second fundamental forms, principal curvatures and directions of
// a parametrized surface, all carried as jets at a base point.
//
// Conventions: nu = f_u x f_v / |f_u x f_v|, L = <f_uu, nu>, M = <f_uv, nu>,
// N = <f_vv, nu>. Jet orders for an input of order K: f_u, f_v, nu and
// E, F, G have order K-1; L, M, N and everything curvature-valued have K-2.

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "caustic/config.hpp"
#include "caustic/error.hpp"
#include "caustic/expr.hpp"
#include "caustic/jet.hpp"

namespace caustic {

/// Anything that can be lifted to jets at a point: a parsed expression or a
/// derived map (parallel or focal surface, transposed chart).
class Surface {
 public:
  using LiftFn = std::function<JetVec3<double>(ParamPoint, int)>;

  explicit Surface(SurfaceExpr expr)
      : expr_(std::move(expr)),
        lift_([e = *expr_](ParamPoint p, int order) { return lift_surface<double>(e, p, order); }),
        label_(to_string(*expr_)) {}

  Surface(LiftFn lift, std::string label) : lift_(std::move(lift)), label_(std::move(label)) {}

  static Surface parse(std::string_view text) { return Surface(parse_surface(text)); }

  JetVec3<double> lift(ParamPoint p, int order) const { return lift_(p, order); }
  Vec3 point(ParamPoint p) const { return lift_(p, 0).value(); }

  const std::optional<SurfaceExpr>& expression() const noexcept { return expr_; }
  const std::string& label() const noexcept { return label_; }

  /// The chart (u, v) -> f(v, u). Swapping parameters flips nu.
  Surface transposed() const {
    LiftFn inner = lift_;
    return Surface(
        [inner](ParamPoint p, int order) { return inner(ParamPoint{p.v, p.u}, order).transposed(); },
        "transpose of " + label_);
  }

 private:
  std::optional<SurfaceExpr> expr_;
  LiftFn lift_;
  std::string label_;
};

struct FundamentalData {
  JetVec3<double> f;
  JetVec3<double> fu, fv;
  JetVec3<double> fuu, fuv, fvv;
  Jet<double> E, F, G;
  Jet<double> L, M, N;
  JetVec3<double> nu;

  /// Same surface with the opposite unit normal: L, M, N change sign.
  FundamentalData with_flipped_normal() const {
    FundamentalData out = *this;
    out.nu = -nu;
    out.L = -L;
    out.M = -M;
    out.N = -N;
    return out;
  }
};

/// Fundamental forms of f; nu is taken along f_u x f_v.
inline FundamentalData fundamental_forms(const JetVec3<double>& f, const Tolerances& tol = {}) {
  if (f.order() < 2) {
    throw Error(ErrorKind::InsufficientOrder, "fundamental forms need jet order >= 2");
  }
  FundamentalData d;
  d.f = f;
  d.fu = f.du();
  d.fv = f.dv();
  d.fuu = d.fu.du();
  d.fuv = d.fu.dv();
  d.fvv = d.fv.dv();
  const JetVec3<double> n = cross(d.fu, d.fv);
  const Jet<double> area2 = dot(n, n);
  const double scale = std::max(1.0, dot(d.fu, d.fu).value() * dot(d.fv, d.fv).value());
  if (!(area2.value() > tol.tau * scale)) {
    throw Error(ErrorKind::RankDeficient, "f_u x f_v vanishes at the base point");
  }
  d.nu = n / sqrt(area2);
  d.E = dot(d.fu, d.fu);
  d.F = dot(d.fu, d.fv);
  d.G = dot(d.fv, d.fv);
  const int k = f.order() - 2;
  const JetVec3<double> nu2 = d.nu.truncated(k);
  d.L = dot(d.fuu, nu2);
  d.M = dot(d.fuv, nu2);
  d.N = dot(d.fvv, nu2);
  return d;
}

/// How the two branches are named.
struct BranchLabeling {
  /// kappa1 >= kappa2 at the base point.
  static constexpr const char* rule = "descending value at base point";
  /// Branch (1 or 2) singled out by a caller, 0 if none.
  int active = 0;
  std::string reason;
};

struct PrincipalData {
  Jet<double> kappa1, kappa2;
  /// Unnormalized principal directions in parameter space.
  JetField2<double> dir1, dir2;
  Jet<double> gaussian, mean;
  BranchLabeling labeling;

  const Jet<double>& kappa(int branch) const { return branch == 1 ? kappa1 : kappa2; }
  const JetField2<double>& dir(int branch) const { return branch == 1 ? dir1 : dir2; }
};

/// Direction field annihilated by the shape operator minus kappa.
///
/// With rows r1 = (L - kE, M - kF) and r2 = (M - kF, N - kG), the kernel is
/// spanned by the rotation (-b, a) of either row. The row with the larger
/// norm at the base point is used. In curvature-line coordinates this gives
/// +d/du for kappa = L/E and +d/dv for kappa = N/G when L/E > N/G.
inline JetField2<double> principal_direction(const FundamentalData& d, const Jet<double>& kappa) {
  const int k = kappa.order();
  const Jet<double> E = d.E.truncated(k), F = d.F.truncated(k), G = d.G.truncated(k);
  const Jet<double> a1 = d.L - kappa * E;
  const Jet<double> b = d.M - kappa * F;
  const Jet<double> c2 = d.N - kappa * G;
  const double n1 = std::hypot(a1.value(), b.value());
  const double n2 = std::hypot(b.value(), c2.value());
  if (n2 >= n1) return {-c2, b};
  return {-b, a1};
}

inline PrincipalData principal_data(const FundamentalData& d, const Tolerances& tol = {}) {
  const int k = d.L.order();
  const Jet<double> E = d.E.truncated(k), F = d.F.truncated(k), G = d.G.truncated(k);
  const Jet<double> W = E * G - F * F;
  PrincipalData p;
  p.gaussian = (d.L * d.N - d.M * d.M) / W;
  p.mean = (E * d.N - 2.0 * F * d.M + G * d.L) / (2.0 * W);
  const Jet<double> disc = p.mean * p.mean - p.gaussian;
  const double h0 = p.mean.value();
  if (!(disc.value() > tol.tau * (1.0 + h0 * h0 + std::abs(p.gaussian.value())))) {
    throw Error(ErrorKind::UmbilicPoint, "principal curvatures coincide at the base point");
  }
  const Jet<double> root = sqrt(disc);
  p.kappa1 = p.mean + root;
  p.kappa2 = p.mean - root;
  p.dir1 = principal_direction(d, p.kappa1);
  p.dir2 = principal_direction(d, p.kappa2);
  return p;
}

/// Residual of the eigen-relation for one (kappa, direction) pair at the
/// base point.
inline double eigen_residual(const FundamentalData& d, double kappa, Vec2 w) {
  const double r1 = (d.L.value() - kappa * d.E.value()) * w.u + (d.M.value() - kappa * d.F.value()) * w.v;
  const double r2 = (d.M.value() - kappa * d.F.value()) * w.u + (d.N.value() - kappa * d.G.value()) * w.v;
  return std::hypot(r1, r2);
}

/// True if F and M vanish as jets (relative to the size of the diagonal).
inline bool is_curvature_line(const FundamentalData& d, const Tolerances& tol = {}) {
  const double first = std::max(d.E.max_abs(), d.G.max_abs());
  const double second = std::max(d.L.max_abs(), d.N.max_abs());
  return d.F.max_abs() <= tol.tau * (1.0 + first) && d.M.max_abs() <= tol.tau * (1.0 + second);
}

inline void require_curvature_line(const FundamentalData& d, const Tolerances& tol = {}) {
  if (!is_curvature_line(d, tol)) {
    throw Error(ErrorKind::NotCurvatureLine,
                "F or M does not vanish identically (F0 = " + std::to_string(d.F.value()) +
                    ", M0 = " + std::to_string(d.M.value()) + ")");
  }
}

/// Residuals of the curvature-line structure equations, each the largest
/// absolute jet coefficient of (left side - right side).
struct StructureResiduals {
  double codazzi_u = 0.0;  // L_v - H E_v
  double codazzi_v = 0.0;  // N_u - H G_u
  double d_kappa1 = 0.0;   // E_v / 2E - (k1)_v / (k2 - k1)
  double d_kappa2 = 0.0;   // G_u / 2G - (k2)_u / (k1 - k2)
  // Frame derivatives against the x1, x2, y1, y3 coefficient matrices.
  double e1_u = 0.0, e2_u = 0.0, nu_u = 0.0;
  double e1_v = 0.0, e2_v = 0.0, nu_v = 0.0;
  // (e_i)_u x (e_i)_v against its closed form multiple of e_i.
  double e1_singular = 0.0, e2_singular = 0.0;
  bool e1_singular_at_base = false;
  bool e2_singular_at_base = false;

  double max() const {
    return std::max({codazzi_u, codazzi_v, d_kappa1, d_kappa2, e1_u, e2_u, nu_u, e1_v, e2_v, nu_v,
                     e1_singular, e2_singular});
  }
};

namespace detail {

inline double max_abs(const JetVec3<double>& v) {
  return std::max({v[0].max_abs(), v[1].max_abs(), v[2].max_abs()});
}

}  // namespace detail

/// Checks the curvature-line identities on the jets of f. Requires order >= 4
/// so that frame derivatives of the curvatures are available.
inline StructureResiduals verify_structure_equations(const FundamentalData& d,
                                                     const Tolerances& tol = {}) {
  require_curvature_line(d, tol);
  if (d.f.order() < 4) {
    throw Error(ErrorKind::InsufficientOrder, "structure equations need jet order >= 4");
  }
  const int k = d.L.order();  // K-2
  const int k1o = k - 1;      // order after one more derivative
  auto T = [](const auto& x, int o) { return x.truncated(o); };

  const Jet<double> E = T(d.E, k), G = T(d.G, k);
  const Jet<double> kappa1 = d.L / E;
  const Jet<double> kappa2 = d.N / G;
  const Jet<double> H = 0.5 * (kappa1 + kappa2);

  StructureResiduals r;
  r.codazzi_u = (d.L.dv() - T(H, k1o) * T(d.E.dv(), k1o)).max_abs();
  r.codazzi_v = (d.N.du() - T(H, k1o) * T(d.G.du(), k1o)).max_abs();

  const Jet<double> E1 = T(E, k1o), G1 = T(G, k1o);
  const Jet<double> diff = T(kappa1 - kappa2, k1o);
  r.d_kappa1 = (T(d.E.dv(), k1o) / (2.0 * E1) - kappa1.dv() / (-diff)).max_abs();
  r.d_kappa2 = (T(d.G.du(), k1o) / (2.0 * G1) - kappa2.du() / diff).max_abs();

  // Frame at order K-1, differentiated to K-2, compared at K-3 where the
  // curvature derivatives live.
  const Jet<double> su = sqrt(d.E), sv = sqrt(d.G);
  const JetVec3<double> e1 = d.fu / su;
  const JetVec3<double> e2 = d.fv / sv;
  const int o = k1o;
  const Jet<double> su_o = T(su, o), sv_o = T(sv, o);
  const Jet<double> x1 = kappa1.dv() * su_o / (diff * sv_o);
  const Jet<double> x2 = T(kappa1, o) * su_o;
  const Jet<double> y1 = kappa2.du() * sv_o / (diff * su_o);
  const Jet<double> y3 = T(kappa2, o) * sv_o;
  const JetVec3<double> E1v = e1.truncated(o), E2v = e2.truncated(o), Nv = d.nu.truncated(o);

  r.e1_u = detail::max_abs(e1.du().truncated(o) - (x1 * E2v + x2 * Nv));
  r.e2_u = detail::max_abs(e2.du().truncated(o) - (-1.0 * (x1 * E1v)));
  r.nu_u = detail::max_abs(d.nu.du().truncated(o) - (-1.0 * (x2 * E1v)));
  r.e1_v = detail::max_abs(e1.dv().truncated(o) - y1 * E2v);
  r.e2_v = detail::max_abs(e2.dv().truncated(o) - (y3 * Nv - y1 * E1v));
  r.nu_v = detail::max_abs(d.nu.dv().truncated(o) - (-1.0 * (y3 * E2v)));

  const JetVec3<double> c1 = cross(e1.du(), e1.dv()).truncated(o);
  const JetVec3<double> c2 = cross(e2.du(), e2.dv()).truncated(o);
  const Jet<double> s1 = -1.0 * T(kappa1, o) * kappa2.du() * sv_o / diff;
  // From the frame equations: (e2)_u x (e2)_v = x1 y3 e2, positive sign.
  const Jet<double> s2 = T(kappa2, o) * kappa1.dv() * su_o / diff;
  r.e1_singular = detail::max_abs(c1 - s1 * E1v);
  r.e2_singular = detail::max_abs(c2 - s2 * E2v);
  r.e1_singular_at_base = tol.is_zero(kappa1.value(), 0.0) || tol.is_zero(kappa2.du().value(), 0.0);
  r.e2_singular_at_base = tol.is_zero(kappa2.value(), 0.0) || tol.is_zero(kappa1.dv().value(), 0.0);
  return r;
}

/// The Gaussian curvature if it is constant as a jet, else nullopt.
inline std::optional<double> constant_gaussian_curvature(const PrincipalData& p,
                                                         const Tolerances& tol = {}) {
  const auto c = p.gaussian.coefficients();
  const double c0 = c[0];
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (std::abs(c[i]) > 1e3 * tol.tau * (1.0 + std::abs(c0))) return std::nullopt;
  }
  return c0;
}

/// Everything the singularity modules need at one point.
struct LocalGeometry {
  FundamentalData forms;
  PrincipalData principal;
};

inline LocalGeometry local_geometry(const Surface& s, ParamPoint p, const Tolerances& tol = {}) {
  LocalGeometry g;
  g.forms = fundamental_forms(s.lift(p, tol.jet_order), tol);
  g.principal = principal_data(g.forms, tol);
  return g;
}

}  // namespace caustic
