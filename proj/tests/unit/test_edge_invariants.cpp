#include <gtest/gtest.h>

#include <cmath>

#include "caustic/edge_invariants.hpp"
#include "caustic/expr.hpp"
#include "caustic/focal.hpp"
#include "caustic/parallel.hpp"
#include "support/surfaces.hpp"

using namespace caustic;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Io;
}

/// A front given explicitly as a map with its unit normal, identifier and
/// null field, all as expressions in (u, v).
FrontData explicit_front(const std::string& map, const std::string& normal,
                         const std::string& identifier, const std::string& eta_u,
                         const std::string& eta_v) {
  const SurfaceExpr m = parse_surface(map), n = parse_surface(normal);
  const ExprPtr l = parse_expression(identifier), a = parse_expression(eta_u),
                b = parse_expression(eta_v);
  return [=](ParamPoint p, std::optional<Vec2>) {
    const Jet<double> u = Jet<double>::variable_u(p, 5), v = Jet<double>::variable_v(p, 5);
    JetVec3<double> nj = lift_surface(n, p, 5);
    nj = nj / norm(nj);
    return FrontJets{lift_surface(m, p, 5), nj, eval_jet(l, u, v), {eval_jet(a, u, v), eval_jet(b, u, v)}};
  };
}

/// (u, a u^2 + v^2, v^3): singular along v = 0, normal (-2au, 3v/2... ).
FrontData front_a(double a) {
  char map[96], normal[128];
  std::snprintf(map, sizeof map, "(u, %.17g*u^2 + v^2, v^3)", a);
  // f_u x f_v / v = (2 a u * 3 v - 0, -3 v, 2) rescaled by 1/v.
  std::snprintf(normal, sizeof normal, "(6*%.17g*u*v, -3*v, 2)", a);
  return explicit_front(map, normal, "v", "0", "1");
}

/// (u, v^2, a u^2 + v^3): normal curvature of the edge is 2a.
FrontData front_b(double a) {
  char map[96], normal[128];
  std::snprintf(map, sizeof map, "(u, v^2, %.17g*u^2 + v^3)", a);
  std::snprintf(normal, sizeof normal, "(-2*%.17g*u, -3*v/2, 1)", a);
  return explicit_front(map, normal, "v", "0", "1");
}

}  // namespace

TEST(EdgeInvariants, SingularCurvatureOfPlanarEdge) {
  for (double a : {0.5, 1.0, -2.0}) {
    const EdgeInvariantReport r = generic_invariants_at(front_a(a), {0.0, 0.0});
    EXPECT_NEAR(r.kappa_nu, 0.0, 1e-12);
    EXPECT_NEAR(std::abs(r.kappa_s), 2.0 * std::abs(a), 1e-12);
  }
}

TEST(EdgeInvariants, NormalCurvatureOfEdge) {
  for (double a : {0.5, -1.5}) {
    const EdgeInvariantReport r = generic_invariants_at(front_b(a), {0.0, 0.0});
    EXPECT_NEAR(r.kappa_nu, 2.0 * a, 1e-12);
    EXPECT_NEAR(r.kappa_s, 0.0, 1e-12);
  }
}

TEST(EdgeInvariants, ConventionsDoNotChangeSingularCurvature) {
  const FocalSurface fs = make_focal(Surface::parse(testsurf::kLips), 1);
  const FrontData front = focal_front(fs);
  const EdgeInvariantReport ref = generic_invariants_at(front, {0, 0});
  for (int mask = 1; mask < 8; ++mask) {
    InvariantOptions o{(mask & 1) != 0, (mask & 2) != 0, (mask & 4) != 0};
    const EdgeInvariantReport r = generic_invariants_at(front, {0, 0}, o);
    EXPECT_NEAR(r.kappa_s, ref.kappa_s, 1e-10) << mask;
    EXPECT_NEAR(r.kappa_nu, o.flip_normal ? -ref.kappa_nu : ref.kappa_nu, 1e-10) << mask;
  }
}

TEST(EdgeInvariants, TracesACircle) {
  const ExprPtr circle = parse_expression("u^2 + v^2 - 1");
  const JetField field = [circle](ParamPoint p) {
    return eval_jet(circle, Jet<double>::variable_u(p, 2), Jet<double>::variable_v(p, 2));
  };
  TraceOptions opt;
  opt.steps_forward = 30;
  opt.steps_backward = 10;
  opt.step = 0.05;
  const ZeroCurve c = trace_zero_curve(field, {1.02, 0.01}, opt);
  ASSERT_EQ(c.samples.size(), 41u);
  EXPECT_EQ(c.seed_index, 10u);
  for (std::size_t k = 0; k < c.samples.size(); ++k) {
    EXPECT_NEAR(std::hypot(c.samples[k].u, c.samples[k].v), 1.0, 1e-10);
    EXPECT_NEAR(norm(c.tangents[k]), 1.0, 1e-12);
    if (k > 0) {
      EXPECT_GT(dot(c.tangents[k], c.tangents[k - 1]), 0.9);
    }
  }
}

TEST(EdgeInvariants, DirectionOptionOrientsTheCurve) {
  const ExprPtr line = parse_expression("v - 0.5*u");
  const JetField field = [line](ParamPoint p) {
    return eval_jet(line, Jet<double>::variable_u(p, 2), Jet<double>::variable_v(p, 2));
  };
  TraceOptions opt;
  opt.steps_forward = 3;
  opt.direction = Vec2{-1.0, 0.0};
  const ZeroCurve c = trace_zero_curve(field, {0, 0}, opt);
  EXPECT_LT(c.samples.back().u, 0.0);
}

TEST(EdgeInvariants, DegenerateSeedIsReported) {
  const ExprPtr cone = parse_expression("u^2 - v^2");
  const JetField field = [cone](ParamPoint p) {
    return eval_jet(cone, Jet<double>::variable_u(p, 2), Jet<double>::variable_v(p, 2));
  };
  EXPECT_EQ(kind_of([&] { (void)trace_zero_curve(field, {0, 0}); }), ErrorKind::DegenerateSeed);
}

TEST(EdgeInvariants, RejectsNonSingularAndNonEdgePoints) {
  EXPECT_EQ(kind_of([&] { (void)generic_invariants_at(front_a(1.0), {0.0, 0.3}); }), ErrorKind::NotSingular);
  const FrontData bad = explicit_front("(u, v^2, v^3)", "(0, -3*v/2, 1)", "v", "1", "0");
  EXPECT_EQ(kind_of([&] { (void)generic_invariants_at(bad, {0.0, 0.0}); }), ErrorKind::NotCuspidalEdge);
}

TEST(EdgeInvariants, SweepAlongParallelEdge) {
  const Surface s = Surface::parse(testsurf::kEllipticTorus);
  const ParamPoint p{0.7, 0.2};
  const double k1 = local_geometry(s, p).principal.kappa1.value();
  const FrontData front = parallel_front(ParallelSurface(s, 1.0 / k1));
  TraceOptions opt;
  opt.steps_forward = 5;
  const ZeroCurve c = trace_zero_curve(identifier_field(front), p, opt);
  const auto entries = invariants_along_curve(front, c);
  ASSERT_EQ(entries.size(), 6u);
  for (const auto& e : entries) {
    ASSERT_TRUE(e.report.has_value()) << e.skipped;
    EXPECT_EQ(e.report->sample_index, e.index);
  }
  // Rotational symmetry: the invariants are constant along the parallel.
  EXPECT_NEAR(entries.front().report->kappa_s, entries.back().report->kappa_s, 1e-8);
  EXPECT_NEAR(entries.front().report->kappa_nu, entries.back().report->kappa_nu, 1e-8);
}
