// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "caustic/caustic.hpp"
#include "support/fd_oracle.hpp"
#include "support/surfaces.hpp"

using namespace caustic;

namespace {

/// Failure messages accumulated by one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++count_;
    if (!ok && failures_.size() < 8) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  void near_rel(double value, double expected, double rel, const std::string& what) {
    std::ostringstream ss;
    ss.precision(17);
    ss << what << ": got " << value << ", expected " << expected;
    expect(relative_error(value, expected) <= rel, ss.str());
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }

  bool ok() const { return failed_ == 0 && count_ > 0; }
  std::string summary() const {
    std::string s = std::to_string(count_ - failed_) + "/" + std::to_string(count_) + " checks";
    if (!notes_.empty()) s += "; " + notes_;
    for (const auto& f : failures_) s += "\n      - " + f;
    return s;
  }

 private:
  int count_ = 0, failed_ = 0;
  std::vector<std::string> failures_;
  std::string notes_;
};

std::string tag(SingularityTag t) { return std::string(to_string(t)); }

AnalysisJob job_for(const std::string& surface, std::optional<double> t, std::optional<int> branch,
                    ParamPoint p = {0.0, 0.0}) {
  AnalysisJob job;
  job.surface = surface;
  job.point = p;
  job.distance_t = t;
  job.focal_branch = branch;
  return job;
}

/// The branch whose curvature is L/E, i.e. varies along the u-lines of a
/// curvature-line chart.
int u_line_branch(const LocalGeometry& g) {
  const double kl = g.forms.L.value() / g.forms.E.value();
  return std::abs(g.principal.kappa1.value() - kl) <= std::abs(g.principal.kappa2.value() - kl) ? 1 : 2;
}

void criterion1(Check& c) {
  const auto start = std::chrono::steady_clock::now();
  const Json r = run_job(Command::Invariants, job_for(testsurf::kBeaks, 1.0, 1));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(r["errors"].empty(), "report has errors");
  c.expect(std::abs(r["principal"]["kappa1"].get<double>() - 1.0) <= 1e-10, "kappa1 = 1");
  c.expect(std::abs(r["principal"]["kappa2"].get<double>()) <= 1e-10, "kappa2 = 0");
  const Json& fw = r["focal"]["witness"];
  c.near_rel(fw["gradient"][0].get<double>(), 21.0, 1e-9, "(v1 k1)_u");
  c.near_rel(fw["gradient"][1].get<double>(), 6.0, 1e-9, "(v1 k1)_v");
  const Json& sd = r["focal"]["invariants"]["sign_data"];
  c.near_rel(sd["det_numerator"].get<double>(), 15876.0, 1e-9, "det(xi C, xi xi C, e1)");
  c.near_rel(sd["eta_lambda"].get<double>(), 21.0, 1e-9, "v1 lambda");
  c.near_rel(sd["det_gamma_eta"].get<double>(), -21.0, 1e-9, "det(xi, v1)");
  c.expect(r["parallel"]["class"] == "CuspidalBeaks", "parallel class");
  c.expect(r["focal"]["class"] == "CuspidalEdge", "focal class");
  c.near_rel(r["focal"]["invariants"]["kappa_s"].get<double>(), -12.0 / 7.0, 1e-6, "kappa_s");
  c.expect(secs < 1.0, "runtime " + std::to_string(secs) + " s");
  c.note("runtime " + std::to_string(secs * 1e3).substr(0, 5) + " ms");
}

void criterion2(Check& c) {
  const Json r = run_job(Command::Invariants, job_for(testsurf::kLips, 1.0, 1));
  c.expect(r["errors"].empty(), "report has errors");
  c.expect(r["parallel"]["class"] == "CuspidalLips", "parallel class");
  c.expect(r["focal"]["class"] == "CuspidalEdge", "focal class");
  c.near_rel(r["focal"]["invariants"]["kappa_s"].get<double>(), 8.0, 1e-6, "kappa_s");
}

void criterion3(Check& c) {
  struct Case {
    std::string surface;
    SingularityTag parallel, focal;
  };
  const Case cases[] = {
      {testsurf::kEdge, SingularityTag::CuspidalEdge, SingularityTag::Regular},
      {testsurf::kSwallowtail, SingularityTag::Swallowtail, SingularityTag::CuspidalEdge},
      {testsurf::kLips, SingularityTag::CuspidalLips, SingularityTag::CuspidalEdge},
      {testsurf::kBeaks, SingularityTag::CuspidalBeaks, SingularityTag::CuspidalEdge},
  };
  int matched = 0;
  for (const Case& k : cases) {
    const Surface s = Surface::parse(k.surface);
    const SingularityTag p = classify_parallel(ParallelSurface(s, 1.0), {0, 0}).tag;
    const SingularityTag f = classify_focal(make_focal(s, 1), {0, 0}).tag;
    c.expect(p == k.parallel, k.surface + ": parallel " + tag(p));
    c.expect(f == k.focal, k.surface + ": focal " + tag(f) + ", expected " + tag(k.focal));
    matched += f == k.focal && p == k.parallel;
  }
  c.note(std::to_string(matched) + "/4 tag matches");
}

void criterion4(Check& c) {
  struct Case {
    const char* name;
    std::string surface;
    ParamPoint p;
  };
  const Case cases[] = {
      {"elliptic torus", testsurf::kEllipticTorus, {0.7, 0.2}},
      {"catenoid", testsurf::kCatenoid, {0.5, 0.1}},
      {"paraboloid", testsurf::kParaboloid, {0.8, 0.3}},
      {"moulding", testsurf::kMoulding, {0.4, 0.1}},
  };
  Tolerances tol;
  int surfaces = 0;
  double worst = 0.0;
  for (const Case& k : cases) {
    const Surface s = Surface::parse(k.surface);
    const LocalGeometry g = local_geometry(s, k.p, tol);
    c.expect(is_curvature_line(g.forms, tol), std::string(k.name) + " is not curvature-line");
    std::optional<ParallelSurface> ps;
    for (int b : {1, 2}) {
      ParallelSurface cand(s, 1.0 / g.principal.kappa(b).value());
      if (classify_parallel(cand, k.p, tol).tag == SingularityTag::CuspidalEdge) {
        ps = cand;
        break;
      }
    }
    c.expect(ps.has_value(), std::string(k.name) + ": no parallel cuspidal edge");
    if (!ps) continue;
    TraceOptions opt;
    opt.steps_forward = 20;
    const ZeroCurve curve = trace_zero_curve(identifier_field(parallel_front(*ps, tol)), k.p, opt, tol);
    int agreed = 0;
    for (const ParamPoint& q : curve.samples) {
      const ParallelNormalCurvature kn = limiting_normal_curvature_parallel(*ps, q, tol);
      const double rel = kn.generic ? relative_error(*kn.generic, kn.closed_form) : 1.0;
      worst = std::max(worst, rel);
      c.expect(rel <= 1e-5, std::string(k.name) + ": kappa_nu mismatch");
      agreed += rel <= 1e-5;
    }
    c.expect(agreed >= 20, std::string(k.name) + ": fewer than 20 samples");
    surfaces += agreed >= 20;
  }
  c.expect(surfaces >= 3, "fewer than 3 surfaces");
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d surfaces x 21 samples, worst rel %.1e", surfaces, worst);
  c.note(buf);
}

void criterion5(Check& c) {
  // On surfaces of revolution the meridian (u-line) branch has a curved
  // focal surface. On Monge surfaces the u-line focal surface is ruled by
  // lines normal to the base plane of the profile, so K = 0 there and the
  // profile (v-line) branch is used instead.
  struct Domain {
    std::string surface;
    double u0, u1, v0, v1;
    bool profile_branch;
  };
  const Domain domains[] = {
      {testsurf::kEllipticTorus, 0.2, 1.3, -3.0, 3.0, false},
      {testsurf::kCatenoid, 0.2, 1.2, -3.0, 3.0, false},
      {testsurf::kParaboloid, 0.3, 1.5, -3.0, 3.0, false},
      {testsurf::kMoulding, 0.15, 1.2, -0.3, 0.3, true},
      {testsurf::helix_monge("v", "0.5*v^2 + v^3/3", 0.4), 0.3, 1.5, -0.3, 0.3, true},
  };
  Tolerances tol;
  std::mt19937 rng(20240607);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int accepted = 0, drawn = 0;
  double worst = 0.0;
  while (accepted < 100 && drawn < 1000) {
    const Domain& d = domains[drawn++ % 5];
    const ParamPoint p{d.u0 + (d.u1 - d.u0) * unit(rng), d.v0 + (d.v1 - d.v0) * unit(rng)};
    const Surface s = Surface::parse(d.surface);
    const LocalGeometry g = local_geometry(s, p, tol);
    const int ub = u_line_branch(g);
    const FocalSurface fs = make_focal(s, d.profile_branch ? 3 - ub : ub);
    if (classify_focal(fs, p, tol).tag != SingularityTag::Regular) continue;
    const FocalGaussianCurvature k = focal_gaussian_curvature(fs, p, tol);
    const double rel = relative_error(k.direct, k.closed_form);
    worst = std::max(worst, rel);
    c.expect(rel <= 1e-6, "KC at (" + std::to_string(p.u) + ", " + std::to_string(p.v) + ")");
    ++accepted;
  }
  c.expect(accepted == 100, "only " + std::to_string(accepted) + " regular focal points");

  const Surface pseudo = Surface::parse(testsurf::kPseudosphere);
  int kc2 = 0;
  double worst2 = 0.0;
  for (int i = 0; i < 20; ++i) {
    const ParamPoint p{0.3 + 1.7 * unit(rng), -3.0 + 6.0 * unit(rng)};
    const FocalSurface fs = make_focal(pseudo, u_line_branch(local_geometry(pseudo, p, tol)));
    const FocalGaussianCurvature k = focal_gaussian_curvature(fs, p, tol);
    c.expect(k.constant_curvature_form.has_value(), "pseudosphere curvature not constant");
    if (!k.constant_curvature_form) continue;
    c.near_rel(*k.base_gaussian, -1.0, 1e-9, "pseudosphere K");
    const double rel = std::max(relative_error(*k.constant_curvature_form, k.direct),
                                relative_error(*k.constant_curvature_form, k.closed_form));
    worst2 = std::max(worst2, rel);
    c.expect(rel <= 1e-6, "KC2 mismatch");
    c.expect(*k.constant_curvature_form < 0.0 && k.direct < 0.0, "KC2 value not negative");
    ++kc2;
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "%d KC points (%d drawn), worst rel %.1e; %d KC2 points, worst rel %.1e",
                accepted, drawn, worst, kc2, worst2);
  c.note(buf);
}

void criterion6(Check& c) {
  const Surface torus = Surface::parse(testsurf::kTorus);
  Tolerances tol;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      // Offset grid keeps away from the parabolic circles u = +-pi/2.
      const ParamPoint p{2.0 * M_PI * (i + 0.3) / 20.0, 2.0 * M_PI * (j + 0.5) / 20.0};
      const StructureResiduals r =
          verify_structure_equations(fundamental_forms(torus.lift(p, tol.jet_order), tol), tol);
      worst = std::max(worst, r.max());
      c.expect(r.max() < 1e-8, "residual at (" + std::to_string(p.u) + ", " + std::to_string(p.v) + ")");
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "400 points, worst residual %.1e", worst);
  c.note(buf);
}

struct CorpusPoint {
  std::string name;
  std::string surface;
  ParamPoint p;
};

/// Lips and beaks points with kappa2(p) = 0 (graphs and curvature-line
/// Monge surfaces).
std::vector<CorpusPoint> lips_beaks_corpus() {
  std::vector<CorpusPoint> out = {
      {"lips a=1 b=1", testsurf::kLips, {0, 0}},
      {"lips a=2 b=1", "(u, v, u^2/2 + 2*u*v^2 + u^4)", {0, 0}},
      {"lips a=1 b=1/2", "(u, v, u^2/2 + u*v^2 + 0.5*u^4)", {0, 0}},
      {"lips a=-1/2 b=2", "(u, v, u^2/2 - 0.5*u*v^2 + 2*u^4)", {0, 0}},
      {"beaks u^3 v", testsurf::kBeaks, {0, 0}},
      {"beaks plain", testsurf::kBeaksPlain, {0, 0}},
      {"beaks a=1 b=0", "(u, v, u^2/2 + u*v^2)", {0, 0}},
      {"beaks a=2 b=-1/2", "(u, v, u^2/2 + 2*u*v^2 - 0.5*u^4)", {0, 0}},
      {"monge beaks", testsurf::helix_monge("v", "v^3", testsurf::kHalfPi), {0, 0}},
      {"monge beaks offset", testsurf::helix_monge("v", "0.3 + v^3", testsurf::kHalfPi), {0, 0}},
      {"monge beaks flipped", testsurf::helix_monge("v", "v^3", -testsurf::kHalfPi), {0, 0}},
  };
  return out;
}

/// The focal branch whose parallel surface at distance 1/kappa is singular
/// with a degenerate (lips/beaks) identifier.
std::optional<int> lips_beaks_branch(const Surface& s, ParamPoint p, SingularityClass* cls) {
  const LocalGeometry g = local_geometry(s, p);
  for (int b : {1, 2}) {
    const double k = g.principal.kappa(b).value();
    if (std::abs(k) < 1e-6) continue;
    const SingularityClass c = classify_parallel(ParallelSurface(s, 1.0 / k), p);
    if (c.tag == SingularityTag::CuspidalLips || c.tag == SingularityTag::CuspidalBeaks) {
      *cls = c;
      return b;
    }
  }
  return std::nullopt;
}

void criterion7(Check& c) {
  Tolerances tol;
  int lips = 0, beaks = 0, closed = 0;
  for (const CorpusPoint& k : lips_beaks_corpus()) {
    const Surface s = Surface::parse(k.surface);
    SingularityClass cls;
    const auto b = lips_beaks_branch(s, k.p, &cls);
    c.expect(b.has_value(), k.name + ": not a lips/beaks point");
    if (!b) continue;
    const LocalGeometry g = local_geometry(s, k.p, tol);
    c.expect(tol.is_zero(g.principal.kappa(*b == 1 ? 2 : 1).value(), 1.0), k.name + ": kappa2 != 0");
    const FocalSurface fs = make_focal(s, *b);
    const double ks = generic_invariants_at(focal_front(fs, tol), k.p, {}, tol).kappa_s;
    const bool is_lips = cls.tag == SingularityTag::CuspidalLips;
    (is_lips ? lips : beaks)++;
    c.expect(ks * (is_lips ? 1.0 : -1.0) > 0.0, k.name + ": sign of kappa_s = " + std::to_string(ks));
    c.expect(ks * cls.witness.hess_det > 0.0, k.name + ": sign differs from det Hess kappa1");
    if (is_curvature_line(g.forms, tol)) {
      const double ks_closed = ks_focal_closed_form(fs, k.p, tol).value;
      const double ks_red = ks_focal_reduced(fs, k.p, tol);
      c.expect(relative_difference(ks_closed, ks) <= 1e-6, k.name + ": closed form disagrees");
      c.expect(relative_difference(ks_red, ks) <= 1e-6, k.name + ": reduced form disagrees");
      ++closed;
    }
  }
  c.expect(lips + beaks >= 6, "corpus smaller than 6");
  c.note(std::to_string(lips) + " lips + " + std::to_string(beaks) + " beaks points, " +
         std::to_string(closed) + " also by closed form");
}

void criterion8(Check& c) {
  Tolerances tol;
  int checked = 0;
  auto check_point = [&](const std::string& name, const Surface& s, double t, ParamPoint p) {
    const ParallelSurface ps(s, t);
    const ParallelPoint pp = parallel_point(ps, p, tol);
    const SingularityClass cls = classify_by_criteria(pp.lambda, pp.eta, tol);
    Jet<double> l = pp.lambda;
    l.set(0, 0, 0.0);
    const GermOrder o = order(l, tol);
    int expected = 0;
    switch (cls.tag) {
      case SingularityTag::CuspidalEdge:
      case SingularityTag::Swallowtail:
      case SingularityTag::CuspidalButterfly: expected = 1; break;
      case SingularityTag::CuspidalLips:
      case SingularityTag::CuspidalBeaks: expected = 2; break;
      default: break;
    }
    c.expect(expected != 0, name + ": unexpected class " + tag(cls.tag));
    c.expect(o == GermOrder::finite(expected), name + ": order " + o.to_string());
    ++checked;
  };
  for (const auto& [name, text] : std::vector<std::pair<std::string, std::string>>{
           {"edge", testsurf::kEdge},
           {"swallowtail", testsurf::kSwallowtail},
           {"butterfly", testsurf::kButterfly}}) {
    check_point(name, Surface::parse(text), 1.0, {0, 0});
  }
  const struct {
    const char* name;
    const std::string& text;
    ParamPoint p;
  } edges[] = {{"elliptic torus", testsurf::kEllipticTorus, {0.7, 0.2}},
               {"catenoid", testsurf::kCatenoid, {0.5, 0.1}},
               {"paraboloid", testsurf::kParaboloid, {0.8, 0.3}}};
  for (const auto& e : edges) {
    const Surface s = Surface::parse(e.text);
    const LocalGeometry g = local_geometry(s, e.p, tol);
    for (int b : {1, 2}) {
      const double t = 1.0 / g.principal.kappa(b).value();
      if (classify_parallel(ParallelSurface(s, t), e.p, tol).tag == SingularityTag::CuspidalEdge) {
        check_point(e.name, s, t, e.p);
      }
    }
  }
  for (const CorpusPoint& k : lips_beaks_corpus()) {
    const Surface s = Surface::parse(k.surface);
    SingularityClass cls;
    if (const auto b = lips_beaks_branch(s, k.p, &cls)) {
      check_point(k.name, s, 1.0 / local_geometry(s, k.p).principal.kappa(*b).value(), k.p);
    } else {
      c.expect(false, k.name + ": not a lips/beaks point");
    }
  }
  c.note(std::to_string(checked) + " instances");
}

void criterion9(Check& c) {
  const ParamPoint o{0, 0};
  const Jet<double> u = Jet<double>::variable_u(o, 6), v = Jet<double>::variable_v(o, 6);
  const RationalOrder r = rational_order(eval_jet(parse_expression("u*v"), u, v),
                                         eval_jet(parse_expression("u^2 - v^2"), u, v));
  c.expect(r.value == 0 && !r.lower_bound, "rational order " + std::to_string(r.value));
  c.expect(r.rationally_bounded(), "not rationally bounded");
  c.expect(!r.rationally_continuous(), "reported rationally continuous");
}

void criterion10(Check& c) {
  fdoracle::ExpressionGenerator gen(7);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> coord(-0.5, 0.5);
  double worst = 0.0;
  int partials = 0;
  for (int e = 0; e < 50; ++e) {
    const std::string text = gen.generate(3);
    const ExprPtr expr = parse_expression(text);
    const ParamPoint p{coord(rng), coord(rng)};
    const Jet<double> j =
        eval_jet(expr, Jet<double>::variable_u(p, 4), Jet<double>::variable_v(p, 4));
    for (int d = 0; d <= 4; ++d) {
      for (int i = d; i >= 0; --i) {
        const double ref = static_cast<double>(fdoracle::partial(*expr, p.u, p.v, i, d - i));
        const double got = j.partial(i, d - i);
        const double rel = std::abs(got - ref) / std::max(1.0, std::abs(ref));
        worst = std::max(worst, rel);
        ++partials;
        c.expect(rel <= 1e-5, text + ": d^" + std::to_string(i) + "," + std::to_string(d - i) +
                                  " got " + std::to_string(got) + " expected " + std::to_string(ref));
      }
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "50 expressions, %d partials, worst rel %.1e", partials, worst);
  c.note(buf);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"AC1 beaks example end to end", criterion1},
      {"AC2 lips example end to end", criterion2},
      {"AC3 parallel class to focal class correspondence", criterion3},
      {"AC4 parallel limiting normal curvature vs k1 k2 / (k1 - k2)", criterion4},
      {"AC5 focal Gaussian curvature closed forms", criterion5},
      {"AC6 structure equation residuals on the torus", criterion6},
      {"AC7 singular curvature sign law at lips/beaks points", criterion7},
      {"AC8 identifier order by class", criterion8},
      {"AC9 rational order of uv / (u^2 - v^2)", criterion9},
      {"AC10 jet derivatives vs finite differences", criterion10},
  };
  int failed = 0;
  for (const auto& [title, run] : criteria) {
    Check c;
    try {
      run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::printf("[%s] %s: %s\n", c.ok() ? "PASS" : "FAIL", title.c_str(), c.summary().c_str());
    failed += !c.ok();
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
