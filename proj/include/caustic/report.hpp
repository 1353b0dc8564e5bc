#pragma once

// Analysis jobs and their JSON reports.
//
// A job names a surface, a base point and at least one of a parallel
// distance t or a focal branch. Missing one is derived from the other:
// t = 1/kappa_b(p), or b = the branch that makes f^t singular at p.
//
// Report numbers are written with %.17g so that every double survives a
// parse/dump round trip bit for bit.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "caustic/config.hpp"
#include "caustic/edge_invariants.hpp"
#include "caustic/error.hpp"
#include "caustic/expr.hpp"
#include "caustic/focal.hpp"
#include "caustic/geometry.hpp"
#include "caustic/germ_order.hpp"
#include "caustic/mesh.hpp"
#include "caustic/parallel.hpp"

namespace caustic {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

struct AnalysisJob {
  std::string surface;
  ParamPoint point{0.0, 0.0};
  std::optional<double> distance_t;
  std::optional<int> focal_branch;
  Tolerances tol;
  Window window;
  int resolution = 64;
  int trace_steps = 20;
  std::optional<std::string> report_path;
  std::optional<std::string> mesh_path;
};

/// Sets one tolerance by name. Unknown names are rejected.
inline void set_tolerance(Tolerances& tol, const std::string& key, double value) {
  auto positive = [&](double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw Error(ErrorKind::InvalidArgument, "tolerance " + key + " must be positive");
    }
    return x;
  };
  auto count = [&](double x) {
    if (x < 0.0 || x != std::floor(x) || x > 64.0) {
      throw Error(ErrorKind::InvalidArgument, "tolerance " + key + " must be a small integer");
    }
    return static_cast<int>(x);
  };
  if (key == "jet_order") {
    tol.jet_order = count(value);
    if (tol.jet_order < 4) throw Error(ErrorKind::InvalidArgument, "jet_order must be >= 4");
  } else if (key == "tau") {
    tol.tau = positive(value);
  } else if (key == "tau_sing") {
    tol.tau_sing = positive(value);
  } else if (key == "tau_parab") {
    tol.tau_parab = positive(value);
  } else if (key == "tau_trace") {
    tol.tau_trace = positive(value);
  } else if (key == "trace_step") {
    tol.trace_step = positive(value);
  } else if (key == "max_corrector_iterations") {
    tol.max_corrector_iterations = count(value);
  } else if (key == "cross_check_rel") {
    tol.cross_check_rel = positive(value);
  } else if (key == "degenerate_seed_offset") {
    tol.degenerate_seed_offset = positive(value);
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown tolerance '" + key + "'");
  }
}

inline Json tolerances_to_json(const Tolerances& t) {
  Json j;
  j["jet_order"] = t.jet_order;
  j["tau"] = t.tau;
  j["tau_sing"] = t.tau_sing;
  j["tau_parab"] = t.tau_parab;
  j["tau_trace"] = t.tau_trace;
  j["trace_step"] = t.trace_step;
  j["max_corrector_iterations"] = t.max_corrector_iterations;
  j["cross_check_rel"] = t.cross_check_rel;
  j["degenerate_seed_offset"] = t.degenerate_seed_offset;
  return j;
}

namespace detail {

inline double number(const Json& j, const char* what) {
  if (!j.is_number()) throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be a number");
  return j.get<double>();
}

inline int integer(const Json& j, const char* what) {
  if (!j.is_number_integer()) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be an integer");
  }
  return j.get<int>();
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

inline Window window_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw Error(ErrorKind::InvalidArgument, "window must be [u0, u1, v0, v1]");
  }
  Window w{detail::number(j[0], "window"), detail::number(j[1], "window"),
           detail::number(j[2], "window"), detail::number(j[3], "window")};
  if (!(w.u1 > w.u0) || !(w.v1 > w.v0)) throw Error(ErrorKind::InvalidArgument, "window is empty");
  return w;
}

/// Reads job fields from `j` on top of `base`. A "surface_file" field is
/// resolved relative to the current directory.
inline AnalysisJob job_from_json(const Json& j, AnalysisJob base = {}) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "job must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "surface") {
      if (!value.is_string()) throw Error(ErrorKind::InvalidArgument, "surface must be a string");
      base.surface = value.get<std::string>();
    } else if (key == "surface_file") {
      base.surface = detail::read_text_file(value.get<std::string>());
    } else if (key == "point") {
      if (!value.is_array() || value.size() != 2) {
        throw Error(ErrorKind::InvalidArgument, "point must be [u, v]");
      }
      base.point = {detail::number(value[0], "point"), detail::number(value[1], "point")};
    } else if (key == "distance_t") {
      base.distance_t = detail::number(value, "distance_t");
    } else if (key == "focal_branch") {
      base.focal_branch = detail::integer(value, "focal_branch");
    } else if (key == "jet_order") {
      set_tolerance(base.tol, "jet_order", detail::integer(value, "jet_order"));
    } else if (key == "tolerances") {
      if (!value.is_object()) throw Error(ErrorKind::InvalidArgument, "tolerances must be an object");
      for (const auto& [tk, tv] : value.items()) set_tolerance(base.tol, tk, detail::number(tv, "tolerance"));
    } else if (key == "trace_steps") {
      base.trace_steps = detail::integer(value, "trace_steps");
    } else if (key == "outputs") {
      if (!value.is_object()) throw Error(ErrorKind::InvalidArgument, "outputs must be an object");
      for (const auto& [ok, ov] : value.items()) {
        if (ok == "report") {
          base.report_path = ov.get<std::string>();
        } else if (ok == "mesh") {
          base.mesh_path = ov.get<std::string>();
        } else if (ok == "resolution") {
          base.resolution = detail::integer(ov, "resolution");
        } else if (ok == "window") {
          base.window = window_from_json(ov);
        } else {
          throw Error(ErrorKind::InvalidArgument, "unknown outputs field '" + ok + "'");
        }
      }
    } else {
      throw Error(ErrorKind::InvalidArgument, "unknown job field '" + key + "'");
    }
  }
  return base;
}

/// Loads a job file. Relative paths inside it are taken relative to the
/// file's directory.
inline AnalysisJob load_job(const std::string& path, AnalysisJob base = {}) {
  Json j;
  try {
    j = Json::parse(detail::read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::InvalidArgument, path + ": " + e.what());
  }
  const std::filesystem::path dir = std::filesystem::path(path).parent_path();
  auto rebase = [&](Json& field) {
    if (!field.is_string()) return;
    const std::filesystem::path p = field.get<std::string>();
    if (p.is_relative()) field = (dir / p).lexically_normal().string();
  };
  if (j.is_object()) {
    if (j.contains("surface_file")) rebase(j["surface_file"]);
    if (j.contains("outputs") && j["outputs"].is_object()) {
      for (const char* key : {"report", "mesh"}) {
        if (j["outputs"].contains(key)) rebase(j["outputs"][key]);
      }
    }
  }
  return job_from_json(j, std::move(base));
}

/// Values given on the command line. Set fields replace job-file fields.
struct JobOverrides {
  std::optional<std::string> surface;
  std::optional<ParamPoint> point;
  std::optional<double> distance_t;
  std::optional<int> focal_branch;
  std::optional<int> jet_order;
  std::vector<std::pair<std::string, double>> tolerances;
  std::optional<Window> window;
  std::optional<int> resolution;
  std::optional<int> trace_steps;
  std::optional<std::string> report_path;
  std::optional<std::string> mesh_path;
};

inline AnalysisJob apply_overrides(AnalysisJob job, const JobOverrides& o) {
  if (o.surface) job.surface = *o.surface;
  if (o.point) job.point = *o.point;
  if (o.distance_t) job.distance_t = o.distance_t;
  if (o.focal_branch) job.focal_branch = o.focal_branch;
  if (o.jet_order) set_tolerance(job.tol, "jet_order", *o.jet_order);
  for (const auto& [key, value] : o.tolerances) set_tolerance(job.tol, key, value);
  if (o.window) job.window = *o.window;
  if (o.resolution) job.resolution = *o.resolution;
  if (o.trace_steps) job.trace_steps = *o.trace_steps;
  if (o.report_path) job.report_path = o.report_path;
  if (o.mesh_path) job.mesh_path = o.mesh_path;
  return job;
}

/// The fields that influence results; output paths are left out so that
/// the same analysis hashes the same wherever it is written.
inline Json effective_config(const AnalysisJob& job) {
  Json j;
  j["surface"] = job.surface;
  j["point"] = {job.point.u, job.point.v};
  j["distance_t"] = job.distance_t ? Json(*job.distance_t) : Json(nullptr);
  j["focal_branch"] = job.focal_branch ? Json(*job.focal_branch) : Json(nullptr);
  j["tolerances"] = tolerances_to_json(job.tol);
  j["trace_steps"] = job.trace_steps;
  j["window"] = {job.window.u0, job.window.u1, job.window.v0, job.window.v1};
  j["resolution"] = job.resolution;
  return j;
}

inline Json job_to_json(const AnalysisJob& job) {
  Json j = effective_config(job);
  Json out;
  if (job.report_path) out["report"] = *job.report_path;
  if (job.mesh_path) out["mesh"] = *job.mesh_path;
  if (!out.empty()) j["outputs"] = out;
  return j;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline void write_string(std::string& out, const std::string& s) {
  // nlohmann's escaping is correct for UTF-8; reuse it for strings only.
  out += Json(s).dump();
}

inline void write_number(std::string& out, double x) {
  if (!std::isfinite(x)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

inline void write_json(std::string& out, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        write_string(out, k);
        out += ": ";
        write_json(out, v, indent, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Short numeric arrays stay on one line.
      const bool flat = j.size() <= 4 && std::all_of(j.begin(), j.end(), [](const Json& e) {
                          return e.is_primitive();
                        });
      out += flat ? "[" : "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out += flat ? ", " : ",\n";
        if (!flat) out += pad;
        write_json(out, j[i], indent, depth + 1);
      }
      out += flat ? "]" : "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float: write_number(out, j.get<double>()); return;
    case Json::value_t::string: write_string(out, j.get<std::string>()); return;
    default: out += j.dump(); return;
  }
}

}  // namespace detail

/// Stable key order, two-space indent, 17 significant digits.
inline std::string dump_report(const Json& report) {
  std::string out;
  detail::write_json(out, report, 2, 0);
  out += '\n';
  return out;
}

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string config_hash(const AnalysisJob& job) {
  std::string s;
  detail::write_json(s, effective_config(job), 0, 0);
  return fnv1a_hex(s);
}

// ---------------------------------------------------------------------------
// Report sections

inline Json to_json(Vec2 v) { return Json::array({v.u, v.v}); }
inline Json to_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }
inline Json to_json(ParamPoint p) { return Json::array({p.u, p.v}); }

inline Json to_json(const GermOrder& g) {
  Json j;
  j["value"] = g.value();
  j["exact"] = g.is_finite();
  j["text"] = g.to_string();
  return j;
}

inline Json to_json(const CriterionWitness& w) {
  Json j;
  j["identifier"] = w.identifier;
  j["gradient"] = Json::array({w.d_u, w.d_v});
  j["eta"] = to_json(w.eta);
  j["eta_identifier"] = w.eta1;
  j["eta2_identifier"] = w.eta2;
  j["eta3_identifier"] = w.eta3;
  j["hessian_det"] = w.hess_det;
  j["scale"] = w.scale;
  j["identically_zero"] = w.identically_zero;
  return j;
}

inline Json to_json(const SignData& s) {
  Json j;
  j["eta_lambda"] = s.eta_lambda;
  j["det_gamma_eta"] = s.det_gamma_eta;
  j["eta_identifier"] = s.eta_identifier;
  j["xi"] = to_json(s.xi);
  j["eta"] = to_json(s.eta);
  j["det_numerator"] = s.det_numerator;
  j["speed"] = s.speed;
  j["flipped_eta"] = s.flipped_eta;
  j["flipped_orientation"] = s.flipped_orientation;
  j["flipped_normal"] = s.flipped_normal;
  return j;
}

inline Json to_json(const EdgeInvariantReport& r) {
  Json j;
  j["at"] = to_json(r.at);
  j["kappa_nu"] = r.kappa_nu;
  j["kappa_s"] = r.kappa_s;
  j["method"] = std::string(to_string(r.method));
  j["sign_data"] = to_json(r.sign_data);
  return j;
}

/// Collects warnings and errors while a report is assembled.
class Diagnostics {
 public:
  void warn(const std::string& where, const std::string& message) {
    warnings_.push_back(Json{{"where", where}, {"message", message}});
  }
  void warn(const std::string& where, const Error& e) {
    warnings_.push_back(
        Json{{"where", where}, {"kind", std::string(to_string(e.kind()))}, {"message", e.what()}});
  }
  void error(const std::string& where, const Error& e) {
    errors_.push_back(
        Json{{"where", where}, {"kind", std::string(to_string(e.kind()))}, {"message", e.what()}});
  }
  void error(const std::string& where, const std::string& message) {
    errors_.push_back(Json{{"where", where}, {"kind", "Internal"}, {"message", message}});
  }

  const Json& warnings() const { return warnings_; }
  const Json& errors() const { return errors_; }

 private:
  Json warnings_ = Json::array();
  Json errors_ = Json::array();
};

/// Which of the two readings of the lips test surface, if any, `s` is.
/// Both are checked numerically so that any equivalent spelling matches.
inline std::optional<std::string> detect_lips_example(const Surface& s) {
  static const ParamPoint probes[] = {{0.3, -0.2}, {-0.45, 0.7}, {0.9, 0.35}, {-0.1, -0.6}};
  auto matches = [&](double half_power) {
    for (ParamPoint p : probes) {
      Vec3 x;
      try {
        x = s.point(p);
      } catch (const Error&) {
        return false;
      }
      const double z = 0.5 * std::pow(p.u, half_power) + p.u * p.v * p.v + std::pow(p.u, 4);
      if (std::abs(x[0] - p.u) > 1e-12 || std::abs(x[1] - p.v) > 1e-12 || std::abs(x[2] - z) > 1e-12) {
        return false;
      }
    }
    return true;
  };
  if (matches(2.0)) return std::string("quadratic");
  if (matches(1.0)) return std::string("linear");
  return std::nullopt;
}

struct ResolvedJob {
  AnalysisJob job;
  std::optional<Surface> surface;
  std::optional<LocalGeometry> geometry;
  std::optional<double> t;
  std::string t_source;
  std::optional<int> branch;
  std::string branch_source;
  /// Set instead of `geometry` at an umbilic point.
  std::optional<double> umbilic_kappa;
};

namespace detail {

inline std::string tag_name(SingularityTag t) { return std::string(to_string(t)); }

inline Json principal_json(const LocalGeometry& g, const Tolerances& tol) {
  const PrincipalData& pd = g.principal;
  Json j;
  j["kappa1"] = pd.kappa1.value();
  j["kappa2"] = pd.kappa2.value();
  j["dir1"] = to_json(pd.dir1.value());
  j["dir2"] = to_json(pd.dir2.value());
  j["gaussian"] = pd.gaussian.value();
  j["mean"] = pd.mean.value();
  j["normal"] = to_json(g.forms.nu.value());
  j["curvature_line_coordinates"] = is_curvature_line(g.forms, tol);
  j["labeling"] = {{"rule", BranchLabeling::rule}};
  return j;
}

/// Resolves the surface, the geometry at the point and the t/branch pair.
/// Failures are recorded and leave the corresponding fields empty.
inline ResolvedJob resolve(const AnalysisJob& job, Diagnostics& diag) {
  ResolvedJob r;
  r.job = job;
  if (!job.distance_t && !job.focal_branch) {
    diag.error("job", Error(ErrorKind::InvalidArgument,
                            "a classification job needs distance_t or focal_branch"));
  }
  if (job.focal_branch && *job.focal_branch != 1 && *job.focal_branch != 2) {
    diag.error("job", Error(ErrorKind::InvalidArgument, "focal_branch must be 1 or 2"));
    return r;
  }
  if (job.distance_t && (*job.distance_t == 0.0 || !std::isfinite(*job.distance_t))) {
    diag.error("job", Error(ErrorKind::InvalidArgument, "distance_t must be finite and nonzero"));
    return r;
  }
  try {
    r.surface = Surface::parse(job.surface);
  } catch (const Error& e) {
    diag.error("surface", e);
    return r;
  }
  if (const auto reading = detect_lips_example(*r.surface)) {
    if (*reading == "quadratic") {
      diag.warn("surface",
                "lips test surface detected with z = 1/2 u^2 + u v^2 + u^4; the variant "
                "z = 1/2 u + u v^2 + u^4 has a different normal and no lips at the origin");
    } else {
      diag.warn("surface",
                "z = 1/2 u + u v^2 + u^4 is the misprinted lips test surface; its normal "
                "is not the one the lips example uses. Did you mean 1/2 u^2 + u v^2 + u^4?");
    }
  }
  try {
    r.geometry = local_geometry(*r.surface, job.point, job.tol);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::UmbilicPoint) {
      diag.error("geometry", e);
      return r;
    }
    // Umbilics have no principal frame, but f^t is still decided by 1 - t H.
    const FundamentalData d = fundamental_forms(r.surface->lift(job.point, 2), job.tol);
    const double E = d.E.value(), F = d.F.value(), G = d.G.value();
    r.umbilic_kappa = (E * d.N.value() - 2.0 * F * d.M.value() + G * d.L.value()) / (2.0 * (E * G - F * F));
    if (job.focal_branch) {
      diag.error("focal", e);
    } else {
      diag.warn("geometry", e);
    }
    return r;
  }
  const PrincipalData& pd = r.geometry->principal;

  if (job.distance_t) {
    r.t = job.distance_t;
    r.t_source = "job";
  }
  if (job.focal_branch) {
    r.branch = job.focal_branch;
    r.branch_source = "job";
  }
  if (!r.t && r.branch) {
    const double k = pd.kappa(*r.branch).value();
    if (std::abs(k) < job.tol.tau_parab) {
      diag.warn("parallel", "kappa" + std::to_string(*r.branch) +
                                " vanishes at the point, so no parallel distance is derived");
    } else {
      r.t = 1.0 / k;
      r.t_source = "1/kappa" + std::to_string(*r.branch);
    }
  }
  if (r.t && !r.branch) {
    for (int b : {1, 2}) {
      if (job.tol.singular_factor_vanishes(*r.t, pd.kappa(b).value())) {
        r.branch = b;
        r.branch_source = "branch singular for f^t";
        break;
      }
    }
    if (!r.branch) diag.warn("focal", "f^t is regular at the point, so no focal branch is derived");
  }
  return r;
}

inline Json parallel_classification(const ResolvedJob& r, Diagnostics& diag) {
  Json j;
  j["t"] = *r.t;
  j["t_source"] = r.t_source;
  const ParallelSurface ps(*r.surface, *r.t);
  const Tolerances& tol = r.job.tol;
  try {
    const ParallelPoint pp = parallel_point(ps, r.job.point, tol);
    const SingularityClass c = classify_by_criteria(pp.lambda, pp.eta, tol);
    j["active_branch"] = pp.active;
    j["class"] = tag_name(c.tag);
    j["witness"] = to_json(c.witness);
    try {
      j["germ_order"] = to_json(germ_order_of_identifier(ps, r.job.point, tol));
    } catch (const Error& e) {
      diag.warn("parallel.germ_order", e);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotSingular) {
      j["class"] = tag_name(SingularityTag::Regular);
      j["note"] = "no principal curvature equals 1/t at the point";
    } else if (e.kind() == ErrorKind::RankZero) {
      j["class"] = tag_name(SingularityTag::RankZero);
    } else {
      diag.error("parallel", e);
    }
  }
  return j;
}

inline Json focal_classification(const ResolvedJob& r, Diagnostics& diag) {
  Json j;
  j["branch"] = *r.branch;
  j["branch_source"] = r.branch_source;
  try {
    const FocalSurface fs = make_focal(*r.surface, *r.branch);
    const SingularityClass c = classify_focal(fs, r.job.point, r.job.tol);
    j["class"] = tag_name(c.tag);
    j["witness"] = to_json(c.witness);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParabolicPoint && r.branch_source != "job") {
      diag.warn("focal", e);
    } else {
      diag.error("focal", e);
    }
  }
  return j;
}

inline Json parallel_invariants(const ResolvedJob& r, Json section, Diagnostics& diag) {
  const ParallelSurface ps(*r.surface, *r.t);
  const Tolerances& tol = r.job.tol;
  const std::string tag = section.value("class", "");
  if (tag == "Regular") {
    try {
      const ParallelCurvatures pc = parallel_curvatures(ps, r.job.point, tol);
      section["curvatures"] = {{"gaussian", pc.gaussian_formula},
                               {"mean", pc.mean_formula},
                               {"gaussian_direct", pc.gaussian_direct},
                               {"mean_direct", pc.mean_direct}};
    } catch (const Error& e) {
      diag.warn("parallel.curvatures", e);
    }
    return section;
  }
  if (!section.contains("active_branch")) return section;
  try {
    const ParallelNormalCurvature kn = limiting_normal_curvature_parallel(ps, r.job.point, tol);
    Json k;
    k["closed_form"] = kn.closed_form;
    k["generic"] = kn.generic ? Json(*kn.generic) : Json(nullptr);
    k["relative_difference"] = kn.relative_difference ? Json(*kn.relative_difference) : Json(nullptr);
    k["method"] = kn.generic ? "both" : "closed-form";
    section["limiting_normal_curvature"] = k;
    if (!kn.agrees) diag.warn("parallel.limiting_normal_curvature", "closed form and generic value disagree");
  } catch (const Error& e) {
    diag.warn("parallel.limiting_normal_curvature", e);
  }
  if (tag == "CuspidalEdge") {
    try {
      section["edge_invariants"] =
          to_json(generic_invariants_at(parallel_front(ps, tol), r.job.point, {}, tol));
    } catch (const Error& e) {
      diag.warn("parallel.edge_invariants", e);
    }
  }
  try {
    const BoundednessReport b = boundedness_report(ps, r.job.point, r.job.trace_steps, tol);
    section["boundedness"] = {{"kappa2_at_point", b.kappa2_at_point},
                              {"ord_kappa2", to_json(b.ord_kappa2)},
                              {"rationally_bounded", b.rationally_bounded},
                              {"bounded_near", b.bounded_near},
                              {"samples_checked", b.samples_checked},
                              {"max_abs_kappa2_on_singular_set", b.max_abs_kappa2_on_singular_set}};
  } catch (const Error& e) {
    diag.warn("parallel.boundedness", e);
  }
  return section;
}

inline Json focal_invariants(const ResolvedJob& r, Json section, Diagnostics& diag) {
  const Tolerances& tol = r.job.tol;
  const ParamPoint p = r.job.point;
  const std::string tag = section.value("class", "");
  if (tag.empty()) return section;
  const FocalSurface fs = make_focal(*r.surface, *r.branch);
  const bool cl = is_curvature_line(r.geometry->forms, tol);

  if (tag == "Regular") {
    if (!cl) {
      diag.warn("focal.gaussian_curvature",
                "closed form skipped: the chart is not in curvature-line coordinates");
      return section;
    }
    try {
      const FocalGaussianCurvature k = focal_gaussian_curvature(fs, p, tol);
      Json g{{"closed_form", k.closed_form}, {"direct", k.direct},
             {"relative_difference", k.relative_difference}};
      if (k.constant_curvature_form) {
        g["base_gaussian"] = *k.base_gaussian;
        g["constant_curvature_form"] = *k.constant_curvature_form;
      }
      section["gaussian_curvature"] = g;
    } catch (const Error& e) {
      diag.warn("focal.gaussian_curvature", e);
    }
    return section;
  }
  if (tag != "CuspidalEdge") return section;

  EdgeInvariantReport generic;
  try {
    generic = generic_invariants_at(focal_front(fs, tol), p, {}, tol);
  } catch (const Error& e) {
    diag.warn("focal.invariants", e);
    return section;
  }
  Json inv = to_json(generic);
  if (!cl) {
    diag.warn("focal.closed_forms", "closed forms skipped: the chart is not in curvature-line coordinates");
    section["invariants"] = inv;
    return section;
  }
  try {
    const FocalEdgeValue kn = kn_focal_closed_form(fs, p, tol);
    const FocalEdgeValue ks = ks_focal_closed_form(fs, p, tol);
    // The closed-form normal may be opposite to the generic one; kappa_nu
    // is compared after aligning it, kappa_s needs no alignment.
    const Vec3 n = focal_point(fs, p, tol).normal.value();
    const double align = dot(kn.normal, n) < 0.0 ? -1.0 : 1.0;
    Json c;
    c["kappa_nu"] = kn.value;
    c["kappa_s"] = ks.value;
    c["transposed_chart"] = kn.transposed;
    c["normal"] = to_json(kn.normal);
    try {
      c["kappa_s_reduced"] = ks_focal_reduced(fs, p, tol);
    } catch (const Error&) {
      // Only defined at lips/beaks points; absence is informative enough.
    }
    const double dnu = caustic::relative_difference(align * kn.value, generic.kappa_nu);
    const double ds = caustic::relative_difference(ks.value, generic.kappa_s);
    c["delta_kappa_nu"] = dnu;
    c["delta_kappa_s"] = ds;
    inv["closed_form"] = c;
    inv["method"] = std::string(to_string(InvariantMethod::Both));
    if (dnu > tol.cross_check_rel || ds > tol.cross_check_rel) {
      diag.warn("focal.invariants", "closed form and generic value disagree beyond cross_check_rel");
    }
  } catch (const Error& e) {
    diag.warn("focal.closed_forms", e);
  }
  section["invariants"] = inv;
  return section;
}

}  // namespace detail

namespace detail {

inline Json curve_json(const FrontData& front, const ZeroCurve& c, const Tolerances& tol) {
  Json j;
  j["step"] = c.step;
  j["seed_index"] = c.seed_index;
  Json samples = Json::array();
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    Json s;
    s["at"] = to_json(c.samples[i]);
    s["tangent"] = to_json(c.tangents[i]);
    try {
      const EdgeInvariantReport e = generic_invariants(front, c, i, {}, tol);
      s["kappa_nu"] = e.kappa_nu;
      s["kappa_s"] = e.kappa_s;
    } catch (const Error& e) {
      s["skipped"] = e.what();
    }
    samples.push_back(s);
  }
  j["samples"] = samples;
  return j;
}

/// Traces the singular set of `front` through p. At a degenerate point the
/// branches leaving along the null cone of the identifier's Hessian are
/// traced instead; a definite Hessian means p is an isolated singular point.
inline Json trace_section(const std::string& name, const FrontData& front, ParamPoint p,
                          const AnalysisJob& job, Diagnostics& diag) {
  const Tolerances& tol = job.tol;
  const JetField field = identifier_field(front);
  Json j;
  j["front"] = name;
  Json curves = Json::array();
  try {
    TraceOptions opt;
    opt.steps_forward = job.trace_steps;
    const Jet<double> l = field(p);
    if (!is_degenerate_zero(l, tol)) {
      opt.steps_backward = job.trace_steps;
      curves.push_back(curve_json(front, trace_zero_curve(field, p, opt, tol), tol));
    } else {
      const double huu = l.partial(2, 0), huv = l.partial(1, 1), hvv = l.partial(0, 2);
      if (huu * hvv - huv * huv > 0.0) {
        j["isolated_point"] = true;
      } else {
        for (Vec2 w : detail::hessian_null_cone(huu, huv, hvv)) {
          for (double s : {-1.0, 1.0}) {
            opt.direction = s * w;
            const ZeroCurve c = trace_zero_curve(field, p + (s * tol.degenerate_seed_offset) * w, opt, tol);
            Json cj = curve_json(front, c, tol);
            cj["seed_direction"] = to_json(s * w);
            curves.push_back(cj);
          }
        }
      }
    }
  } catch (const Error& e) {
    diag.warn("trace." + name, e);
  }
  j["curves"] = curves;
  return j;
}

}  // namespace detail

enum class Command { Classify, Invariants, Trace, Mesh, ReportAll };

inline std::string_view to_string(Command c) {
  switch (c) {
    case Command::Classify: return "classify";
    case Command::Invariants: return "invariants";
    case Command::Trace: return "trace";
    case Command::Mesh: return "mesh";
    case Command::ReportAll: return "report-all";
  }
  return "?";
}

namespace detail {

/// Adds the singular curve through the base point when the point lies on a
/// smooth branch of it. Degenerate points (lips, beaks) are skipped.
inline void add_singular_polyline(std::vector<Polyline>& lines, const std::string& name,
                                  const JetField& field, const PointMap& map,
                                  const AnalysisJob& job, Diagnostics& diag) {
  try {
    const Jet<double> l = field(job.point);
    if (!job.tol.is_zero(l.value(), l.max_abs_through(2)) || is_degenerate_zero(l, job.tol)) return;
    lines.push_back(singular_polyline(name, field, map, job.point, job.window, job.tol));
  } catch (const Error& e) {
    diag.warn("mesh." + name, e);
  }
}

}  // namespace detail

/// Samples f, f^t and C_b over the job window and writes one OBJ file.
/// Singular curves through the base point are added as polylines.
inline Json write_mesh(const ResolvedJob& r, Diagnostics& diag) {
  const AnalysisJob& job = r.job;
  Json j;
  if (!job.mesh_path) {
    diag.error("mesh", Error(ErrorKind::InvalidArgument, "no mesh output path given"));
    return j;
  }
  std::vector<GridMesh> meshes;
  std::vector<Polyline> lines;
  try {
    meshes.push_back(sample_grid("surface", surface_points(*r.surface), job.window, job.resolution));
    if (r.t) {
      const ParallelSurface ps(*r.surface, *r.t);
      meshes.push_back(
          sample_grid("parallel", parallel_points(ps, job.tol), job.window, job.resolution));
    }
    if (r.branch) {
      const FocalSurface fs(*r.surface, *r.branch);
      const PointMap fmap = focal_points(fs, job.window, job.tol);
      meshes.push_back(sample_grid("focal_" + std::to_string(*r.branch), fmap, job.window,
                                   job.resolution));
      detail::add_singular_polyline(lines, "focal_" + std::to_string(*r.branch) + "_singular",
                            identifier_field(focal_front(fs, job.tol)), fmap, job, diag);
    }
    if (r.t) {
      const ParallelSurface ps(*r.surface, *r.t);
      detail::add_singular_polyline(lines, "parallel_singular", identifier_field(parallel_front(ps, job.tol)),
                            parallel_points(ps, job.tol), job, diag);
    }
  } catch (const Error& e) {
    diag.error("mesh", e);
    return j;
  }
  std::ofstream out(*job.mesh_path);
  if (!out) {
    diag.error("mesh", Error(ErrorKind::Io, "cannot write " + *job.mesh_path));
    return j;
  }
  write_obj(out, meshes, lines);
  j["path"] = *job.mesh_path;
  Json objs = Json::array();
  for (const GridMesh& m : meshes) {
    objs.push_back({{"name", m.name}, {"kind", "mesh"}, {"vertices", m.vertices.size() - m.clipped()},
                    {"clipped", m.clipped()}});
  }
  for (const Polyline& l : lines) {
    objs.push_back({{"name", l.name}, {"kind", "polyline"}, {"vertices", l.points.size()}});
  }
  j["objects"] = objs;
  return j;
}

/// Runs one command and returns the full report. Never throws for
/// analysis failures; they end up in "errors" or "warnings".
inline Json run_job(Command cmd, const AnalysisJob& job) {
  Diagnostics diag;
  Json rep;
  rep["schema_version"] = kSchemaVersion;
  rep["tool"] = {{"name", "caustic"}, {"version", kToolVersion}};
  rep["command"] = std::string(to_string(cmd));
  rep["config_hash"] = config_hash(job);
  const std::string profile = fnv1a_hex(tolerances_to_json(job.tol).dump());
  rep["tolerance_profiles"] = {{profile, tolerances_to_json(job.tol)}};
  rep["job"] = job_to_json(job);

  const ResolvedJob r = detail::resolve(job, diag);
  if (r.geometry) {
    Json pj = detail::principal_json(*r.geometry, job.tol);
    pj["tolerance_profile"] = profile;
    rep["principal"] = pj;
  }
  const bool deep = cmd == Command::Invariants || cmd == Command::ReportAll;
  if (r.umbilic_kappa) {
    rep["principal"] = {{"umbilic", true}, {"kappa", *r.umbilic_kappa}, {"tolerance_profile", profile}};
    if (job.distance_t) {
      const bool sing = job.tol.singular_factor_vanishes(*job.distance_t, *r.umbilic_kappa);
      rep["parallel"] = {{"t", *job.distance_t},
                         {"t_source", "job"},
                         {"class", detail::tag_name(sing ? SingularityTag::RankZero : SingularityTag::Regular)},
                         {"note", "umbilic point: both principal factors equal 1 - t kappa"},
                         {"tolerance_profile", profile}};
    }
  }
  if (r.geometry && r.t) {
    Json pj = detail::parallel_classification(r, diag);
    if (deep) pj = detail::parallel_invariants(r, pj, diag);
    pj["tolerance_profile"] = profile;
    rep["parallel"] = pj;
  }
  if (r.geometry && r.branch) {
    Json fj = detail::focal_classification(r, diag);
    if (deep) fj = detail::focal_invariants(r, fj, diag);
    fj["tolerance_profile"] = profile;
    rep["focal"] = fj;
  }
  if (r.geometry && (cmd == Command::Trace || cmd == Command::ReportAll)) {
    Json traces = Json::array();
    const auto singular = [&](const char* key) {
      return rep.contains(key) && rep[key].contains("class") && rep[key]["class"] != "Regular" &&
             rep[key]["class"] != "RankZero";
    };
    if (singular("parallel")) {
      traces.push_back(detail::trace_section(
          "parallel", parallel_front(ParallelSurface(*r.surface, *r.t), job.tol), job.point, job, diag));
    }
    if (singular("focal")) {
      traces.push_back(detail::trace_section(
          "focal", focal_front(FocalSurface(*r.surface, *r.branch), job.tol), job.point, job, diag));
    }
    if (traces.empty()) diag.warn("trace", "no singular front through the point to trace");
    rep["traces"] = traces;
  }
  if (r.geometry && (cmd == Command::Mesh || (cmd == Command::ReportAll && job.mesh_path))) {
    Json mj = write_mesh(r, diag);
    mj["tolerance_profile"] = profile;
    rep["mesh"] = mj;
  }
  rep["warnings"] = diag.warnings();
  rep["errors"] = diag.errors();
  return rep;
}

inline int exit_code(const Json& report) {
  return report.contains("errors") && !report["errors"].empty() ? 1 : 0;
}

}  // namespace caustic
