// Command-line front end. Flags override job-file fields, which override
// defaults; the resulting job is echoed and hashed into the report.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "caustic/report.hpp"

namespace {

struct Flags {
  std::string job_file;
  std::string surface;
  std::string point;
  double t = 0.0;
  int branch = 0;
  int order = 0;
  std::vector<std::string> tol;
  std::string window;
  int res = 0;
  int steps = 0;
  std::string out;
  std::string mesh_out;
};

std::vector<double> parse_list(const std::string& text, std::size_t n, const char* what) {
  std::vector<double> xs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      xs.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw caustic::Error(caustic::ErrorKind::InvalidArgument,
                           std::string(what) + ": cannot read '" + item + "'");
    }
  }
  if (xs.size() != n) {
    throw caustic::Error(caustic::ErrorKind::InvalidArgument,
                         std::string(what) + " needs " + std::to_string(n) + " comma-separated numbers");
  }
  return xs;
}

void add_shared_options(CLI::App* sub, Flags& f) {
  sub->add_option("--job", f.job_file, "JSON job file")->check(CLI::ExistingFile);
  sub->add_option("--surface", f.surface, "surface (x, y, z) in u and v, or @file");
  sub->add_option("--point", f.point, "base point u,v");
  sub->add_option("--t", f.t, "parallel distance");
  sub->add_option("--branch", f.branch, "focal branch")->check(CLI::IsMember({1, 2}));
  sub->add_option("--order", f.order, "jet order");
  sub->add_option("--tol", f.tol, "tolerance override key=value (repeatable)");
  sub->add_option("--window", f.window, "parameter window u0,u1,v0,v1");
  sub->add_option("--res", f.res, "mesh grid resolution");
  sub->add_option("--steps", f.steps, "trace steps in each direction");
  sub->add_option("--out", f.out, "report path (OBJ path for the mesh command)");
  sub->add_option("--mesh-out", f.mesh_out, "OBJ path for report-all");
}

caustic::AnalysisJob build_job(const CLI::App& sub, const Flags& f, caustic::Command cmd) {
  caustic::AnalysisJob job;
  if (sub.count("--job")) job = caustic::load_job(f.job_file);
  caustic::JobOverrides o;
  if (sub.count("--surface")) {
    o.surface = f.surface.rfind('@', 0) == 0 ? caustic::detail::read_text_file(f.surface.substr(1))
                                             : f.surface;
  }
  if (sub.count("--point")) {
    const auto p = parse_list(f.point, 2, "--point");
    o.point = caustic::ParamPoint{p[0], p[1]};
  }
  if (sub.count("--t")) o.distance_t = f.t;
  if (sub.count("--branch")) o.focal_branch = f.branch;
  if (sub.count("--order")) o.jet_order = f.order;
  for (const std::string& kv : f.tol) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw caustic::Error(caustic::ErrorKind::InvalidArgument, "--tol expects key=value");
    }
    o.tolerances.emplace_back(kv.substr(0, eq), parse_list(kv.substr(eq + 1), 1, "--tol")[0]);
  }
  if (sub.count("--window")) {
    const auto w = parse_list(f.window, 4, "--window");
    o.window = caustic::window_from_json(caustic::Json::array({w[0], w[1], w[2], w[3]}));
  }
  if (sub.count("--res")) o.resolution = f.res;
  if (sub.count("--steps")) o.trace_steps = f.steps;
  if (cmd == caustic::Command::Mesh) {
    if (sub.count("--out")) o.mesh_path = f.out;
  } else {
    if (sub.count("--out")) o.report_path = f.out;
    if (sub.count("--mesh-out")) o.mesh_path = f.mesh_out;
  }
  job = caustic::apply_overrides(std::move(job), o);
  if (job.surface.empty()) {
    throw caustic::Error(caustic::ErrorKind::InvalidArgument, "no surface given (--surface or --job)");
  }
  return job;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Singularities and invariants of parallel and focal surfaces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(caustic::kToolVersion));

  Flags flags;
  const std::map<std::string, caustic::Command> commands{
      {"classify", caustic::Command::Classify},
      {"invariants", caustic::Command::Invariants},
      {"trace", caustic::Command::Trace},
      {"mesh", caustic::Command::Mesh},
      {"report-all", caustic::Command::ReportAll},
  };
  const std::map<std::string, std::string> help{
      {"classify", "classify the parallel and focal surfaces at the point"},
      {"invariants", "classification plus curvatures and edge invariants"},
      {"trace", "trace singular curves through the point"},
      {"mesh", "write f, f^t and C_b over the window as OBJ"},
      {"report-all", "everything, optionally with a mesh"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, cmd] : commands) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    add_shared_options(sub, flags);
    subs.push_back(sub);
  }
  CLI11_PARSE(app, argc, argv);

  for (CLI::App* sub : subs) {
    if (!sub->parsed()) continue;
    const caustic::Command cmd = commands.at(sub->get_name());
    caustic::Json report;
    std::optional<std::string> report_path;
    try {
      const caustic::AnalysisJob job = build_job(*sub, flags, cmd);
      report_path = job.report_path;
      report = caustic::run_job(cmd, job);
    } catch (const caustic::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
    const std::string text = caustic::dump_report(report);
    if (report_path) {
      std::ofstream out(*report_path);
      if (!out) {
        std::cerr << "error: cannot write " << *report_path << '\n';
        return 2;
      }
      out << text;
    } else {
      std::cout << text;
    }
    for (const auto& e : report["errors"]) std::cerr << "error: " << e["message"].get<std::string>() << '\n';
    return caustic::exit_code(report);
  }
  return 2;
}
