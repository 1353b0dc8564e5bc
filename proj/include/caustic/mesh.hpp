#pragma once

// Grid sampling of f, f^t and C_b over a parameter window, and OBJ output.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "caustic/config.hpp"
#include "caustic/edge_invariants.hpp"
#include "caustic/error.hpp"
#include "caustic/focal.hpp"
#include "caustic/geometry.hpp"
#include "caustic/parallel.hpp"

namespace caustic {

struct Window {
  double u0 = -0.5, u1 = 0.5, v0 = -0.5, v1 = 0.5;

  double extent() const { return std::max(u1 - u0, v1 - v0); }
  bool contains(ParamPoint p) const { return p.u >= u0 && p.u <= u1 && p.v >= v0 && p.v <= v1; }
};

/// Vertex grid of res x res samples; missing vertices are clipped.
struct GridMesh {
  std::string name;
  int res = 0;
  std::vector<std::optional<Vec3>> vertices;  // row-major, v outer

  std::size_t clipped() const {
    return static_cast<std::size_t>(
        std::count_if(vertices.begin(), vertices.end(), [](const auto& x) { return !x; }));
  }
};

struct Polyline {
  std::string name;
  std::vector<Vec3> points;
};

using PointMap = std::function<std::optional<Vec3>(ParamPoint)>;

/// Samples `map` on the grid, one task per row.
inline GridMesh sample_grid(const std::string& name, const PointMap& map, const Window& w, int res) {
  if (res < 2) throw Error(ErrorKind::InvalidArgument, "mesh resolution must be at least 2");
  if (!(w.u1 > w.u0) || !(w.v1 > w.v0)) {
    throw Error(ErrorKind::InvalidArgument, "mesh window is empty");
  }
  GridMesh m;
  m.name = name;
  m.res = res;
  m.vertices.resize(static_cast<std::size_t>(res) * static_cast<std::size_t>(res));
  const unsigned workers = std::max(1u, std::min(std::thread::hardware_concurrency(), 16u));
  std::vector<std::future<void>> tasks;
  for (unsigned k = 0; k < workers; ++k) {
    tasks.push_back(std::async(std::launch::async, [&, k] {
      for (int j = static_cast<int>(k); j < res; j += static_cast<int>(workers)) {
        const double v = w.v0 + (w.v1 - w.v0) * j / (res - 1);
        for (int i = 0; i < res; ++i) {
          const double u = w.u0 + (w.u1 - w.u0) * i / (res - 1);
          std::optional<Vec3> x;
          try {
            x = map(ParamPoint{u, v});
          } catch (const Error&) {
            x.reset();
          }
          if (x && !(std::isfinite((*x)[0]) && std::isfinite((*x)[1]) && std::isfinite((*x)[2]))) {
            x.reset();
          }
          m.vertices[static_cast<std::size_t>(j) * res + i] = x;
        }
      }
    }));
  }
  for (auto& t : tasks) t.get();
  return m;
}

inline PointMap surface_points(const Surface& s) {
  return [s](ParamPoint p) -> std::optional<Vec3> { return s.point(p); };
}

inline PointMap parallel_points(const ParallelSurface& ps, const Tolerances& tol) {
  return [ps, tol](ParamPoint p) -> std::optional<Vec3> { return ps.lift(p, 0, tol).value(); };
}

/// Focal points, clipped near the parabolic set of the branch and where the
/// focal radius exceeds ten window extents.
inline PointMap focal_points(const FocalSurface& fs, const Window& w, const Tolerances& tol) {
  return [fs, w, tol](ParamPoint p) -> std::optional<Vec3> {
    Tolerances t2 = tol;
    t2.jet_order = 2;
    const LocalGeometry g = local_geometry(fs.base(), p, t2);
    const double k = g.principal.kappa(fs.branch()).value();
    if (std::abs(k) < tol.tau_parab || 1.0 / std::abs(k) > 10.0 * w.extent()) return std::nullopt;
    return g.forms.f.value() + (1.0 / k) * g.forms.nu.value();
  };
}

/// Traces field = 0 through `seed` in both directions until the curve leaves
/// the window or continuation fails, and maps the samples through `map`.
inline Polyline singular_polyline(const std::string& name, const JetField& field,
                                  const PointMap& map, ParamPoint seed, const Window& w,
                                  const Tolerances& tol, int max_steps = 2000) {
  Polyline out;
  out.name = name;
  Tolerances t2 = tol;
  t2.trace_step = w.extent() / 200.0;
  std::vector<ParamPoint> pts;
  for (int dir : {-1, 1}) {
    // Step by step so a failure only truncates the curve.
    ZeroCurve c = trace_zero_curve(field, seed, TraceOptions{0, 0, 0.0, std::nullopt}, t2);
    ParamPoint x = c.samples.front();
    Vec2 t = dir * c.tangents.front();
    std::vector<ParamPoint> half;
    for (int k = 0; k < max_steps; ++k) {
      ZeroCurve step;
      try {
        step = trace_zero_curve(field, x, TraceOptions{1, 0, 0.0, t}, t2);
      } catch (const Error&) {
        break;
      }
      const ParamPoint nx = step.samples.back();
      if (!w.contains(nx)) break;
      t = step.tangents.back();
      x = nx;
      half.push_back(x);
    }
    if (dir < 0) {
      std::reverse(half.begin(), half.end());
      pts.insert(pts.end(), half.begin(), half.end());
      pts.push_back(c.samples.front());
    } else {
      pts.insert(pts.end(), half.begin(), half.end());
    }
  }
  for (const ParamPoint& p : pts) {
    try {
      if (auto x = map(p)) out.points.push_back(*x);
    } catch (const Error&) {
    }
  }
  return out;
}

namespace detail {

inline void write_vertex(std::ostream& os, const Vec3& x) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", x[0], x[1], x[2]);
  os << buf;
}

}  // namespace detail

/// Writes meshes as `o` objects with triangulated faces over complete cells,
/// then polylines as `o` objects with a single `l` record.
inline void write_obj(std::ostream& os, const std::vector<GridMesh>& meshes,
                      const std::vector<Polyline>& lines) {
  std::size_t base = 1;
  for (const GridMesh& m : meshes) {
    os << "o " << m.name << '\n';
    std::vector<std::size_t> index(m.vertices.size(), 0);
    std::size_t next = base;
    for (std::size_t k = 0; k < m.vertices.size(); ++k) {
      if (!m.vertices[k]) continue;
      detail::write_vertex(os, *m.vertices[k]);
      index[k] = next++;
    }
    const auto at = [&](int i, int j) { return index[static_cast<std::size_t>(j) * m.res + i]; };
    for (int j = 0; j + 1 < m.res; ++j) {
      for (int i = 0; i + 1 < m.res; ++i) {
        const std::size_t a = at(i, j), b = at(i + 1, j), c = at(i + 1, j + 1), d = at(i, j + 1);
        if (a == 0 || b == 0 || c == 0 || d == 0) continue;
        os << "f " << a << ' ' << b << ' ' << c << '\n';
        os << "f " << a << ' ' << c << ' ' << d << '\n';
      }
    }
    base = next;
  }
  for (const Polyline& l : lines) {
    if (l.points.size() < 2) continue;
    os << "o " << l.name << '\n';
    for (const Vec3& x : l.points) detail::write_vertex(os, x);
    os << 'l';
    for (std::size_t k = 0; k < l.points.size(); ++k) os << ' ' << base + k;
    os << '\n';
    base += l.points.size();
  }
}

}  // namespace caustic
