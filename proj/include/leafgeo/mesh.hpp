#pragma once

// Triangle meshes of leaves {C = c} and of the red zone {f = 0} by marching cubes in the
// causal coordinates (X, Y, T), plus red-line polylines by marching squares.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <ostream>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "leafgeo/detail/mc_tables.hpp"
#include "leafgeo/leafscape.hpp"
#include "leafgeo/metriplectic.hpp"

namespace leafgeo {

/// Axis-aligned box in causal coordinates, components ordered (X, Y, T).
struct Box {
  Vec3 lo{-3.0, -3.0, -3.0};
  Vec3 hi{3.0, 3.0, 3.0};

  static Box cube(double half) { return {Vec3::Constant(-half), Vec3::Constant(half)}; }
};

enum class VertexTag { Euclidean, Lorentzian, RedNear, Excluded };

inline std::string_view to_string(VertexTag t) {
  switch (t) {
    case VertexTag::Euclidean: return "euclidean";
    case VertexTag::Lorentzian: return "lorentzian";
    case VertexTag::RedNear: return "red";
    case VertexTag::Excluded: return "excluded";
  }
  return "?";
}

struct Mesh {
  std::vector<CausalPoint> vertices;
  std::vector<std::array<int, 3>> triangles;
  /// Empty for plain level sets.
  std::vector<VertexTag> tags;
  double cell_diagonal = 0.0;

  bool empty() const { return triangles.empty(); }
  std::size_t count(VertexTag t) const { return static_cast<std::size_t>(std::count(tags.begin(), tags.end(), t)); }
};

using CausalField = std::function<double(const CausalPoint&)>;

namespace detail {

inline constexpr int kCubeCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                          {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
inline constexpr int kCubeEdge[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                         {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

/// Evaluate `fn(i, j, k)` on an (n+1)^3 lattice, split into z-slabs across threads.
inline std::vector<double> sample_lattice(int n, const std::function<double(int, int, int)>& fn) {
  const int m = n + 1;
  std::vector<double> out(static_cast<std::size_t>(m) * m * m);
  const int workers = std::max(1, std::min<int>(m, static_cast<int>(std::thread::hardware_concurrency())));
  auto slab = [&](int k0, int k1) {
    for (int k = k0; k < k1; ++k)
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) out[(static_cast<std::size_t>(k) * m + j) * m + i] = fn(i, j, k);
  };
  if (workers == 1) {
    slab(0, m);
    return out;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(slab, m * w / workers, m * (w + 1) / workers);
  for (auto& t : pool) t.join();
  return out;
}

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace detail

/// Marching-cubes triangulation of {field = 0} in `box` with `resolution` cells per axis.
inline Mesh mesh_level_set(const CausalField& field, const Box& box, int resolution) {
  if (resolution < 8) throw std::invalid_argument("mesh resolution must be at least 8");
  const int n = resolution;
  const int m = n + 1;
  const Vec3 h = (box.hi - box.lo) / n;
  auto node = [&](int i, int j, int k) {
    return CausalPoint{box.lo[0] + i * h[0], box.lo[1] + j * h[1], box.lo[2] + k * h[2]};
  };
  const std::vector<double> val = detail::sample_lattice(n, [&](int i, int j, int k) { return field(node(i, j, k)); });
  auto at = [&](int i, int j, int k) { return val[(static_cast<std::size_t>(k) * m + j) * m + i]; };

  Mesh mesh;
  mesh.cell_diagonal = h.norm();
  std::unordered_map<std::int64_t, int> welded;
  auto edge_vertex = [&](const std::array<int, 3>& a, int axis, double va, double vb) {
    const std::int64_t key = ((static_cast<std::int64_t>(a[2]) * m + a[1]) * m + a[0]) * 3 + axis;
    auto it = welded.find(key);
    if (it != welded.end()) return it->second;
    const double t = (va == vb) ? 0.5 : va / (va - vb);
    CausalPoint p = node(a[0], a[1], a[2]);
    double* comp[3] = {&p.X, &p.Y, &p.T};
    *comp[axis] += t * h[axis];
    const int id = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(p);
    welded.emplace(key, id);
    return id;
  };

  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        double v[8];
        int cube = 0;
        bool finite = true;
        for (int c = 0; c < 8; ++c) {
          v[c] = at(i + detail::kCubeCorner[c][0], j + detail::kCubeCorner[c][1], k + detail::kCubeCorner[c][2]);
          finite = finite && std::isfinite(v[c]);
          if (v[c] < 0.0) cube |= 1 << c;
        }
        if (!finite || detail::kMcEdgeTable[cube] == 0) continue;
        int ids[12];
        for (int e = 0; e < 12; ++e) {
          if (!(detail::kMcEdgeTable[cube] & (1 << e))) continue;
          int a = detail::kCubeEdge[e][0], b = detail::kCubeEdge[e][1];
          // Key each edge by its lower lattice end so neighbouring cells share vertices.
          int axis = 0;
          for (int d = 0; d < 3; ++d)
            if (detail::kCubeCorner[a][d] != detail::kCubeCorner[b][d]) axis = d;
          if (detail::kCubeCorner[a][axis] > detail::kCubeCorner[b][axis]) std::swap(a, b);
          const std::array<int, 3> lower{i + detail::kCubeCorner[a][0], j + detail::kCubeCorner[a][1],
                                         k + detail::kCubeCorner[a][2]};
          ids[e] = edge_vertex(lower, axis, v[a], v[b]);
        }
        for (int t = 0; detail::kMcTriTable[cube][t] != -1; t += 3) {
          const std::array<int, 3> tri{ids[detail::kMcTriTable[cube][t]], ids[detail::kMcTriTable[cube][t + 1]],
                                       ids[detail::kMcTriTable[cube][t + 2]]};
          if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;
          mesh.triangles.push_back(tri);
        }
      }
  return mesh;
}

namespace detail {

/// Euclidean distance from p to the nearest point leaf (0, 0, z*).
inline double distance_to_point_leaves(const AmbientPoint& p, const std::vector<double>& zs) {
  double d = INFINITY;
  for (double z : zs) d = std::min(d, std::sqrt(p.x * p.x + p.y * p.y + (p.z - z) * (p.z - z)));
  return d;
}

inline std::vector<double> point_leaves_in(const FunctionSpec& spec, const Box& box, double pad) {
  // X = z, so the z-range of the box is [lo.X, hi.X].
  try {
    return singular_leaves(spec, {box.lo[0] - pad, box.hi[0] + pad});
  } catch (const NumericError&) {
    return {};
  }
}

}  // namespace detail

/// Leaf {C = c} with vertices tagged by the sign of f. Red lines sit at constant z, so a
/// vertex is red-near when its height is within one cell diagonal of a red line (every
/// vertex of a bad leaf), and excluded within one cell diagonal of a point leaf.
inline Mesh mesh_leaf(const FunctionSpec& spec, double c, const Box& box, int resolution) {
  Mesh mesh = mesh_level_set(
      [&](const CausalPoint& q) { return casimir_at(spec, ambient_from_causal(q)) - c; }, box, resolution);
  const double diag = mesh.cell_diagonal;
  const std::vector<double> zs = detail::point_leaves_in(spec, box, diag);
  const RedLines rl = red_lines(spec, c, {box.lo[0] - diag, box.hi[0] + diag});
  mesh.tags.resize(mesh.vertices.size());
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    const AmbientPoint p = ambient_from_causal(mesh.vertices[v]);
    bool red = rl.bad_leaf;
    for (double z : rl.z) red = red || std::abs(p.z - z) < diag;
    if (detail::distance_to_point_leaves(p, zs) < diag)
      mesh.tags[v] = VertexTag::Excluded;
    else if (red)
      mesh.tags[v] = VertexTag::RedNear;
    else
      mesh.tags[v] = f_at(spec, p) > 0.0 ? VertexTag::Lorentzian : VertexTag::Euclidean;
  }
  return mesh;
}

/// The red zone {f = 0}; vertices within one cell diagonal of a point leaf are excluded.
inline Mesh mesh_red_zone(const FunctionSpec& spec, const Box& box, int resolution) {
  Mesh mesh =
      mesh_level_set([&](const CausalPoint& q) { return f_at(spec, ambient_from_causal(q)); }, box, resolution);
  const std::vector<double> zs = detail::point_leaves_in(spec, box, mesh.cell_diagonal);
  mesh.tags.resize(mesh.vertices.size());
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    const AmbientPoint p = ambient_from_causal(mesh.vertices[v]);
    mesh.tags[v] = detail::distance_to_point_leaves(p, zs) < mesh.cell_diagonal ? VertexTag::Excluded
                                                                                 : VertexTag::RedNear;
  }
  return mesh;
}

struct ComponentCount {
  int components = 0;
  /// Vertex counts per component, largest first.
  std::vector<int> sizes;
  int dropped_vertices = 0;
};

/// Connected components of the triangle graph after removing excluded vertices and every
/// vertex within `drop_cells` cell diagonals of one.
inline ComponentCount count_components(const Mesh& mesh, double drop_cells = 2.0) {
  const std::size_t nv = mesh.vertices.size();
  std::vector<char> keep(nv, 1);
  std::vector<Vec3> excluded;
  for (std::size_t v = 0; v < nv; ++v)
    if (!mesh.tags.empty() && mesh.tags[v] == VertexTag::Excluded) {
      const auto& q = mesh.vertices[v];
      excluded.emplace_back(q.X, q.Y, q.T);
      keep[v] = 0;
    }
  const double r = drop_cells * mesh.cell_diagonal;
  ComponentCount out;
  for (std::size_t v = 0; v < nv; ++v) {
    if (!keep[v]) continue;
    const Vec3 q(mesh.vertices[v].X, mesh.vertices[v].Y, mesh.vertices[v].T);
    for (const Vec3& e : excluded)
      if ((q - e).norm() < r) {
        keep[v] = 0;
        break;
      }
  }
  detail::DisjointSets ds(nv);
  std::vector<char> used(nv, 0);
  for (const auto& t : mesh.triangles)
    for (int a = 0; a < 3; ++a) {
      const int p = t[a], q = t[(a + 1) % 3];
      if (keep[p] && keep[q]) {
        ds.unite(p, q);
        used[p] = used[q] = 1;
      }
    }
  std::unordered_map<int, int> sizes;
  for (std::size_t v = 0; v < nv; ++v) {
    if (!keep[v]) ++out.dropped_vertices;
    if (keep[v] && used[v]) ++sizes[ds.find(static_cast<int>(v))];
  }
  for (const auto& [root, size] : sizes) out.sizes.push_back(size);
  std::sort(out.sizes.rbegin(), out.sizes.rend());
  out.components = static_cast<int>(out.sizes.size());
  return out;
}

// ---------------------------------------------------------------------------
// Red-line polylines

using Polyline = std::vector<AmbientPoint>;

namespace detail {

/// Marching squares for {g = 0} on an (n+1)^2 grid over [u0,u1] x [v0,v1]; returns chained
/// polylines in (u, v).
inline std::vector<std::vector<Vec2>> contour_lines(const std::function<double(double, double)>& g, double u0,
                                                    double u1, double v0, double v1, int n) {
  const int m = n + 1;
  const double hu = (u1 - u0) / n, hv = (v1 - v0) / n;
  std::vector<double> val(static_cast<std::size_t>(m) * m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) val[j * m + i] = g(u0 + i * hu, v0 + j * hv);
  auto at = [&](int i, int j) { return val[j * m + i]; };

  // Crossing points keyed by lattice edge: key = (j*m + i)*2 + axis.
  std::unordered_map<std::int64_t, int> ids;
  std::vector<Vec2> pts;
  auto crossing = [&](int i, int j, int axis) {
    const std::int64_t key = (static_cast<std::int64_t>(j) * m + i) * 2 + axis;
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    const double a = at(i, j), b = axis == 0 ? at(i + 1, j) : at(i, j + 1);
    const double t = a == b ? 0.5 : a / (a - b);
    const Vec2 p(u0 + (i + (axis == 0 ? t : 0.0)) * hu, v0 + (j + (axis == 1 ? t : 0.0)) * hv);
    const int id = static_cast<int>(pts.size());
    pts.push_back(p);
    ids.emplace(key, id);
    return id;
  };

  std::vector<std::vector<int>> adj;
  auto link = [&](int a, int b) {
    if (a == b) return;
    adj.resize(pts.size());
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double c00 = at(i, j), c10 = at(i + 1, j), c11 = at(i + 1, j + 1), c01 = at(i, j + 1);
      if (!std::isfinite(c00) || !std::isfinite(c10) || !std::isfinite(c11) || !std::isfinite(c01)) continue;
      // Edges: bottom, right, top, left.
      const bool neg[4] = {c00 < 0, c10 < 0, c11 < 0, c01 < 0};
      std::vector<int> hits;
      auto edge = [&](int e) {
        switch (e) {
          case 0: return crossing(i, j, 0);
          case 1: return crossing(i + 1, j, 1);
          case 2: return crossing(i, j + 1, 0);
          default: return crossing(i, j, 1);
        }
      };
      for (int e = 0; e < 4; ++e)
        if (neg[e] != neg[(e + 1) % 4]) hits.push_back(e);
      if (hits.size() == 2) {
        link(edge(hits[0]), edge(hits[1]));
      } else if (hits.size() == 4) {
        // Saddle: pair edges according to the sign at the cell centre.
        const bool centre_neg = 0.25 * (c00 + c10 + c11 + c01) < 0;
        if (centre_neg == neg[0]) {
          link(edge(0), edge(1));
          link(edge(2), edge(3));
        } else {
          link(edge(0), edge(3));
          link(edge(1), edge(2));
        }
      }
    }
  adj.resize(pts.size());

  std::vector<char> seen(pts.size(), 0);
  std::vector<std::vector<Vec2>> lines;
  auto walk = [&](int s) {
    std::vector<Vec2> line{pts[s]};
    seen[s] = 1;
    int prev = -1, cur = s;
    for (;;) {
      int next = -1;
      for (int q : adj[cur])
        if (q != prev && !seen[q]) {
          next = q;
          break;
        }
      if (next < 0) {
        // Close loops back onto the start.
        for (int q : adj[cur])
          if (q == s && prev != s && line.size() > 2) line.push_back(pts[s]);
        break;
      }
      seen[next] = 1;
      line.push_back(pts[next]);
      prev = cur;
      cur = next;
    }
    lines.push_back(std::move(line));
  };
  for (std::size_t s = 0; s < pts.size(); ++s)
    if (!seen[s] && adj[s].size() == 1) walk(static_cast<int>(s));
  for (std::size_t s = 0; s < pts.size(); ++s)
    if (!seen[s] && !adj[s].empty()) walk(static_cast<int>(s));
  return lines;
}

}  // namespace detail

/// Curves {C = c} in each plane z = z_red inside the box, traced by marching squares over
/// (Y, T) and then Newton-projected onto the leaf within the plane.
inline std::vector<Polyline> red_line_polylines(const FunctionSpec& spec, double c, const Box& box, int resolution) {
  std::vector<Polyline> out;
  const RedLines rl = red_lines(spec, c, {box.lo[0], box.hi[0]});
  for (double z : rl.z) {
    const Jet j = spec.jet(z);
    const double e = std::exp(j.p);
    auto g = [&](double Y, double T) {
      const AmbientPoint p = ambient_from_causal({z, Y, T});
      return p.x * p.y * e + j.q - c;
    };
    for (const auto& line : detail::contour_lines(g, box.lo[1], box.hi[1], box.lo[2], box.hi[2], resolution)) {
      Polyline poly;
      for (const Vec2& yt : line) {
        AmbientPoint p = ambient_from_causal({z, yt[0], yt[1]});
        for (int it = 0; it < 4; ++it) {
          const double r = p.x * p.y * e + j.q - c;
          const Vec2 grad(p.y * e, p.x * e);
          const double g2 = grad.squaredNorm();
          if (g2 == 0.0 || r == 0.0) break;
          p.x -= r * grad[0] / g2;
          p.y -= r * grad[1] / g2;
        }
        poly.push_back(p);
      }
      out.push_back(std::move(poly));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Writers

/// Wavefront OBJ in causal coordinates; faces grouped by zone (excluded if any corner is,
/// else red if any corner is red-near, else the majority sign).
inline void write_obj(std::ostream& os, const Mesh& mesh) {
  char buf[160];
  os << "# vertices in (X, Y, T)\n";
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v.X, v.Y, v.T);
    os << buf;
  }
  auto face_group = [&](const std::array<int, 3>& t) {
    int lor = 0;
    bool red = false;
    for (int id : t) {
      if (mesh.tags[id] == VertexTag::Excluded) return VertexTag::Excluded;
      red = red || mesh.tags[id] == VertexTag::RedNear;
      lor += mesh.tags[id] == VertexTag::Lorentzian;
    }
    if (red) return VertexTag::RedNear;
    return lor >= 2 ? VertexTag::Lorentzian : VertexTag::Euclidean;
  };
  auto faces = [&](auto&& pick) {
    for (const auto& t : mesh.triangles)
      if (pick(t)) os << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  };
  if (mesh.tags.empty()) {
    faces([](const auto&) { return true; });
    return;
  }
  for (VertexTag g : {VertexTag::Euclidean, VertexTag::Lorentzian, VertexTag::RedNear, VertexTag::Excluded}) {
    os << "g " << to_string(g) << '\n';
    faces([&](const std::array<int, 3>& t) { return face_group(t) == g; });
  }
}

inline void write_polylines_csv(std::ostream& os, const std::vector<Polyline>& lines) {
  char buf[160];
  os << "x,y,z\n";
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i > 0) os << '\n';
    for (const auto& p : lines[i]) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.x, p.y, p.z);
      os << buf;
    }
  }
}

}  // namespace leafgeo
