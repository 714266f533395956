#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "leafgeo/mesh.hpp"

using namespace leafgeo;

namespace {

const FunctionSpec kLinear = builtin_spec("linear");
const FunctionSpec kQuadratic = builtin_spec("quadratic");

double radius(const CausalPoint& q) { return std::sqrt(q.X * q.X + q.Y * q.Y + q.T * q.T); }

void expect_valid(const Mesh& m) {
  for (const auto& t : m.triangles)
    for (int id : t) {
      ASSERT_GE(id, 0);
      ASSERT_LT(id, static_cast<int>(m.vertices.size()));
    }
  if (!m.tags.empty()) {
    EXPECT_EQ(m.tags.size(), m.vertices.size());
  }
}

}  // namespace

TEST(LevelSet, SphereVerticesOnTheSurface) {
  auto sphere = [](const CausalPoint& q) { return q.X * q.X + q.Y * q.Y + q.T * q.T - 1.0; };
  const Mesh a = mesh_level_set(sphere, Box::cube(1.5), 16);
  const Mesh b = mesh_level_set(sphere, Box::cube(1.5), 32);
  expect_valid(a);
  expect_valid(b);
  for (const auto& v : b.vertices) EXPECT_LT(std::abs(radius(v) - 1.0), b.cell_diagonal);
  const double ratio = static_cast<double>(b.vertices.size()) / a.vertices.size();
  EXPECT_GT(ratio, 3.0);
  EXPECT_LT(ratio, 5.0);
  EXPECT_EQ(count_components(b).components, 1);
  // Closed surface: V - E + F = 2.
  std::set<std::pair<int, int>> edges;
  for (const auto& t : b.triangles)
    for (int k = 0; k < 3; ++k) edges.insert(std::minmax(t[k], t[(k + 1) % 3]));
  EXPECT_EQ(static_cast<long>(b.vertices.size()) - static_cast<long>(edges.size()) +
                static_cast<long>(b.triangles.size()),
            2);
}

TEST(LevelSet, EmptyAndResolutionGuard) {
  auto positive = [](const CausalPoint& q) { return 1.0 + q.X * q.X; };
  EXPECT_TRUE(mesh_level_set(positive, Box::cube(1), 8).empty());
  EXPECT_THROW(mesh_level_set(positive, Box::cube(1), 7), std::invalid_argument);
}

TEST(LevelSet, HyperboloidSheets) {
  auto leaf = [](double c) {
    return [c](const CausalPoint& q) { return casimir_at(kLinear, ambient_from_causal(q)) - c; };
  };
  EXPECT_EQ(count_components(mesh_level_set(leaf(1.0), Box::cube(3), 64)).components, 1);
  EXPECT_EQ(count_components(mesh_level_set(leaf(-1.0), Box::cube(3), 64)).components, 2);
}

TEST(Leaf, QuadraticGoodAndLightlikeTags) {
  const Mesh good = mesh_leaf(kQuadratic, 1.0, Box::cube(3), 48);
  expect_valid(good);
  ASSERT_FALSE(good.empty());
  EXPECT_EQ(good.count(VertexTag::Lorentzian), good.vertices.size());

  const Mesh m = mesh_leaf(kQuadratic, 0.0, Box::cube(3), 64);
  EXPECT_GT(m.count(VertexTag::Euclidean), 0u);
  EXPECT_GT(m.count(VertexTag::Lorentzian), 0u);
  EXPECT_GT(m.count(VertexTag::RedNear), 0u);
  const RedLines rl = red_lines(kQuadratic, 0.0);
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    if (m.tags[v] != VertexTag::RedNear) continue;
    double d = INFINITY;
    for (double z : rl.z) d = std::min(d, std::abs(m.vertices[v].X - z));
    EXPECT_LT(d, m.cell_diagonal);
  }
}

TEST(Leaf, LinearBadLeafIsRedOrExcluded) {
  const Mesh m = mesh_leaf(kLinear, 0.0, Box::cube(3), 48);
  ASSERT_FALSE(m.empty());
  EXPECT_EQ(m.count(VertexTag::RedNear) + m.count(VertexTag::Excluded), m.vertices.size());
  EXPECT_GT(m.count(VertexTag::Excluded), 0u);
}

TEST(Leaf, InterpolationBound) {
  for (double c : {-1.0, 0.0, 0.5, 1.0}) {
    const Mesh m = mesh_leaf(kQuadratic, c, Box::cube(3), 48);
    for (const auto& q : m.vertices) {
      const AmbientPoint p = ambient_from_causal(q);
      // Bound |dC| over the cell by the gradient at the vertex plus slack for the cell size.
      double gmax = 0.0;
      for (int s = -1; s <= 1; s += 2)
        for (int a = 0; a < 3; ++a) {
          Vec3 d = p.vec();
          d[a] += s * m.cell_diagonal;
          gmax = std::max(gmax, casimir_gradient(kQuadratic.jet(d[2]), AmbientPoint::from(d)).norm());
        }
      gmax = std::max(gmax, casimir_gradient(kQuadratic.jet(p.z), p).norm());
      EXPECT_LT(std::abs(casimir_at(kQuadratic, p) - c), m.cell_diagonal * gmax);
    }
  }
}

TEST(RedZone, ComponentCounts) {
  EXPECT_EQ(count_components(mesh_red_zone(kQuadratic, Box::cube(3), 96)).components, 2);
  const Mesh lin = mesh_red_zone(kLinear, Box::cube(3), 96);
  EXPECT_GT(lin.count(VertexTag::Excluded), 0u);
  EXPECT_EQ(count_components(lin).components, 2);
}

TEST(RedZone, VerticesSatisfyTheRedEquation) {
  const Mesh m = mesh_red_zone(kQuadratic, Box::cube(3), 64);
  for (const auto& q : m.vertices) {
    const AmbientPoint p = ambient_from_causal(q);
    EXPECT_LT(std::abs(f_at(kQuadratic, p)), 2.0 * m.cell_diagonal * (1.0 + f_gradient(kQuadratic.jet(p.z), p).norm()) * 4.0);
  }
}

TEST(Polylines, QuadraticLightlikeLeaf) {
  const auto lines = red_line_polylines(kQuadratic, 0.0, Box::cube(3), 96);
  ASSERT_FALSE(lines.empty());
  std::set<long> heights;
  for (const auto& line : lines) {
    ASSERT_GE(line.size(), 2u);
    for (const AmbientPoint& p : line) {
      const double scale = 1.0 + std::abs(p.x * p.y);
      EXPECT_LT(std::abs(casimir_at(kQuadratic, p)), 1e-6 * scale);
      EXPECT_DOUBLE_EQ(p.z, line.front().z);
    }
    heights.insert(std::lround(line.front().z * 100));
  }
  EXPECT_EQ(heights, (std::set<long>{-77, -30}));
}

TEST(Polylines, GoodLeavesHaveNone) {
  EXPECT_TRUE(red_line_polylines(kQuadratic, 1.0, Box::cube(3), 64).empty());
  EXPECT_TRUE(red_line_polylines(kLinear, 1.0, Box::cube(3), 64).empty());
}

TEST(Writers, ObjGroupsAndCsv) {
  const Mesh m = mesh_leaf(kQuadratic, 0.0, Box::cube(2), 16);
  std::ostringstream os;
  write_obj(os, m);
  const std::string obj = os.str();
  for (const char* g : {"g euclidean\n", "g lorentzian\n", "g red\n"}) EXPECT_NE(obj.find(g), std::string::npos);
  std::size_t faces = 0, verts = 0;
  std::istringstream is(obj);
  for (std::string line; std::getline(is, line);) {
    faces += line.rfind("f ", 0) == 0;
    verts += line.rfind("v ", 0) == 0;
  }
  EXPECT_EQ(faces, m.triangles.size());
  EXPECT_EQ(verts, m.vertices.size());

  std::ostringstream cs;
  write_polylines_csv(cs, {{{1, 2, 3}}, {{4, 5, 6}, {7, 8, 9}}});
  EXPECT_EQ(cs.str(), "x,y,z\n1,2,3\n\n4,5,6\n7,8,9\n");
}
