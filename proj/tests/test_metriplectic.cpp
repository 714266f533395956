#include <gtest/gtest.h>

#include <Eigen/QR>
#include <cmath>
#include <random>

#include "leafgeo/leafscape.hpp"
#include "leafgeo/metriplectic.hpp"
#include "leafgeo/sampling.hpp"
#include "oracles.hpp"

using namespace leafgeo;

namespace {

const FunctionSpec kLinear = builtin_spec("linear");
const FunctionSpec kQuadratic = builtin_spec("quadratic");

AmbientPoint random_point(std::mt19937_64& rng, double half = 2.0) {
  std::uniform_real_distribution<double> u(-half, half);
  return {u(rng), u(rng), u(rng)};
}

}  // namespace

TEST(Metriplectic, DocumentedMatrices) {
  Mat3 want;
  want << 1, -1, 0, -1, 1, 0, 0, 0, -2;
  const MetriplecticAtPoint a = metriplectic_at(kLinear, {1, 1, 0});
  EXPECT_EQ(a.m, want);
  EXPECT_DOUBLE_EQ(a.w, 0.0);
  EXPECT_DOUBLE_EQ(a.f, 2.0);
  EXPECT_EQ(metriplectic_at(kLinear, {0, 0, 0}).m, Mat3::Zero());
}

TEST(Metriplectic, MatchesDefinitionAndFactorization) {
  std::mt19937_64 rng(11);
  const Mat3 g = metric_matrix();
  for (const FunctionSpec& s : builtin_specs())
    for (int i = 0; i < 1000; ++i) {
      const AmbientPoint p = random_point(rng);
      const MetriplecticAtPoint mp = metriplectic_at(s, p);
      const auto ref = oracle::metriplectic(p.x, p.y, s.U(p.z) + p.x * p.y * s.V(p.z));
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) EXPECT_NEAR(mp.m(a, b), ref[a][b], 1e-12 * (1 + mp.m.norm()));
      EXPECT_EQ(mp.m, mp.m.transpose());
      const Mat3 pi = bivector_at(s, p).m;
      EXPECT_LE((mp.m + pi * g * pi).norm(), 1e-12 * (1 + mp.m.norm()));
    }
}

TEST(DegeneracyFunction, DocumentedValues) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 100; ++i) {
    const AmbientPoint p = random_point(rng);
    EXPECT_NEAR(f_at(kLinear, p), 2.0 * casimir_at(kLinear, p), 1e-12);
  }
  EXPECT_DOUBLE_EQ(f_at(kQuadratic, {1, -0.5, 1}), 3.0);
  for (double z : singular_leaves(kQuadratic)) EXPECT_NEAR(f_at(kQuadratic, {0, 0, z}), 0.0, 1e-20);
  for (const FunctionSpec& s : builtin_specs())
    for (int i = 0; i < 200; ++i) {
      const AmbientPoint p = random_point(rng);
      const Jet j = s.jet(p.z);
      EXPECT_NEAR(f_at(s, p), f_expanded(j, p.x * p.y), 1e-12 * (1 + std::abs(f_at(s, p))));
      const auto fd = oracle::gradient([&](double x, double y, double z) { return f_at(s, {x, y, z}); }, p.x, p.y, p.z, 1e-5);
      const Vec3 gf = f_gradient(j, p);
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(gf[k], fd[k], 1e-6 * (1 + gf.norm()));
    }
}

TEST(GdbField, DocumentedValues) {
  EXPECT_EQ(gdb_ambient_at(kLinear, ScalarField::coordinate(2), {1, 1, 0}), Vec3(0, 0, 2));
  EXPECT_EQ(gdb_ambient_at(kLinear, ScalarField::coordinate(0), {1, 1, 0}), Vec3(-1, 1, 0));
  for (const FunctionSpec& s : builtin_specs())
    EXPECT_LT(gdb_ambient_at(s, casimir_field(s), {0.5, -0.3, 0.8}).norm(), 1e-14);
}

TEST(GdbField, EqualsPoissonOfMetricDualOfHamiltonian) {
  std::mt19937_64 rng(13);
  const Mat3 g = metric_matrix();
  for (const FunctionSpec& s : builtin_specs())
    for (const char* e : {"x", "y", "z", "x^2+y^2", "x*y + sin(z)"}) {
      const ScalarField G = ScalarField::parse(e);
      for (int i = 0; i < 200; ++i) {
        const AmbientPoint p = random_point(rng);
        const Vec3 xg = hamiltonian_field_at(s, G, p);
        const Vec3 ref = bivector_at(s, p).m.transpose() * (g * xg);
        const Vec3 v = gdb_ambient_at(s, G, p);
        EXPECT_LE((v - ref).norm(), 1e-12 * (1 + metriplectic_at(s, p).m.norm() * G.gradient(p).norm()));
        const Vec3 dC = casimir_gradient(s, p);
        EXPECT_LE(std::abs(dC.dot(v)), 1e-9 * (1 + dC.norm() * v.norm())) << s.label() << " G=" << e;
      }
    }
}

TEST(Metriplectic, CasimirInKernelAndImageInsidePoissonImage) {
  std::mt19937_64 rng(14);
  for (const FunctionSpec& s : builtin_specs())
    for (int i = 0; i < 300; ++i) {
      const AmbientPoint p = random_point(rng);
      const Mat3 m = metriplectic_at(s, p).m;
      const Vec3 dC = casimir_gradient(s, p);
      EXPECT_LE((m * dC).norm(), 1e-9 * (1 + m.norm() * dC.norm()));
      const Mat3 pi = bivector_at(s, p).m;
      const Mat3 fit = pi * pi.colPivHouseholderQr().solve(m);
      EXPECT_LE((fit - m).norm(), 1e-9 * (1 + m.norm()));
    }
}

TEST(Classify, DocumentedPoints) {
  EXPECT_EQ(classify_point(kQuadratic, {0, 0, 1 / std::sqrt(3.0)}), PointClass::SingularLeaf);
  EXPECT_EQ(classify_point(kLinear, {1, -0.5, 1}), PointClass::Red);
  EXPECT_EQ(classify_point(kLinear, {1, 1, 0}), PointClass::Regular);
  EXPECT_EQ(classify_point(kLinear, {0, 0, 0}), PointClass::SingularLeaf);
  EXPECT_EQ(classify_point(kLinear, {0, 0, 0.5}), PointClass::Regular);
}

TEST(Classify, RankLawOnConstructedPoints) {
  for (const FunctionSpec& s : builtin_specs()) {
    Sampler rng(42);
    const auto zs = singular_leaves(s, {-2, 2});
    ASSERT_FALSE(zs.empty());
    for (int i = 0; i < 500; ++i) {
      const AmbientPoint reg = rng.regular_point(s);
      EXPECT_EQ(classify_point(s, reg), PointClass::Regular);
      EXPECT_EQ(matrix_rank(metriplectic_at(s, reg).m), 2);
      const AmbientPoint red = rng.red_point(s);
      EXPECT_EQ(classify_point(s, red), PointClass::Red) << s.label() << " f=" << f_at(s, red);
      EXPECT_EQ(matrix_rank(metriplectic_at(s, red).m), 1) << s.label();
      const AmbientPoint sing{0, 0, zs[i % zs.size()]};
      EXPECT_EQ(classify_point(s, sing), PointClass::SingularLeaf);
      EXPECT_EQ(matrix_rank(metriplectic_at(s, sing).m), 0);
    }
  }
}

TEST(Rank, ThresholdsOnKnownMatrices) {
  EXPECT_EQ(matrix_rank(Mat3::Identity()), 3);
  EXPECT_EQ(matrix_rank(Mat3::Zero()), 0);
  Mat3 r1 = Vec3(1, 2, 3) * Vec3(1, 2, 3).transpose();
  EXPECT_EQ(matrix_rank(r1), 1);
  Mat3 tiny = Mat3::Zero();
  tiny(0, 1) = tiny(1, 0) = 1e-32;
  EXPECT_EQ(matrix_rank(tiny), 0);
}
