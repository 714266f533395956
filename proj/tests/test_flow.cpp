#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "leafgeo/flow.hpp"

using namespace leafgeo;

namespace {

const FunctionSpec kLinear = builtin_spec("linear");
const ScalarField Z = ScalarField::coordinate(2);

}  // namespace

TEST(Projection, NewtonReachesTheLeaf) {
  const AmbientPoint p = project_to_leaf(kLinear, 1.0, {1, 1, 0.1});
  EXPECT_LT(std::abs(casimir_at(kLinear, p) - 1.0), 1e-12);
  // The correction is along dC = (y, x, z) at the start, to first order.
  EXPECT_LT((p.vec() - Vec3(1, 1, 0.1)).norm(), 0.01);
}

TEST(Projection, FixedPointAndVanishingDifferential) {
  const AmbientPoint on{2.0, 0.5, 0.0};
  const AmbientPoint p = project_to_leaf(kLinear, 1.0, on);
  EXPECT_EQ(p.vec(), on.vec());
  EXPECT_THROW(project_to_leaf(kLinear, 1.0, {0, 0, 0}), NumericError);
  EXPECT_THROW(project_to_leaf(kLinear, 1e6, {1, 1, 0}, 1e-12, 1), NumericError);
}

TEST(Flow, EuclideanLeafDescends) {
  FlowOptions opt;
  opt.dt = 1e-4;
  opt.n_steps = 10000;
  const Trajectory tr = integrate_flow(kLinear, -1.0, Z, {1, -1, 0}, opt);
  EXPECT_EQ(tr.termination, Termination::StepsExhausted);
  ASSERT_EQ(tr.samples.size(), 10001u);
  for (std::size_t k = 1; k < tr.samples.size(); ++k) {
    EXPECT_LT(tr.samples[k].G, tr.samples[k - 1].G);
    EXPECT_GT(tr.samples[k].t, tr.samples[k - 1].t);
    ASSERT_TRUE(tr.samples[k].causal);
    EXPECT_EQ(tr.samples[k].causal->tag, CausalTag::Spacelike);
  }
  EXPECT_LT(tr.max_casimir_drift(-1.0), 1e-10);
}

TEST(Flow, TimelikeFieldAscendsOnLorentzianLeaf) {
  FlowOptions opt;
  opt.dt = 1e-4;
  opt.n_steps = 10000;
  const Trajectory tr = integrate_flow(kLinear, 1.0, Z, {1, 1, 0}, opt);
  EXPECT_EQ(tr.termination, Termination::StepsExhausted);
  for (std::size_t k = 1; k < tr.samples.size(); ++k) EXPECT_GT(tr.samples[k].G, tr.samples[k - 1].G);
  EXPECT_LT(tr.max_casimir_drift(1.0), 1e-10);
  // On this leaf x = y and z' = 2 - z^2 with z(0) = 0.
  const double t = tr.samples.back().t;
  EXPECT_NEAR(tr.samples.back().point.z, std::sqrt(2.0) * std::tanh(std::sqrt(2.0) * t), 1e-10);
}

TEST(Flow, CasimirIsCriticalImmediately) {
  const Trajectory tr = integrate_flow(kLinear, 1.0, casimir_field(kLinear), {1, 1, 0});
  EXPECT_EQ(tr.termination, Termination::CriticalPoint);
  EXPECT_EQ(tr.samples.size(), 1u);
}

TEST(Flow, StopsNearRedLine) {
  // Linear c = 0 is a bad leaf: f = 2C = 0 at the start already.
  const Trajectory tr = integrate_flow(kLinear, 0.0, Z, {1, -0.5, 1});
  EXPECT_EQ(tr.termination, Termination::RedLineApproach);
  EXPECT_FALSE(tr.samples.front().causal.has_value());
}

TEST(Flow, RejectsOffLeafStartAndBadOptions) {
  EXPECT_THROW(integrate_flow(kLinear, 1.0, Z, {1, 2, 0}), NumericError);
  FlowOptions opt;
  opt.dt = 0.0;
  EXPECT_THROW(integrate_flow(kLinear, 1.0, Z, {1, 1, 0}, opt), std::invalid_argument);
}

TEST(Flow, MeasuredRateMatchesMetricNorm) {
  FlowOptions opt;
  opt.dt = 1e-4;
  opt.n_steps = 2000;
  for (double c : {-1.0, 1.0}) {
    const Trajectory tr = integrate_flow(kLinear, c, Z, {1, c, 0}, opt);
    for (std::size_t k = 1; k + 1 < tr.samples.size(); ++k) {
      const auto& s = tr.samples;
      const double rate = (s[k + 1].G - s[k - 1].G) / (s[k + 1].t - s[k - 1].t);
      const double want = -s[k].causal->norm2;
      EXPECT_LE(std::abs(rate - want), 1e-3 * std::abs(want));
    }
  }
}

TEST(Flow, QuadraticLeafDriftAndDescentLaw) {
  const FunctionSpec s = builtin_spec("quadratic");
  const ScalarField G = ScalarField::parse("x + y^2 + z");
  const double c = 1.0;
  const AmbientPoint start = project_to_leaf(s, c, {1.5, 0.4, 0.2});
  FlowOptions opt;
  opt.n_steps = 10000;
  const Trajectory tr = integrate_flow(s, c, G, start, opt);
  EXPECT_LT(tr.max_casimir_drift(c), 1e-10);
  for (std::size_t k = 1; k < tr.samples.size(); ++k) {
    const auto& a = tr.samples[k - 1];
    const auto& b = tr.samples[k];
    if (!a.causal || !b.causal || a.causal->tag != b.causal->tag) continue;
    if (std::abs(a.causal->norm2) <= 1e-8) continue;
    if (a.causal->tag == CausalTag::Spacelike) {
      EXPECT_LT(b.G, a.G);
    } else if (a.causal->tag == CausalTag::Timelike) {
      EXPECT_GT(b.G, a.G);
    }
  }
}

TEST(Flow, FourthOrderConvergence) {
  const double T = 0.5;
  auto final_z = [&](double dt) {
    FlowOptions opt;
    opt.dt = dt;
    opt.n_steps = static_cast<int>(std::lround(T / dt));
    opt.casimir_tol = 1e-8;
    return integrate_flow(kLinear, 1.0, Z, {1, 1, 0}, opt).samples.back().point.z;
  };
  const double exact = std::sqrt(2.0) * std::tanh(std::sqrt(2.0) * T);
  const double e1 = std::abs(final_z(0.05) - exact);
  const double e2 = std::abs(final_z(0.025) - exact);
  EXPECT_GE(std::log2(e1 / e2), 3.5);
  // Same without the closed form: Richardson-style differences.
  const double a = final_z(0.1), b = final_z(0.05), d = final_z(0.025);
  EXPECT_GE(std::log2(std::abs(a - b) / std::abs(b - d)), 3.5);
}

TEST(Flow, CsvLayout) {
  FlowOptions opt;
  opt.n_steps = 2;
  const Trajectory tr = integrate_flow(kLinear, 1.0, Z, {1, 1, 0}, opt);
  std::ostringstream os;
  write_trajectory_csv(os, tr);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,x,y,z,G,C,f,causal");
  std::getline(is, line);
  EXPECT_EQ(line, "0,1,1,0,0,1,2,timelike");
  int rows = 1;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 3);
}
